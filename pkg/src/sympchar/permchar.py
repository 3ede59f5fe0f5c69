"""G-sets, fixed points, orbit counting and the permutation-character identities.

Inner products of permutation characters are computed as orbit counts on
product G-sets (Burnside), never from character tables.  The two permutation
domains of interest are V (vectors) and the quadratic forms polarising to the
standard alternating form, split by type; the latter model the coset spaces of
O+ and O- in Sp.
"""

from dataclasses import dataclass
from functools import cached_property, lru_cache
import time

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import matrix
from .errors import BoundExceededError
from .grp import (
    DEFAULT_ENUM_BOUND,
    GroupElement,
    build_generators,
    enumerate_matrices,
    random_matrices,
)
from .report import Record, VerificationReport
from .space import (
    DEFAULT_FORM_BOUND,
    QuadraticForm,
    Space,
    form_types,
    hyperbolic_form,
    image_tables,
    standard_forms,
)

DEFAULT_PRODUCT_BOUND = 20_000_000
KINDS = ("vectors", "forms+", "forms-", "lines")


class GSet:
    """A finite domain with a right action of Sp_2m(q).

    ``keys`` holds one int per point: the packed vector for ``vectors`` and
    ``lines``, the packed functional l of the form Q+ + l^2 for ``forms``.
    ``act`` is the reference single-point action; ``perms`` computes the
    induced permutations of a batch of matrices directly on indices.
    """

    def __init__(self, kind, sp, bound=DEFAULT_FORM_BOUND):
        if kind not in KINDS:
            raise ValueError(f"unknown G-set kind {kind!r}; expected one of {KINDS}")
        if sp.size > bound:
            raise BoundExceededError(f"domain built from {sp.size} vectors exceeds the bound {bound}")
        self.kind = kind
        self.space = sp
        if kind == "vectors":
            keys = np.arange(1, sp.size, dtype=np.int64)
        elif kind == "lines":
            keys = sp.line_reps
        else:
            eps = 1 if kind == "forms+" else -1
            keys = np.flatnonzero(form_types(sp) == eps).astype(np.int64)
        self.keys = keys
        # position of every packed key in the domain, -1 when absent
        pos = np.full(sp.size, -1, dtype=np.int64)
        pos[keys] = np.arange(len(keys))
        self._pos = pos

    def __len__(self):
        return len(self.keys)

    def __repr__(self):
        return f"GSet({self.kind!r}, m={self.space.m}, q={self.space.q}, size={len(self)})"

    # -- objects -------------------------------------------------------------

    def obj(self, i):
        sp = self.space
        key = int(self.keys[i])
        if self.kind in ("vectors", "lines"):
            return sp.unpack(key)
        return hyperbolic_form(sp, sp.ctx.sq_table[sp.digits[key]])

    def objects(self):
        return [self.obj(i) for i in range(len(self))]

    def index(self, x):
        sp = self.space
        if self.kind in ("vectors", "lines"):
            key = sp.pack(x)
        else:
            if not isinstance(x, QuadraticForm) or hyperbolic_form(sp, x.diagonal()) != x:
                raise ValueError("not a form with the standard polarization")
            key = sp.pack(tuple(sp.ctx.sqrt(d) for d in x.diagonal()))
        i = int(self._pos[key])
        if i < 0:
            raise KeyError(f"{x!r} is not in {self!r}")
        return i

    def act(self, x, g):
        if self.kind == "vectors":
            return g.apply(x)
        if self.kind == "lines":
            return self.space.line_rep(g.apply(x))
        return x.act(g)

    # -- batched permutations -------------------------------------------------------

    def perms(self, mats):
        """(N, |X|) array: row k is the permutation of indices induced by mats[k]."""
        sp = self.space
        mats = np.asarray(mats, dtype=np.uint8)
        if self.kind == "vectors":
            return image_tables(sp, mats)[:, 1:] - 1
        if self.kind == "lines":
            img = image_tables(sp, mats)[:, self.keys]
            return self._pos[sp.line_of[img]]
        inv = np.stack([matrix.inverse(a, sp.ctx) for a in mats])
        return self._pos[form_images(sp, inv)[:, self.keys]]

    def perm(self, g):
        return self.perms(g.mat[None])[0]

    def fixed_points_batch(self, mats):
        mats = np.asarray(mats, dtype=np.uint8)
        sp = self.space
        if self.kind in ("forms+", "forms-"):
            # g fixes a form iff g^-1 does, so the inverse is not needed here
            img = form_images(sp, mats)[:, self.keys]
            return np.count_nonzero(img == self.keys, axis=1)
        return np.count_nonzero(self.perms(mats) == np.arange(len(self)), axis=1)


def form_images(sp, mats):
    """Packed functional of (Q+ + l^2) o h for every l, for each h in mats.

    (Q+ + l^2)(x h) = Q+(x) + (c.x)^2 + (l h^T . x)^2 where c_i^2 = Q+(e_i h).
    """
    ctx = sp.ctx
    mats = np.asarray(mats, dtype=np.uint8)
    qplus = np.zeros(mats.shape[:2], dtype=np.uint8)
    for i in range(0, sp.n, 2):
        qplus ^= ctx.mul_table[mats[:, :, i], mats[:, :, i + 1]]
    c = sp.pack_rows(ctx.sqrt_table[qplus])
    return image_tables(sp, mats.transpose(0, 2, 1)) ^ c[:, None]


def fixed_points(g, X):
    return int(X.fixed_points_batch(g.mat[None])[0])


@lru_cache(maxsize=None)
def make_gset(kind, m, ctx, bound=DEFAULT_FORM_BOUND):
    return GSet(kind, Space(m, ctx), bound)


# -- orbits ------------------------------------------------------------------------


class ProductGSet:
    """X x Y with the diagonal action; point (i, j) has index i*|Y| + j."""

    def __init__(self, X, Y, bound=DEFAULT_PRODUCT_BOUND):
        if len(X) * len(Y) > bound:
            raise BoundExceededError(f"|X x Y| = {len(X) * len(Y)} exceeds the bound {bound}")
        self.X, self.Y = X, Y

    def __len__(self):
        return len(self.X) * len(self.Y)

    def perms(self, mats):
        px, py = self.X.perms(mats), self.Y.perms(mats)
        ny = len(self.Y)
        return (px[:, :, None] * ny + py[:, None, :]).reshape(len(px), -1)


@dataclass
class Orbits:
    labels: np.ndarray  # orbit number of every point, numbered by first appearance

    @cached_property
    def count(self):
        return int(self.labels.max()) + 1 if len(self.labels) else 0

    @cached_property
    def sizes(self):
        return np.bincount(self.labels, minlength=self.count)

    @cached_property
    def representatives(self):
        _, first = np.unique(self.labels, return_index=True)
        return first

    def partition(self):
        return [frozenset(np.flatnonzero(self.labels == k).tolist()) for k in range(self.count)]


def orbits(gens, X, batch=None):
    """Connected components of the Schreier graph of the generators on X.

    Components are merged one batch of generators at a time: the graph for a
    batch lives on the components found so far, so the node count shrinks as
    generators are added.
    """
    n = len(X)
    comp = np.arange(n, dtype=np.int64)
    k = n
    mats = gens.mats
    if batch is None:
        batch = max(1, 4_000_000 // max(n, 1))
    for start in range(0, len(mats), batch):
        perms = X.perms(mats[start:start + batch])
        src = np.broadcast_to(comp, perms.shape).ravel()
        dst = comp[perms].ravel()
        keep = src != dst
        if not keep.any():
            continue
        graph = coo_matrix(
            (np.ones(int(keep.sum()), dtype=np.int8), (src[keep], dst[keep])), shape=(k, k)
        )
        k, lab = connected_components(graph, directed=True, connection="weak")
        comp = lab[comp]
    # renumber by first appearance so labels are deterministic
    _, first, inverse = np.unique(comp, return_index=True, return_inverse=True)
    order = np.argsort(np.argsort(first))
    return Orbits(order[inverse].astype(np.int64))


def orbit_count(gens, X):
    return orbits(gens, X).count


def char_inner_product(X, Y, gens, bound=DEFAULT_PRODUCT_BOUND):
    """<pi_X, pi_Y> as the number of orbits on X x Y."""
    return orbit_count(gens, ProductGSet(X, Y, bound))


def burnside_inner_product(X, Y, elements):
    """(1/|G|) sum_g fix(g, X) fix(g, Y) over an explicit list of group matrices."""
    total = 0
    for start in range(0, len(elements), 4096):
        block = elements[start:start + 4096]
        fx = X.fixed_points_batch(block).astype(np.int64)
        fy = Y.fixed_points_batch(block).astype(np.int64)
        total += int(np.dot(fx, fy))
    quotient, rem = divmod(total, len(elements))
    if rem:
        raise ArithmeticError(f"Burnside sum {total} not divisible by |G| = {len(elements)}")
    return quotient


# -- expected values ------------------------------------------------------------------


def expected(m, q):
    """Closed-form values of the identities being checked."""
    return {
        "eq1": 2 * q - 1,
        "eq2": q // 2 + 1,
        "eq3": q // 2,
        "eq4": q,
        "omega_plus": q**m * (q**m + 1) // 2,
        "omega_minus": q**m * (q**m - 1) // 2,
        "artin_schreier": q // 2,
    }


def _timed(check_id, m, q, provenance, fn):
    t0 = time.perf_counter()
    computed, expect, note = fn()
    ms = int((time.perf_counter() - t0) * 1000)
    return Record(check_id, (m, q), computed, expect, provenance, computed == expect, ms, note)


def verify_stabilizer_orbits(m, ctx):
    q = ctx.q
    X = make_gset("vectors", m, ctx)

    def run():
        return orbit_count(build_generators("G_v", m, ctx), X), expected(m, q)["eq1"], "orbits of G_v on V\\{0}"

    return _timed("eq1", m, q, "<pi0,pi0> = 2q-1", run)


def verify_form_self_products(m, ctx, bound=DEFAULT_PRODUCT_BOUND):
    q = ctx.q
    G = build_generators("Sp", m, ctx, verify=False)

    def run():
        got = {
            "plus": char_inner_product(make_gset("forms+", m, ctx), make_gset("forms+", m, ctx), G, bound),
            "minus": char_inner_product(make_gset("forms-", m, ctx), make_gset("forms-", m, ctx), G, bound),
        }
        e = expected(m, q)["eq2"]
        return got, {"plus": e, "minus": e}, "orbits of Sp on Omega^e x Omega^e"

    return _timed("eq2", m, q, "<pi+,pi+> = <pi-,pi-> = q/2+1", run)


def verify_form_cross_product(m, ctx, bound=DEFAULT_PRODUCT_BOUND):
    q = ctx.q
    G = build_generators("Sp", m, ctx, verify=False)

    def run():
        got = char_inner_product(make_gset("forms+", m, ctx), make_gset("forms-", m, ctx), G, bound)
        return got, expected(m, q)["eq3"], "orbits of Sp on Omega+ x Omega-"

    return _timed("eq3", m, q, "<pi+,pi-> = q/2", run)


def verify_vector_form_products(m, ctx, bound=DEFAULT_PRODUCT_BOUND):
    q = ctx.q
    G = build_generators("Sp", m, ctx, verify=False)
    V = make_gset("vectors", m, ctx)

    def run():
        got = {
            "plus": char_inner_product(V, make_gset("forms+", m, ctx), G, bound),
            "minus": char_inner_product(V, make_gset("forms-", m, ctx), G, bound),
        }
        levels = {label: _level_set_orbits(m, ctx, label) for label in ("O+", "O-")}
        got["level_sets"] = all(levels.values())
        e = expected(m, q)["eq4"]
        return got, {"plus": e, "minus": e, "level_sets": True}, "orbits of Sp on V\\{0} x Omega^e"

    return _timed("eq4", m, q, "<pi0,pi+> = <pi0,pi-> = q", run)


def _level_set_orbits(m, ctx, label):
    """Whether the O^e-orbits on V\\{0} are exactly the level sets of Q^e."""
    sp = Space(m, ctx)
    form = standard_forms(m, ctx)[0 if label == "O+" else 1]
    orb = orbits(build_generators(label, m, ctx), make_gset("vectors", m, ctx))
    values = form.values(sp)[1:]
    return _same_partition(orb.labels, values)


def _same_partition(labels_a, labels_b):
    """Whether two labelings of the same points induce the same partition."""
    pairs = np.unique(np.stack([labels_a, labels_b.astype(np.int64)]), axis=1)
    return pairs.shape[1] == len(np.unique(labels_a)) == len(np.unique(labels_b))


# -- theorem and corollary ---------------------------------------------------------------


@dataclass
class FixedPointCounts:
    mats: np.ndarray  # the tested elements
    vectors: np.ndarray  # fixed vectors including 0, i.e. pi(g)
    plus: np.ndarray  # pi+(g)
    minus: np.ndarray  # pi-(g)
    mode: str
    seed: object


def _theorem_elements(m, ctx, mode, seed, count, bound):
    G = build_generators("Sp", m, ctx, verify=False)
    if mode == "exhaustive":
        return enumerate_matrices(G, bound)
    if mode == "sampled":
        if seed is None:
            raise ValueError("sampled mode needs a seed")
        return random_matrices(G, count, seed)
    raise ValueError(f"unknown mode {mode!r}")


@lru_cache(maxsize=2)
def fixed_point_counts(m, ctx, mode="exhaustive", seed=None, count=1000, bound=DEFAULT_ENUM_BOUND):
    """pi(g), pi+(g), pi-(g) for every tested element g."""
    mats = _theorem_elements(m, ctx, mode, seed, count, bound)
    V = make_gset("vectors", m, ctx)
    plus, minus = make_gset("forms+", m, ctx), make_gset("forms-", m, ctx)
    chunk = max(1, (1 << 22) // Space(m, ctx).size)
    fv, fp, fm = [], [], []
    for start in range(0, len(mats), chunk):
        block = mats[start:start + chunk]
        fv.append(V.fixed_points_batch(block) + 1)
        fp.append(plus.fixed_points_batch(block))
        fm.append(minus.fixed_points_batch(block))
    return FixedPointCounts(
        mats, np.concatenate(fv), np.concatenate(fp), np.concatenate(fm), mode, seed
    )


def _mode_note(counts):
    n = len(counts.mats)
    if counts.mode == "sampled":
        return f"{n} sampled elements, seed {counts.seed}"
    return f"all {n} elements"


def _counterexamples(counts, bad, limit=5):
    return [repr(GroupElement(a, None)) for a in counts.mats[np.flatnonzero(bad)[:limit]]]


def verify_theorem(m, ctx, mode="exhaustive", seed=None, count=1000, bound=DEFAULT_ENUM_BOUND):
    """Check pi(g) = pi+(g) + pi-(g) for every tested g."""
    q = ctx.q
    t0 = time.perf_counter()
    c = fixed_point_counts(m, ctx, mode, seed, count, bound)
    bad = c.vectors != c.plus + c.minus
    nbad = int(bad.sum())
    note = _mode_note(c)
    if nbad:
        note += "; counterexamples: " + " ".join(_counterexamples(c, bad))
    ms = int((time.perf_counter() - t0) * 1000)
    return Record(
        "theorem", (m, q), {"checked": len(c.mats), "failures": nbad},
        {"checked": len(c.mats), "failures": 0},
        "pi = pi+ + pi-", nbad == 0, ms, note,
    )


def verify_corollary(m, ctx, mode="exhaustive", seed=None, count=1000, bound=DEFAULT_ENUM_BOUND):
    """Check that every tested g fixes at least one form, i.e. pi+(g) + pi-(g) >= 1."""
    q = ctx.q
    t0 = time.perf_counter()
    c = fixed_point_counts(m, ctx, mode, seed, count, bound)
    bad = c.plus + c.minus < 1
    nbad = int(bad.sum())
    note = _mode_note(c)
    if nbad:
        note += "; counterexamples: " + " ".join(_counterexamples(c, bad))
    ms = int((time.perf_counter() - t0) * 1000)
    return Record(
        "corollary", (m, q), {"checked": len(c.mats), "failures": nbad},
        {"checked": len(c.mats), "failures": 0},
        "pi+(g) + pi-(g) >= 1: g lies in a conjugate of O+ or O-", nbad == 0, ms, note,
    )


# -- orbit structure -------------------------------------------------------------------


def gv_expected_partition(sp, v):
    """Labels of the predicted G_v-orbits on V\\{0}: {a v}, v^perp \\ <v>, and {u : (v,u) = c}."""
    ctx = sp.ctx
    pairing = sp.bilinear_all(v).astype(np.int64)[1:]
    labels = np.where(pairing == 0, 0, ctx.q + pairing)
    for a in range(1, ctx.q):
        labels[sp.pack(sp.scale(a, v)) - 1] = 2 * ctx.q + a
    return labels


def verify_orbit_structure(m, ctx, bound=DEFAULT_ENUM_BOUND):
    """Orbit partitions of G_v and O^e on V\\{0}, O^-e on Omega^e, and Sp on the forms.

    Also records the enumerated order of every generating set whose claimed
    order is within ``bound``.
    """
    sp = Space(m, ctx)
    q = ctx.q
    t0 = time.perf_counter()
    V = make_gset("vectors", m, ctx)
    v = sp.basis()[0]
    gv = orbits(build_generators("G_v", m, ctx, v=v), V)
    got, want = {}, {}

    got["G_v_partition"] = _same_partition(gv.labels, gv_expected_partition(sp, v))
    want["G_v_partition"] = True
    got["G_v_sizes"] = sorted(set(gv.sizes.tolist()))
    want["G_v_sizes"] = sorted({1, q ** (2 * m - 1) - q, q ** (2 * m - 1)})
    for label in ("O+", "O-"):
        got[f"{label}_level_sets"] = _level_set_orbits(m, ctx, label)
        want[f"{label}_level_sets"] = True
    # O- on Omega+ and O+ on Omega-: q/2 orbits each
    got["O-_on_Omega+"] = orbit_count(build_generators("O-", m, ctx), make_gset("forms+", m, ctx))
    got["O+_on_Omega-"] = orbit_count(build_generators("O+", m, ctx), make_gset("forms-", m, ctx))
    want["O-_on_Omega+"] = want["O+_on_Omega-"] = q // 2
    G = build_generators("Sp", m, ctx, verify=False)
    e = expected(m, q)
    for kind, size in (("forms+", e["omega_plus"]), ("forms-", e["omega_minus"])):
        X = make_gset(kind, m, ctx)
        got[f"{kind}_size"] = len(X)
        want[f"{kind}_size"] = size
        got[f"Sp_orbits_on_{kind}"] = orbit_count(G, X)
        want[f"Sp_orbits_on_{kind}"] = 1
    got["orders"], want["orders"] = {}, {}
    for label in ("Sp", "O+", "O-", "G_v", "P"):
        g = build_generators(label, m, ctx, bound=bound)
        got["orders"][label] = g.verified_order
        want["orders"][label] = g.claimed_order if g.claimed_order <= bound else None
    ms = int((time.perf_counter() - t0) * 1000)
    return Record(
        "orbits", (m, q), got, want,
        "G_v orbits {a v}, v^perp\\<v>, {(v,u) = c}; O^e orbits = level sets V^e_lambda; |{a+a^2}| = q/2; orbit sizes q^m(q^m+-1)/2",
        got == want, ms,
    )


def verify_degree_identities(m, ctx, chi=None):
    """|Omega^e| = 1 + chi^e(1) + pi'(1) and q^2m - 1 = 1 + chi+(1) + chi-(1) + 2 pi'(1)."""
    from .srg import chi_degrees

    q = ctx.q
    t0 = time.perf_counter()
    chi_minus, chi_plus = chi if chi is not None else chi_degrees(m, ctx)
    lines = (q ** (2 * m) - 1) // (q - 1)
    pi_prime, rem = divmod((q // 2 - 1) * (q ** (2 * m) - 1), q - 1)
    assert rem == 0
    e = expected(m, q)
    got = {
        "omega_plus": 1 + chi_plus + pi_prime,
        "omega_minus": 1 + chi_minus + pi_prime,
        "pi0_degree": 1 + chi_plus + chi_minus + 2 * pi_prime,
        "rank3_degree": 1 + chi_plus + chi_minus,
    }
    want = {
        "omega_plus": e["omega_plus"],
        "omega_minus": e["omega_minus"],
        "pi0_degree": q ** (2 * m) - 1,
        "rank3_degree": lines,
    }
    ms = int((time.perf_counter() - t0) * 1000)
    return Record(
        "degrees", (m, q), got, want,
        "pi+(1) = 1 + chi+(1) + pi'(1); pi'(1) = (q/2-1)(q^2m-1)/(q-1); pi0 = 1 + chi+ + chi- + 2 pi'",
        got == want, ms, f"chi-(1)={chi_minus}, chi+(1)={chi_plus}, pi'(1)={pi_prime}",
    )
