"""Matrix groups acting on row vectors: Sp_2m(q), O^eps_2m(q), G_v and P.

Generators are transvections.  Each ``GeneratorSet`` carries the order given by
the standard formula; ``enumerate_group`` closes the generators by breadth-first
search and raises if the closure falls short of that order.
"""

from dataclasses import dataclass, field, replace
from functools import lru_cache
import itertools
import logging
import math

import numpy as np

from . import matrix
from .errors import BoundExceededError, GenerationShortfallError, PreconditionError, SingularVectorError
from .space import Space, complete_hyperbolic_basis, standard_forms

log = logging.getLogger(__name__)

DEFAULT_ENUM_BOUND = 20_000_000
LABELS = ("Sp", "O+", "O-", "G_v", "P")


class GroupElement:
    """An invertible matrix over GF(q) acting on row vectors from the right."""

    __slots__ = ("mat", "ctx", "_key")

    def __init__(self, mat, ctx):
        mat = np.array(mat, dtype=np.uint8)
        mat.flags.writeable = False
        self.mat = mat
        self.ctx = ctx
        self._key = None

    @classmethod
    def identity(cls, n, ctx):
        return cls(matrix.identity(n), ctx)

    @property
    def n(self):
        return self.mat.shape[0]

    @property
    def key(self):
        """Row-major bytes of the entries; used for equality and hashing."""
        if self._key is None:
            self._key = self.mat.tobytes()
        return self._key

    def __eq__(self, other):
        return isinstance(other, GroupElement) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __mul__(self, other):
        return GroupElement(matrix.matmul(self.mat, other.mat, self.ctx), self.ctx)

    def __repr__(self):
        rows = ",".join("".join(f"{x:x}" for x in row) for row in self.mat)
        return f"GroupElement({rows})"

    def inverse(self):
        return GroupElement(matrix.inverse(self.mat, self.ctx), self.ctx)

    def is_identity(self):
        return np.array_equal(self.mat, matrix.identity(self.n))

    def apply(self, v):
        """The row vector v g."""
        out = matrix.matmul(np.asarray(v, dtype=np.uint8)[None], self.mat, self.ctx)[0]
        return tuple(int(x) for x in out)

    def is_isometry(self, sp=None):
        """Whether g preserves the standard alternating form: g J g^T = J."""
        sp = sp or Space(self.n // 2, self.ctx)
        lhs = matrix.matmul(matrix.matmul(self.mat, sp.gram, self.ctx), self.mat.T, self.ctx)
        return np.array_equal(lhs, sp.gram)

    def preserves(self, form):
        return form.compose(self.mat) == form

    def fixes_vector(self, v):
        return self.apply(v) == tuple(v)


@dataclass(frozen=True)
class GeneratorSet:
    gens: tuple
    label: str
    claimed_order: int
    m: int
    ctx: object
    verified_order: object = field(default=None, compare=False)  # closure size when enumerated

    def __post_init__(self):
        if not self.gens:
            raise ValueError("a generator set needs at least one element")

    def __len__(self):
        return len(self.gens)

    @property
    def mats(self):
        return np.stack([g.mat for g in self.gens])


# -- order formulas -----------------------------------------------------------


def sp_order(m, q):
    return q ** (m * m) * math.prod(q ** (2 * i) - 1 for i in range(1, m + 1))


def o_order(m, q, eps):
    return 2 * q ** (m * (m - 1)) * (q**m - eps) * math.prod(q ** (2 * i) - 1 for i in range(1, m))


def claimed_order(label, m, q):
    if label == "Sp":
        return sp_order(m, q)
    if label in ("O+", "O-"):
        return o_order(m, q, 1 if label == "O+" else -1)
    if label == "G_v":
        return sp_order(m, q) // (q ** (2 * m) - 1)
    if label == "P":
        return (q - 1) * sp_order(m, q) // (q ** (2 * m) - 1)
    raise ValueError(f"invalid label {label!r}; expected one of {LABELS}")


# -- transvections -------------------------------------------------------------


def symplectic_transvection(sp, v, lam):
    """x -> x + lam (x, v) v."""
    v = tuple(v)
    if not any(v):
        raise PreconditionError("transvection centre must be nonzero")
    ctx = sp.ctx
    vv = np.array(v, dtype=np.uint8)
    # (e_i, v) is the i-th entry of J v^T
    coef = ctx.mul_table[lam, matrix.matmul(sp.gram, vv[:, None], ctx)[:, 0]]
    mat = matrix.identity(sp.n) ^ ctx.mul_table[coef[:, None], vv[None, :]]
    return GroupElement(mat, ctx)


def orthogonal_transvection(sp, form, v):
    """The orthogonal transvection x -> x + Q(v)^-1 (x, v) v, for Q(v) != 0."""
    qv = form(v)
    if qv == 0:
        raise SingularVectorError(f"Q({v}) = 0")
    return symplectic_transvection(sp, v, sp.ctx.inv(qv))


# -- enumeration ---------------------------------------------------------------


def element_keys(mats, f):
    """One sortable key per matrix: packed uint64 when it fits, else raw bytes."""
    mats = np.ascontiguousarray(mats, dtype=np.uint8)
    nn = mats.shape[1] * mats.shape[2]
    flat = mats.reshape(len(mats), nn)
    if nn * f <= 64:
        shifts = (f * np.arange(nn, dtype=np.uint64)).astype(np.uint64)
        return np.bitwise_or.reduce(flat.astype(np.uint64) << shifts, axis=1)
    return flat.view(np.dtype((np.void, nn))).ravel()


def _in_sorted(keys, sorted_keys):
    if len(sorted_keys) == 0:
        return np.zeros(len(keys), dtype=bool)
    pos = np.searchsorted(sorted_keys, keys)
    pos[pos == len(sorted_keys)] = 0
    return sorted_keys[pos] == keys


def closure(mats, ctx, bound=DEFAULT_ENUM_BOUND, chunk=1 << 16):
    """All products of the given matrices, found by breadth-first search from the identity.

    Returns an (order, n, n) uint8 array in BFS order.
    """
    mats = np.asarray(mats, dtype=np.uint8)
    n = mats.shape[1]
    if n * n * ctx.f <= 64:
        keys = _closure_packed(mats, ctx, bound, chunk)
        return unpack_keys(keys, n, ctx.f)
    return _closure_dense(mats, ctx, bound, chunk)


def unpack_keys(keys, n, f):
    """Inverse of ``element_keys`` for packed uint64 keys."""
    shifts = (f * np.arange(n * n, dtype=np.uint64)).astype(np.uint64)
    mask = np.uint64((1 << f) - 1)
    flat = (keys[:, None] >> shifts[None, :]) & mask
    return flat.astype(np.uint8).reshape(len(keys), n, n)


def _row_tables(mats, ctx):
    """tables[g, l, a] = packed row a * (row l of mats[g]), rows packed with entry j at bits f*j."""
    q, f = ctx.q, ctx.f
    n = mats.shape[1]
    scaled = ctx.mul_table[np.arange(q, dtype=np.uint8)[None, None, :, None], mats[:, :, None, :]]
    shifts = (f * np.arange(n, dtype=np.uint64)).astype(np.uint64)
    return np.bitwise_or.reduce(scaled.astype(np.uint64) << shifts, axis=-1)


def _closure_packed(mats, ctx, bound, chunk):
    n, f = mats.shape[1], ctx.f
    tables = _row_tables(mats, ctx)
    row_bits = n * f
    mask = np.uint64((1 << f) - 1)
    row_shift = [np.uint64(i * row_bits) for i in range(n)]
    entry_shift = [np.uint64((i * n + l) * f) for i in range(n) for l in range(n)]
    frontier = element_keys(matrix.identity(n)[None], f)
    seen = frontier.copy()
    levels = [frontier]
    total = 1
    while len(frontier):
        found = []
        for start in range(0, len(frontier), chunk):
            block = frontier[start:start + chunk]
            digits = [((block >> s) & mask).astype(np.intp) for s in entry_shift]
            for t in tables:
                prod = np.zeros(len(block), dtype=np.uint64)
                for i in range(n):
                    row = t[0][digits[i * n]]
                    for l in range(1, n):
                        row = row ^ t[l][digits[i * n + l]]
                    prod |= row << row_shift[i]
                found.append(prod)
        cand = np.unique(np.concatenate(found))
        frontier = cand[~_in_sorted(cand, seen)]
        total += len(frontier)
        if total > bound:
            raise BoundExceededError(f"closure exceeds the enumeration bound {bound}")
        if len(frontier):
            levels.append(frontier)
            # both inputs are sorted, so the stable sort is a linear merge
            seen = np.sort(np.concatenate([seen, frontier]), kind="stable")
    return np.concatenate(levels)


def _closure_dense(mats, ctx, bound, chunk):
    n = mats.shape[1]
    frontier = matrix.identity(n)[None]
    seen = element_keys(frontier, ctx.f)
    levels = [frontier]
    total = 1
    while len(frontier):
        new_mats, new_keys = [], []
        for start in range(0, len(frontier), chunk):
            block = frontier[start:start + chunk]
            cand = matrix.matmul(block[None], mats[:, None], ctx).reshape(-1, n, n)
            keys = element_keys(cand, ctx.f)
            keys, idx = np.unique(keys, return_index=True)
            fresh = ~_in_sorted(keys, seen)
            new_mats.append(cand[idx[fresh]])
            new_keys.append(keys[fresh])
        keys = np.concatenate(new_keys)
        cand = np.concatenate(new_mats)
        keys, idx = np.unique(keys, return_index=True)
        frontier = cand[idx]
        total += len(frontier)
        if total > bound:
            raise BoundExceededError(f"closure exceeds the enumeration bound {bound}")
        if len(frontier):
            levels.append(frontier)
            seen = np.union1d(seen, keys)
    return np.concatenate(levels)


def enumerate_group(gens, bound=DEFAULT_ENUM_BOUND):
    """Every element of <gens> exactly once, as GroupElements."""
    return [GroupElement(a, gens.ctx) for a in enumerate_matrices(gens, bound)]


@lru_cache(maxsize=2)
def enumerate_matrices(gens, bound=DEFAULT_ENUM_BOUND):
    """Like ``enumerate_group`` but returns the stacked (order, n, n) array (read-only, cached)."""
    if gens.claimed_order > bound:
        raise BoundExceededError(
            f"|{gens.label}| = {gens.claimed_order} exceeds the enumeration bound {bound}"
        )
    elems = closure(gens.mats, gens.ctx, bound)
    if len(elems) != gens.claimed_order:
        raise GenerationShortfallError(gens.label, len(elems), gens.claimed_order)
    elems.flags.writeable = False
    return elems


def random_matrices(gens, count, seed, length=64):
    """Random words of ``length`` generators or inverses, as an (count, n, n) array."""
    if count < 1:
        raise ValueError("count must be >= 1")
    ctx = gens.ctx
    mats = gens.mats
    invs = np.stack([matrix.inverse(a, ctx) for a in mats])
    pool = np.concatenate([mats, invs])
    rng = np.random.default_rng(seed)
    n = mats.shape[1]
    acc = np.broadcast_to(matrix.identity(n), (count, n, n)).copy()
    for _ in range(length):
        acc = matrix.matmul(acc, pool[rng.integers(len(pool), size=count)], ctx)
    return acc


def random_elements(gens, count, seed, length=64):
    return [GroupElement(a, gens.ctx) for a in random_matrices(gens, count, seed, length)]


# -- generating sets -------------------------------------------------------------


def _basis_and_pair_sums(vectors):
    out = list(vectors)
    for a, b in itertools.combinations(vectors, 2):
        out.append(tuple(x ^ y for x, y in zip(a, b)))
    return out


def _transvections(sp, centres):
    return [
        symplectic_transvection(sp, w, lam)
        for w in centres
        for lam in sp.ctx.basis()
    ]


def _symplectic_basis_matrix(sp, v):
    """A symplectic matrix whose first row is v."""
    return np.array(complete_hyperbolic_basis(sp, [v]), dtype=np.uint8)


def _torus_element(sp, v):
    """Element of Sp scaling v by the primitive element and fixing the rest of a hyperbolic basis."""
    ctx = sp.ctx
    omega = ctx.generator
    d = matrix.identity(sp.n)
    d[0, 0] = omega
    d[1, 1] = ctx.inv(omega)
    base = _symplectic_basis_matrix(sp, v)
    conj = matrix.matmul(matrix.matmul(matrix.inverse(base, ctx), d, ctx), base, ctx)
    return GroupElement(conj, ctx)


def _orthogonal_candidates(sp, form):
    """Nonsingular vectors, sparse ones first: basis vectors, pair sums, then triple sums.

    Each appears with every field-basis scalar on its last nonzero coordinate
    so that for q > 2 the candidates are not confined to a subfield.
    """
    ctx = sp.ctx
    seen = set()
    for size in range(1, sp.n + 1):
        for idx in itertools.combinations(range(sp.n), size):
            for scalars in itertools.product(ctx.basis(), repeat=size):
                v = [0] * sp.n
                for i, a in zip(idx, scalars):
                    v[i] = a
                v = sp.line_rep(tuple(v))
                if v not in seen and form(v) != 0:
                    seen.add(v)
                    yield v


def _orthogonal_generators(sp, form, label, bound):
    """Reflections (orthogonal transvections) in a prefix of the candidate list.

    The prefix is grown until the closure reaches the claimed order.  In the
    one case where reflections do not generate (O+_4(2)) the closure stalls at
    a proper subgroup; the missing coset is then found by searching Sp for an
    element preserving the form outside the closure.
    """
    order = claimed_order(label, sp.m, sp.q)
    cands = [orthogonal_transvection(sp, form, v) for v in itertools.islice(_orthogonal_candidates(sp, form), 8 * sp.n)]
    if order > bound:
        return cands, None
    size = min(len(cands), 2 * sp.n)
    while True:
        gens = cands[:size]
        achieved = len(closure(np.stack([g.mat for g in gens]), sp.ctx, bound))
        if achieved == order:
            return gens, achieved
        if size == len(cands):
            break
        size = min(len(cands), 2 * size)
    log.info("reflections generate %d of %d elements of %s; searching Sp for a repair", achieved, order, label)
    return gens + _repair_orthogonal(sp, form, gens, order, bound), order


def _repair_orthogonal(sp, form, gens, order, bound):
    sp_gens = build_generators("Sp", sp.m, sp.ctx, bound=bound)
    if sp_gens.claimed_order > bound:
        raise GenerationShortfallError(f"O({form})", -1, order)
    inside = set(element_keys(closure(np.stack([g.mat for g in gens]), sp.ctx, bound), sp.ctx.f).tolist())
    extra = []
    for a in enumerate_matrices(sp_gens, bound):
        g = GroupElement(a, sp.ctx)
        if element_keys(a[None], sp.ctx.f)[0] in inside or not g.preserves(form):
            continue
        extra.append(g)
        all_mats = np.stack([h.mat for h in gens + extra])
        group = closure(all_mats, sp.ctx, bound)
        if len(group) == order:
            return extra
        inside = set(element_keys(group, sp.ctx.f).tolist())
    raise GenerationShortfallError("O", len(inside), order)


def _filter_stabilizer(sp, label, v, bound):
    """Fallback: generators of the stabiliser taken from a full enumeration of Sp."""
    sp_gens = build_generators("Sp", sp.m, sp.ctx, bound=bound)
    elems = enumerate_matrices(sp_gens, bound)
    vv = np.array(v, dtype=np.uint8)
    images = matrix.matmul(vv[None, None, :], elems, sp.ctx)[:, 0, :]
    if label == "G_v":
        keep = np.all(images == vv, axis=1)
    else:
        line = sp.line_of[sp.pack_rows(images)]
        keep = line == sp.line_of[sp.pack(v)]
    return [GroupElement(a, sp.ctx) for a in elems[keep]]


@lru_cache(maxsize=None)
def build_generators(label, m, ctx, v=None, form=None, bound=DEFAULT_ENUM_BOUND, verify=True):
    """Generators for one of Sp, O+, O-, G_v (stabiliser of v) or P (stabiliser of <v>).

    ``v`` defaults to e_1; ``form`` defaults to the standard Q+ or Q-.  With
    ``verify`` the closure is enumerated whenever the claimed order is within
    ``bound`` and a shortfall is either repaired or raised.
    """
    if label not in LABELS:
        raise ValueError(f"invalid label {label!r}; expected one of {LABELS}")
    sp = Space(m, ctx)
    order = claimed_order(label, m, ctx.q)
    checked = verify and order <= bound
    verified = None
    if label == "Sp":
        gens = _transvections(sp, _basis_and_pair_sums(sp.basis()))
    elif label in ("O+", "O-"):
        if form is None:
            form = standard_forms(m, ctx)[0 if label == "O+" else 1]
        gens, verified = _orthogonal_generators(sp, form, label, bound if verify else 0)
    else:
        v = tuple(v) if v is not None else sp.basis()[0]
        hb = complete_hyperbolic_basis(sp, [v])
        perp = [hb[0]] + hb[2:]
        gens = _transvections(sp, _basis_and_pair_sums(perp))
        if label == "P":
            gens.append(_torus_element(sp, v))
    result = GeneratorSet(tuple(gens), label, order, m, ctx)
    if checked and verified is None:
        try:
            verified = len(enumerate_matrices(result, bound))
        except GenerationShortfallError as exc:
            if label == "Sp":
                raise
            log.info("%s transvections reach %d of %d; filtering Sp", label, exc.achieved, order)
            result = GeneratorSet(tuple(_filter_stabilizer(sp, label, v, bound)), label, order, m, ctx)
            verified = len(enumerate_matrices(result, bound))
    return replace(result, verified_order=verified)
