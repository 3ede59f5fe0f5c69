"""The perpendicularity graph on the 1-spaces of V and its spectrum.

Vertices are lines, adjacent when distinct and orthogonal.  For m >= 2 this is
strongly regular; the two non-principal eigenvalue multiplicities are the
degrees of the nontrivial constituents of the rank 3 permutation character.
"""

from dataclasses import dataclass
import math
import time

import numpy as np

from .errors import PreconditionError
from .report import Record
from .space import Space

DEFAULT_LINE_BOUND = 20_000


@dataclass(frozen=True)
class SrgParams:
    v: int
    k: int
    lam: int
    mu: int

    def feasible(self):
        return self.k * (self.k - self.lam - 1) == (self.v - self.k - 1) * self.mu

    def astuple(self):
        return (self.v, self.k, self.lam, self.mu)


@dataclass(frozen=True)
class SpectrumMultiplicities:
    f_minus: int
    f_plus: int
    r: int
    s: int


class NonIntegralMultiplicityError(ArithmeticError):
    pass


def predicted_params(m, q):
    """The parameters predicted in closed form."""
    a = (q ** (2 * m - 2) - 1) // (q - 1)
    return SrgParams(
        (q ** (2 * m) - 1) // (q - 1),
        (q ** (2 * m - 1) - q) // (q - 1),
        a - 2,
        a,
    )


def closed_form_degrees(m, q):
    base = (q ** (2 * m) - q) // (q - 1)
    return (base - q**m) // 2, (base + q**m) // 2


def build_perp_graph(m, ctx, bound=DEFAULT_LINE_BOUND):
    """Boolean adjacency matrix on the canonical line representatives."""
    sp = Space(m, ctx)
    reps = sp.line_reps
    if len(reps) > bound:
        raise PreconditionError(f"{len(reps)} lines exceeds the bound {bound}")
    adj = np.empty((len(reps), len(reps)), dtype=bool)
    for i, key in enumerate(reps):
        adj[i] = sp.bilinear_all(sp.unpack(int(key)))[reps] == 0
    np.fill_diagonal(adj, False)
    return adj


def measure_srg(adj):
    """(v, k, lam, mu) by direct counting, or None if the graph is not strongly regular."""
    a = adj.astype(np.int64)
    nv = len(a)
    deg = a.sum(axis=1)
    common = a @ a
    off = ~np.eye(nv, dtype=bool)
    lam = np.unique(common[adj])
    mu = np.unique(common[~adj & off])
    if len(np.unique(deg)) != 1 or len(lam) > 1 or len(mu) > 1:
        return None
    return SrgParams(nv, int(deg[0]), int(lam[0]) if len(lam) else 0, int(mu[0]) if len(mu) else 0)


def verify_srg(m, ctx):
    if m < 2:
        raise PreconditionError("for m = 1 the perp graph is edgeless, not a strongly regular graph")
    params = measure_srg(build_perp_graph(m, ctx))
    if params is None:
        raise AssertionError("perp graph is not strongly regular")
    return params


def multiplicities(p):
    """Eigenvalues and multiplicities of an SRG in exact integer arithmetic."""
    disc = (p.lam - p.mu) ** 2 + 4 * (p.k - p.mu)
    root = math.isqrt(disc)
    if root * root != disc:
        raise NonIntegralMultiplicityError(f"discriminant {disc} is not a perfect square")
    num = 2 * p.k + (p.v - 1) * (p.lam - p.mu)
    if num % root:
        raise NonIntegralMultiplicityError(f"{num} is not divisible by {root}")
    twice_r_mult = (p.v - 1) - num // root
    twice_s_mult = (p.v - 1) + num // root
    if twice_r_mult % 2 or twice_s_mult % 2:
        raise NonIntegralMultiplicityError("odd multiplicity numerator")
    if (p.lam - p.mu + root) % 2:
        raise NonIntegralMultiplicityError("eigenvalues are not integers")
    r = (p.lam - p.mu + root) // 2
    s = (p.lam - p.mu - root) // 2
    # f_plus goes with the positive eigenvalue r, f_minus with s
    spec = SpectrumMultiplicities(f_minus=twice_s_mult // 2, f_plus=twice_r_mult // 2, r=r, s=s)
    assert spec.f_minus + spec.f_plus == p.v - 1
    assert p.k + spec.f_plus * r + spec.f_minus * s == 0
    return spec


def chi_degrees(m, ctx):
    """(chi-(1), chi+(1)) from the measured parameters, smaller first."""
    spec = multiplicities(verify_srg(m, ctx))
    lo, hi = sorted((spec.f_minus, spec.f_plus))
    if (lo, hi) != closed_form_degrees(m, ctx.q):
        raise AssertionError(f"multiplicities {(lo, hi)} disagree with the closed form")
    return lo, hi


def verify_rank3(m, ctx):
    """Number of Sp-orbits on pairs of lines (the rank of the action on lines)."""
    from .grp import build_generators
    from .permchar import char_inner_product, make_gset

    lines = make_gset("lines", m, ctx)
    return char_inner_product(lines, lines, build_generators("Sp", m, ctx, verify=False))


def srg_record(m, ctx):
    q = ctx.q
    t0 = time.perf_counter()
    params = verify_srg(m, ctx)
    spec = multiplicities(params)
    degrees = tuple(sorted((spec.f_minus, spec.f_plus)))
    got = {
        "params": list(params.astuple()),
        "feasible": params.feasible(),
        "chi_degrees": list(degrees),
        "eigenvalues": [spec.r, spec.s],
    }
    want = {
        "params": list(predicted_params(m, q).astuple()),
        "feasible": True,
        "chi_degrees": list(closed_form_degrees(m, q)),
        "eigenvalues": [spec.r, spec.s],
    }
    ms = int((time.perf_counter() - t0) * 1000)
    return Record(
        "srg", (m, q), got, want,
        "perp graph is SRG((q^2m-1)/(q-1), (q^2m-1 - q)/(q-1), (q^2m-2 - 1)/(q-1) - 2, (q^2m-2 - 1)/(q-1)); multiplicities (((q^2m-q)/(q-1)) -+ q^m)/2",
        got == want, ms,
    )


def rank3_record(m, ctx):
    q = ctx.q
    t0 = time.perf_counter()
    got = verify_rank3(m, ctx)
    ms = int((time.perf_counter() - t0) * 1000)
    if m == 1:
        return Record(
            "rank3", (m, q), got, 2, "rank of Sp on lines (m = 1: 2-transitive)",
            got == 2, ms, "m = 1 is the degenerate 2-transitive case, not an SRG case",
        )
    return Record("rank3", (m, q), got, 3, "1_P^G has rank 3", got == 3, ms)
