from hypothesis import given, strategies as st
import numpy as np
import pytest

from sympchar import matrix
from sympchar.errors import (
    BoundExceededError,
    GenerationShortfallError,
    PreconditionError,
    SingularVectorError,
)
from sympchar.gf import field
from sympchar.grp import (
    LABELS,
    GeneratorSet,
    GroupElement,
    build_generators,
    claimed_order,
    closure,
    element_keys,
    enumerate_group,
    enumerate_matrices,
    o_order,
    orthogonal_transvection,
    random_elements,
    sp_order,
    symplectic_transvection,
    unpack_keys,
)
from sympchar.space import Space, standard_forms

SMALL = [(1, 1), (2, 1), (2, 2), (3, 1)]


def bfs_closure(gens):
    """Plain breadth-first closure over hashable GroupElements; an oracle for ``closure``."""
    ident = GroupElement.identity(gens[0].n, gens[0].ctx)
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = a * g
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return seen


# -- order formulas ---------------------------------------------------------------


def test_order_formulas():
    assert sp_order(1, 2) == 6
    assert sp_order(2, 2) == 720
    assert sp_order(2, 4) == 979200
    assert sp_order(3, 2) == 2**9 * 3 * 15 * 63 == 1451520
    assert o_order(2, 2, 1) == 72 and o_order(2, 2, -1) == 120
    with pytest.raises(ValueError):
        claimed_order("GL", 2, 2)


@pytest.mark.parametrize("m, q", [(1, 2), (2, 2), (2, 4), (3, 2), (2, 8), (4, 2)])
def test_index_identities(m, q):
    s = sp_order(m, q)
    assert s // claimed_order("O+", m, q) == q**m * (q**m + 1) // 2
    assert s % claimed_order("O+", m, q) == 0
    assert s // claimed_order("O-", m, q) == q**m * (q**m - 1) // 2
    assert claimed_order("P", m, q) == (q - 1) * claimed_order("G_v", m, q)
    assert s == claimed_order("G_v", m, q) * (q ** (2 * m) - 1)


# -- transvections ---------------------------------------------------------------------


def test_transvection_lambda_zero_is_identity():
    sp = Space(2, field(2))
    assert symplectic_transvection(sp, (1, 2, 0, 3), 0).is_identity()
    assert not symplectic_transvection(sp, (1, 2, 0, 3), 1).is_identity()


def test_transvection_m1_q2():
    sp = Space(1, field(1))
    t = symplectic_transvection(sp, (1, 0), 1)
    assert t.mat.tolist() == [[1, 0], [1, 1]]
    assert t.apply((0, 1)) == (1, 1)
    assert t.apply((1, 0)) == (1, 0)


def test_transvection_zero_centre():
    with pytest.raises(PreconditionError):
        symplectic_transvection(Space(1, field(1)), (0, 0), 1)


def test_transvection_preserves_form_random():
    sp = Space(2, field(2))
    rng = np.random.default_rng(7)
    for _ in range(1000):
        v = sp.unpack(int(rng.integers(1, sp.size)))
        lam = int(rng.integers(0, sp.q))
        u, w = (sp.unpack(int(x)) for x in rng.integers(0, sp.size, 2))
        t = symplectic_transvection(sp, v, lam)
        assert sp.bilinear(t.apply(u), t.apply(w)) == sp.bilinear(u, w)
        # definition: x -> x + lam (x, v) v
        assert t.apply(u) == sp.add(u, sp.scale(sp.ctx.mul(lam, sp.bilinear(u, v)), v))


@given(st.sampled_from([1, 2, 3]), st.integers(1, 3), st.data())
def test_transvection_is_isometry_property(f, m, data):
    sp = Space(m, field(f))
    v = sp.unpack(data.draw(st.integers(1, sp.size - 1)))
    lam = data.draw(st.integers(0, sp.q - 1))
    t = symplectic_transvection(sp, v, lam)
    assert t.is_isometry(sp)
    assert t.fixes_vector(v)


def test_orthogonal_transvection_m1_q2():
    sp = Space(1, field(1))
    _, minus = standard_forms(1, sp.ctx)
    r = orthogonal_transvection(sp, minus, (1, 0))
    assert all(minus(r.apply(x)) == minus(x) for x in sp.vectors())
    assert (r * r).is_identity()


def test_orthogonal_transvection_all_nonsingular_m2_q2():
    sp = Space(2, field(1))
    plus, _ = standard_forms(2, sp.ctx)
    count = 0
    for v in sp.vectors():
        if plus(v) == 0:
            continue
        r = orthogonal_transvection(sp, plus, v)
        assert all(plus(r.apply(x)) == plus(x) for x in sp.vectors())
        assert (r * r).is_identity() and r.is_isometry(sp) and r.preserves(plus)
        count += 1
    assert count == 6


@pytest.mark.parametrize("f", [2, 3])
def test_orthogonal_transvection_involution(f):
    sp = Space(2, field(f))
    for form in standard_forms(2, sp.ctx):
        for v in sp.vectors()[1::37]:
            if form(v):
                r = orthogonal_transvection(sp, form, v)
                assert (r * r).is_identity() and r.preserves(form)


def test_orthogonal_transvection_singular():
    sp = Space(2, field(1))
    plus, _ = standard_forms(2, sp.ctx)
    with pytest.raises(SingularVectorError):
        orthogonal_transvection(sp, plus, (1, 0, 0, 0))


# -- group elements --------------------------------------------------------------------


def test_group_element_basics():
    ctx = field(2)
    sp = Space(2, ctx)
    g = symplectic_transvection(sp, (1, 2, 3, 0), 3)
    h = symplectic_transvection(sp, (0, 1, 1, 1), 2)
    assert (g * g.inverse()).is_identity()
    assert (g * h).inverse() == h.inverse() * g.inverse()
    assert hash(g) == hash(GroupElement(g.mat.copy(), ctx))
    assert g.key == g.mat.tobytes()
    with pytest.raises(ValueError):
        g.mat[0, 0] = 1
    x = (1, 2, 3, 1)
    assert (g * h).apply(x) == h.apply(g.apply(x))


def test_element_keys_roundtrip():
    ctx = field(2)
    G = build_generators("Sp", 2, ctx, verify=False)
    keys = element_keys(G.mats, ctx.f)
    assert np.array_equal(unpack_keys(keys, 4, ctx.f), G.mats)
    assert len(set(keys.tolist())) == len(G)


def test_closure_matches_bfs_oracle():
    for m, f in [(1, 1), (1, 2), (2, 1)]:
        G = build_generators("Sp", m, field(f), verify=False)
        ref = bfs_closure(list(G.gens))
        got = closure(G.mats, G.ctx)
        assert len(got) == len(ref) == sp_order(m, 2**f)
        assert {GroupElement(a, G.ctx) for a in got} == ref


# -- generator sets ---------------------------------------------------------------------


@pytest.mark.parametrize("label, m, f, order", [
    ("Sp", 2, 1, 720), ("O+", 2, 1, 72), ("O-", 2, 1, 120), ("Sp", 2, 2, 979200),
])
def test_build_generators_examples(label, m, f, order):
    G = build_generators(label, m, field(f))
    assert G.claimed_order == G.verified_order == order


@pytest.mark.parametrize("m, f", SMALL + [(2, 3)])
@pytest.mark.parametrize("label", LABELS)
def test_generated_orders(label, m, f):
    ctx = field(f)
    G = build_generators(label, m, ctx)
    if G.claimed_order > 20_000_000:
        pytest.skip("not enumerable")
    assert G.verified_order == G.claimed_order == claimed_order(label, m, ctx.q)


@pytest.mark.parametrize("m, f", SMALL + [(2, 3)])
def test_generator_predicates(m, f):
    ctx = field(f)
    sp = Space(m, ctx)
    plus, minus = standard_forms(m, ctx)
    v = sp.basis()[0]
    line = set(sp.span_indices([v]).tolist())
    for label in LABELS:
        for g in build_generators(label, m, ctx).gens:
            assert g.is_isometry(sp)
            if label == "O+":
                assert g.preserves(plus)
            elif label == "O-":
                assert g.preserves(minus)
            elif label == "G_v":
                assert g.fixes_vector(v)
            elif label == "P":
                assert sp.pack(g.apply(v)) in line


def test_o_plus_4_2_repair():
    ctx = field(1)
    sp = Space(2, ctx)
    plus, _ = standard_forms(2, ctx)
    reflections = [orthogonal_transvection(sp, plus, v) for v in sp.vectors() if plus(v)]
    assert len(closure(np.stack([r.mat for r in reflections]), ctx)) == 36
    G = build_generators("O+", 2, ctx)
    assert G.verified_order == 72
    assert any(not (g * g).is_identity() or g not in reflections for g in G.gens)


def test_o_minus_4_2_needs_no_repair():
    ctx = field(1)
    sp = Space(2, ctx)
    _, minus = standard_forms(2, ctx)
    reflections = [orthogonal_transvection(sp, minus, v) for v in sp.vectors() if minus(v)]
    assert len(closure(np.stack([r.mat for r in reflections]), ctx)) == 120


def test_torus_element_scales_v():
    ctx = field(2)
    P = build_generators("P", 2, ctx)
    v = (1, 0, 0, 0)
    images = {g.apply(v) for g in P.gens}
    assert (ctx.generator, 0, 0, 0) in images


def test_stabilizer_of_other_vector():
    ctx = field(1)
    v = (1, 1, 0, 1)
    G = build_generators("G_v", 2, ctx, v=v)
    assert G.verified_order == 48
    assert all(g.fixes_vector(v) for g in G.gens)


def test_invalid_label():
    with pytest.raises(ValueError):
        build_generators("SL", 2, field(1))


# -- enumeration -----------------------------------------------------------------------


def test_enumerate_trivial_group():
    ctx = field(1)
    G = GeneratorSet((GroupElement.identity(2, ctx),), "Sp", 1, 1, ctx)
    assert enumerate_group(G) == [GroupElement.identity(2, ctx)]


def test_enumerate_sp2_2():
    elems = enumerate_group(build_generators("Sp", 1, field(1)))
    assert len(elems) == len(set(elems)) == 6
    assert all(g.is_isometry() for g in elems)


@pytest.mark.slow
def test_enumerate_sp6_2():
    mats = enumerate_matrices(build_generators("Sp", 3, field(1), verify=False))
    assert len(mats) == 1451520
    assert len(np.unique(element_keys(mats, 1))) == 1451520


def test_enumerate_shortfall():
    ctx = field(1)
    sp = Space(2, ctx)
    t = symplectic_transvection(sp, (1, 0, 0, 0), 1)
    with pytest.raises(GenerationShortfallError) as info:
        enumerate_matrices(GeneratorSet((t,), "Sp", 720, 2, ctx))
    assert info.value.achieved == 2 and info.value.claimed == 720


def test_enumerate_bound():
    with pytest.raises(BoundExceededError):
        enumerate_matrices(build_generators("Sp", 2, field(1)), bound=100)


# -- random elements -------------------------------------------------------------------


def test_random_elements_deterministic():
    G = build_generators("Sp", 2, field(3), verify=False)
    a = random_elements(G, 50, seed=42)
    b = random_elements(G, 50, seed=42)
    c = random_elements(G, 50, seed=43)
    assert a == b
    assert a != c
    assert all(g.is_isometry() for g in a)
    assert len(set(a)) == 50


def test_random_identity_generators():
    ctx = field(1)
    G = GeneratorSet((GroupElement.identity(2, ctx),), "Sp", 1, 1, ctx)
    assert random_elements(G, 1, seed=0) == [GroupElement.identity(2, ctx)]
    with pytest.raises(ValueError):
        random_elements(G, 0, seed=0)


def test_matrix_inverse_singular():
    with pytest.raises(np.linalg.LinAlgError):
        matrix.inverse(np.array([[1, 1], [1, 1]], dtype=np.uint8), field(1))
