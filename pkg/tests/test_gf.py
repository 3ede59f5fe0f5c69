import itertools

from hypothesis import given, strategies as st
import numpy as np
import pytest

from sympchar.gf import (
    FieldContext,
    MAX_DEGREE,
    artin_schreier_image,
    field,
    field_axioms,
    is_irreducible,
    smallest_irreducible,
)

DEGREES = range(1, MAX_DEGREE + 1)


# -- independent oracle: schoolbook polynomial arithmetic, no tables -----------


def poly_mul(a, b):
    r = 0
    for i in range(b.bit_length()):
        if b >> i & 1:
            r ^= a << i
    return r


def poly_rem(a, m):
    while a and a.bit_length() >= m.bit_length():
        a ^= m << (a.bit_length() - m.bit_length())
    return a


def reducible_of_degree(f):
    """Every reducible polynomial of degree f, as products of lower-degree ones."""
    out = set()
    for d in range(1, f // 2 + 1):
        for a in range(1 << d, 1 << (d + 1)):
            for b in range(1 << (f - d), 1 << (f - d + 1)):
                out.add(poly_mul(a, b))
    return out


@pytest.mark.parametrize("f", DEGREES)
def test_modulus_is_smallest_irreducible(f):
    red = reducible_of_degree(f)
    irreducible = [p for p in range(1 << f, 1 << (f + 1)) if p not in red]
    assert field(f).modulus == irreducible[0] == smallest_irreducible(f)
    assert all(is_irreducible(p) == (p not in red) for p in range(1 << f, 1 << (f + 1)))


def test_known_moduli():
    assert field(1).modulus == 0b10
    assert field(2).modulus == 0b111
    assert field(3).modulus == 0b1011
    assert field(8).modulus == 0x11B


@pytest.mark.parametrize("f", DEGREES)
def test_multiplication_matches_polynomial_oracle(f):
    ctx = field(f)
    mod = ctx.modulus
    want = np.array([[poly_rem(poly_mul(a, b), mod) for b in range(ctx.q)] for a in range(ctx.q)])
    assert np.array_equal(ctx.mul_table, want)
    for a, b in itertools.product(range(ctx.q), repeat=2):
        if (a * 7 + b) % 97 == 0:
            assert ctx.mul(a, b) == want[a, b]


def test_gf4_examples():
    ctx = field(2)
    w = 0b10
    assert ctx.mul(w, w) == w ^ 1
    assert ctx.inv(w) == w ^ 1
    assert ctx.trace(w) == 1
    assert ctx.trace(1) == 0
    assert ctx.trace(0) == 0


def test_gf8_example():
    ctx = field(3)
    t = 0b10
    assert ctx.mul(t, ctx.mul(t, t)) == t ^ 1


def test_zero_has_no_inverse():
    with pytest.raises(ZeroDivisionError):
        field(4).inv(0)


@pytest.mark.parametrize("f", [0, 9])
def test_degree_out_of_range(f):
    with pytest.raises(ValueError):
        FieldContext(f)


@pytest.mark.parametrize("f", DEGREES)
def test_field_axioms_exhaustive(f):
    got = field_axioms(field(f))
    assert all(got.values()), {k: v for k, v in got.items() if not v}


@pytest.mark.parametrize("f", DEGREES)
def test_inverse_and_generator(f):
    ctx = field(f)
    for a in range(1, ctx.q):
        assert ctx.mul(a, ctx.inv(a)) == 1
    powers = {ctx.pow(ctx.generator, k) for k in range(ctx.q - 1)}
    assert powers == set(range(1, ctx.q))


@pytest.mark.parametrize("f", DEGREES)
def test_trace_by_definition(f):
    ctx = field(f)
    for a in range(ctx.q):
        t, x = 0, a
        for _ in range(f):
            t ^= x
            x = poly_rem(poly_mul(x, x), ctx.modulus)
        assert ctx.trace(a) == t == ctx.trace_table[a]
    assert sum(ctx.trace(a) == 0 for a in range(ctx.q)) == ctx.q // 2


@pytest.mark.parametrize("f, image", [(1, {0}), (2, {0, 1})])
def test_artin_schreier_small(f, image):
    assert artin_schreier_image(field(f)) == image


@pytest.mark.parametrize("f", DEGREES)
def test_artin_schreier_is_trace_kernel(f):
    ctx = field(f)
    img = artin_schreier_image(ctx)
    assert len(img) == ctx.q // 2
    assert img == {a for a in range(ctx.q) if ctx.trace(a) == 0}


def test_artin_schreier_gf8_size():
    assert len(artin_schreier_image(field(3))) == 4


@pytest.mark.parametrize("f", DEGREES)
def test_sqrt_inverts_frobenius(f):
    ctx = field(f)
    for a in range(ctx.q):
        assert ctx.frobenius(ctx.sqrt(a)) == a


def test_smallest_trace_one():
    assert field(1).smallest_trace_one() == 1
    assert field(2).smallest_trace_one() == 2
    for f in DEGREES:
        ctx = field(f)
        d = ctx.smallest_trace_one()
        assert ctx.trace(d) == 1 and all(ctx.trace(a) == 0 for a in range(d))


elements = st.integers(1, MAX_DEGREE).flatmap(
    lambda f: st.tuples(st.just(f), *[st.integers(0, (1 << f) - 1)] * 3)
)


@given(elements)
def test_axioms_property(t):
    f, a, b, c = t
    ctx = field(f)
    assert ctx.mul(ctx.mul(a, b), c) == ctx.mul(a, ctx.mul(b, c))
    assert ctx.mul(a, b ^ c) == ctx.mul(a, b) ^ ctx.mul(a, c)
    assert ctx.trace(a ^ b) == ctx.trace(a) ^ ctx.trace(b)
    assert ctx.frobenius(ctx.mul(a, b)) == ctx.mul(ctx.frobenius(a), ctx.frobenius(b))
    if b:
        assert ctx.mul(ctx.div(a, b), b) == a


@given(st.integers(1, MAX_DEGREE), st.integers(0, 255), st.integers(0, 600))
def test_pow_matches_repeated_multiplication(f, a, k):
    ctx = field(f)
    a %= ctx.q
    r = 1
    for _ in range(k % 40):
        r = ctx.mul(r, a)
    assert ctx.pow(a, k % 40) == r
