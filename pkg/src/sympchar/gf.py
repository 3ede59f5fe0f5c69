"""Arithmetic in GF(2^f), 1 <= f <= 8.

Elements are plain ints holding the polynomial coefficient bits (bit i is the
coefficient of x^i).  Addition is xor; everything else goes through tables
built once per context.
"""

from functools import lru_cache

import numpy as np

MAX_DEGREE = 8


def _poly_mod(a, mod):
    dm = mod.bit_length()
    while a.bit_length() >= dm:
        a ^= mod << (a.bit_length() - dm)
    return a


def _clmul(a, b):
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def is_irreducible(poly):
    """Trial division by every polynomial of degree 1..deg/2."""
    deg = poly.bit_length() - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for p in range(1 << d, 1 << (d + 1)):
            if _poly_mod(poly, p) == 0:
                return False
    return True


def smallest_irreducible(f):
    for poly in range(1 << f, 1 << (f + 1)):
        if is_irreducible(poly):
            return poly
    raise AssertionError("unreachable: irreducibles exist in every degree")


class FieldContext:
    """GF(2^f) with the lexicographically smallest irreducible modulus.

    Besides the scalar methods, exposes numpy tables (``mul_table``,
    ``inv_table``, ``sq_table``, ``sqrt_table``, ``trace_table``) for the
    vectorised code in the other modules.
    """

    def __init__(self, f, modulus=None):
        if not 1 <= f <= MAX_DEGREE:
            raise ValueError(f"extension degree must be in 1..{MAX_DEGREE}, got {f}")
        if modulus is None:
            modulus = smallest_irreducible(f)
        if modulus.bit_length() != f + 1 or not is_irreducible(modulus):
            raise ValueError(f"modulus {modulus:#x} is not an irreducible of degree {f}")
        self.f = f
        self.q = 1 << f
        self.modulus = modulus

        q = self.q
        # The smallest modulus is not always primitive (f = 8 gives 0x11b, where
        # x has order 51), so search for a generator of the multiplicative group.
        self.generator, self.exp, self.log = self._log_tables()
        mul = np.zeros((q, q), dtype=np.uint8)
        for a in range(1, q):
            for b in range(1, q):
                mul[a, b] = self.exp[(self.log[a] + self.log[b]) % (q - 1)]
        self.mul_table = mul
        self.inv_table = np.array([0] + [self.inv(a) for a in range(1, q)], dtype=np.uint8)
        self.sq_table = np.array([mul[a, a] for a in range(q)], dtype=np.uint8)
        sqrt = np.zeros(q, dtype=np.uint8)
        sqrt[self.sq_table] = np.arange(q, dtype=np.uint8)
        self.sqrt_table = sqrt
        self.trace_table = np.array([self.trace(a) for a in range(q)], dtype=np.uint8)

    def _log_tables(self):
        q = self.q
        for g in range(1, q) if q > 2 else [1]:
            exp = [1]
            x = g
            while x != 1:
                exp.append(x)
                x = _poly_mod(_clmul(x, g), self.modulus)
            if len(exp) == q - 1:
                log = [0] * q
                for i, e in enumerate(exp):
                    log[e] = i
                return g, exp, log
        raise AssertionError("multiplicative group of a finite field is cyclic")

    def __repr__(self):
        return f"FieldContext(f={self.f}, modulus={self.modulus:#x})"

    def __eq__(self, other):
        return isinstance(other, FieldContext) and (self.f, self.modulus) == (other.f, other.modulus)

    def __hash__(self):
        return hash((self.f, self.modulus))

    def __reduce__(self):
        return (FieldContext, (self.f, self.modulus))

    @property
    def elements(self):
        return range(self.q)

    def check(self, a):
        if not 0 <= a < self.q:
            raise ValueError(f"{a} is not an element of GF({self.q})")
        return a

    @staticmethod
    def add(a, b):
        return a ^ b

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return self.exp[(self.log[a] + self.log[b]) % (self.q - 1)]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in GF(2^f)")
        return self.exp[-self.log[a] % (self.q - 1)]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, k):
        if a == 0:
            return 1 if k == 0 else 0
        return self.exp[(self.log[a] * k) % (self.q - 1)]

    def frobenius(self, a):
        return self.mul(a, a)

    def sqrt(self, a):
        return int(self.sqrt_table[a])

    def trace(self, a):
        """Absolute trace a + a^2 + ... + a^(2^(f-1)), returned as 0 or 1."""
        t, x = 0, a
        for _ in range(self.f):
            t ^= x
            x = self.mul(x, x)
        assert t in (0, 1)
        return t

    def smallest_trace_one(self):
        return next(a for a in range(self.q) if self.trace(a) == 1)

    def basis(self):
        """Additive basis 1, x, ..., x^(f-1)."""
        return [1 << i for i in range(self.f)]


@lru_cache(maxsize=None)
def field(f):
    """Shared context for GF(2^f)."""
    return FieldContext(f)


def artin_schreier_image(ctx):
    return frozenset(a ^ ctx.mul(a, a) for a in ctx.elements)


def field_axioms(ctx):
    """Exhaustive check of the field axioms and Frobenius/trace facts on the tables."""
    q = ctx.q
    mul = ctx.mul_table
    a = np.arange(q, dtype=np.uint8)
    add = a[:, None] ^ a[None, :]
    frob = ctx.sq_table
    iterated = a.copy()
    for _ in range(ctx.f):
        iterated = frob[iterated]
    image = artin_schreier_image(ctx)
    return {
        "commutative": bool(np.array_equal(mul, mul.T)),
        # (ab)c against a(bc), indexed [a, b, c]
        "associative": bool(np.array_equal(mul[mul[:, :, None], a[None, None, :]],
                                           mul[a[:, None, None], mul[None, :, :]])),
        "distributive": bool(np.array_equal(mul[a[:, None, None], add[None, :, :]],
                                            mul[:, :, None] ^ mul[:, None, :])),
        "identity": bool(np.array_equal(mul[1], a)),
        "inverses": bool(np.all(mul[a[1:], ctx.inv_table[1:]] == 1)),
        "frobenius_additive": bool(np.array_equal(frob[add], frob[:, None] ^ frob[None, :])),
        "frobenius_multiplicative": bool(np.array_equal(frob[mul], mul[frob[:, None], frob[None, :]])),
        "frobenius_bijective": len(set(frob.tolist())) == q,
        "frobenius_order_divides_f": bool(np.array_equal(iterated, a)),
        "artin_schreier_size": len(image) == q // 2,
        "artin_schreier_is_trace_kernel": image == {x for x in range(q) if ctx.trace(x) == 0},
    }
