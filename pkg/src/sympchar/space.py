"""The symplectic space V = GF(q)^(2m) and quadratic forms polarising to it.

Vectors are tuples of field elements.  Internally a vector is also packed into
an int with coordinate i in bits [f*i, f*(i+1)); that int is the vector's
position in the canonical enumeration, so the zero vector is 0 and e_1 is 1.
The alternating form pairs coordinates (0,1), (2,3), ... hyperbolically.
"""

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from . import matrix
from .errors import (
    BoundExceededError,
    DegenerateFormError,
    NotExtendableError,
    PreconditionError,
)
from .gf import field

DEFAULT_FORM_BOUND = 1 << 24


class Space:
    def __init__(self, m, ctx):
        if m < 1:
            raise ValueError("m must be >= 1")
        self.m = m
        self.n = 2 * m
        self.ctx = ctx
        self.q = ctx.q
        self.size = self.q ** self.n

    def __repr__(self):
        return f"Space(m={self.m}, q={self.q})"

    def __eq__(self, other):
        return isinstance(other, Space) and (self.m, self.ctx) == (other.m, other.ctx)

    def __hash__(self):
        return hash((self.m, self.ctx))

    # -- encoding ----------------------------------------------------------

    def pack(self, v):
        if len(v) != self.n:
            raise ValueError(f"expected {self.n} coordinates, got {len(v)}")
        f = self.ctx.f
        x = 0
        for i, c in enumerate(v):
            x |= self.ctx.check(c) << (f * i)
        return x

    def unpack(self, x):
        f, mask = self.ctx.f, self.q - 1
        return tuple((x >> (f * i)) & mask for i in range(self.n))

    @cached_property
    def digits(self):
        """(q^n, n) array of the coordinates of every vector, in canonical order."""
        x = np.arange(self.size, dtype=np.int64)
        f, mask = self.ctx.f, self.q - 1
        return np.stack([(x >> (f * i)) & mask for i in range(self.n)], axis=1).astype(np.uint8)

    def pack_rows(self, rows):
        """Pack the last axis of a (..., n) coordinate array into ints."""
        rows = np.asarray(rows, dtype=np.int64)
        shifts = self.ctx.f * np.arange(self.n, dtype=np.int64)
        return np.bitwise_or.reduce(rows << shifts, axis=-1)

    # -- linear structure --------------------------------------------------

    def vectors(self):
        return [self.unpack(x) for x in range(self.size)]

    def basis(self):
        return [tuple(int(i == j) for j in range(self.n)) for i in range(self.n)]

    def add(self, u, v):
        return tuple(a ^ b for a, b in zip(u, v))

    def scale(self, a, v):
        return tuple(self.ctx.mul(a, c) for c in v)

    def zero(self):
        return (0,) * self.n

    @cached_property
    def gram(self):
        j = np.zeros((self.n, self.n), dtype=np.uint8)
        for i in range(self.m):
            j[2 * i, 2 * i + 1] = j[2 * i + 1, 2 * i] = 1
        return j

    def bilinear(self, u, v):
        mul = self.ctx.mul
        r = 0
        for i in range(0, self.n, 2):
            r ^= mul(u[i], v[i + 1]) ^ mul(u[i + 1], v[i])
        return r

    def bilinear_all(self, y):
        """(x, y) for every vector x, as a uint8 array in canonical order."""
        d, mul = self.digits, self.ctx.mul_table
        out = np.zeros(self.size, dtype=np.uint8)
        for i in range(0, self.n, 2):
            out ^= mul[d[:, i], y[i + 1]] ^ mul[d[:, i + 1], y[i]]
        return out

    def perp_indices(self, v):
        return np.nonzero(self.bilinear_all(v) == 0)[0]

    def span_indices(self, vectors):
        """Packed ints of every vector in the span, as a sorted array."""
        pts = np.zeros(1, dtype=np.int64)
        for w in vectors:
            multiples = np.array(
                [self.pack(self.scale(a, w)) for a in self.ctx.elements], dtype=np.int64
            )
            pts = np.unique((pts[:, None] ^ multiples[None, :]).ravel())
        return pts

    def line_rep(self, v):
        """Scale v so its first nonzero coordinate is 1."""
        for c in v:
            if c:
                return self.scale(self.ctx.inv(c), v)
        raise ValueError("the zero vector spans no line")

    @cached_property
    def line_of(self):
        """Array mapping each vector index to the index of its canonical line representative."""
        d = self.digits
        lead = np.zeros(self.size, dtype=np.uint8)
        for i in reversed(range(self.n)):
            lead = np.where(d[:, i] != 0, d[:, i], lead)
        inv = self.ctx.inv_table[lead]
        scaled = self.ctx.mul_table[inv[:, None], d]
        out = self.pack_rows(scaled)
        out[0] = 0
        return out

    @cached_property
    def line_reps(self):
        """Packed ints of the canonical 1-space representatives, ascending."""
        return np.unique(self.line_of[1:])

    def image_table(self, mat):
        """Packed image x @ mat of every vector x, in canonical order."""
        return image_tables(self, np.asarray(mat, dtype=np.uint8)[None])[0]


def image_tables(space, mats):
    """Batched ``Space.image_table``: mats is (N, n, n), result (N, q^n).

    Built by linearity, one coordinate at a time: the images of all vectors
    supported on coordinates < i+1 are those supported on coordinates < i,
    xored with each multiple of row i.
    """
    ctx, n, q = space.ctx, space.n, space.q
    mats = np.asarray(mats, dtype=np.uint8)
    dtype = np.int32 if space.size <= 1 << 31 else np.int64
    # scaled[k, i, a] = packed(a * row_i(mats[k]))
    scaled = ctx.mul_table[np.arange(q, dtype=np.uint8)[None, None, :, None], mats[:, :, None, :]]
    scaled = space.pack_rows(scaled).astype(dtype)
    out = np.zeros((len(mats), 1), dtype=dtype)
    for i in range(n):
        out = (scaled[:, i, :, None] ^ out[:, None, :]).reshape(len(mats), -1)
    return out


@lru_cache(maxsize=None)
def space(m, f):
    return Space(m, field(f))


# -- quadratic forms ---------------------------------------------------------


@dataclass(frozen=True)
class QuadraticForm:
    """Q(x) = sum_{i<=j} C[i][j] x_i x_j with C stored upper-triangular."""

    ctx: object
    coeffs: tuple

    @classmethod
    def from_matrix(cls, ctx, c):
        c = np.asarray(c, dtype=np.uint8)
        n = c.shape[0]
        # fold any lower-triangular part onto the upper triangle
        upper = np.triu(c) ^ np.triu(c.T, 1)
        return cls(ctx, tuple(tuple(int(x) for x in row) for row in upper))

    @property
    def n(self):
        return len(self.coeffs)

    @property
    def matrix(self):
        return np.array(self.coeffs, dtype=np.uint8)

    def __call__(self, v):
        if len(v) != self.n:
            raise ValueError(f"form has dimension {self.n}, vector has {len(v)}")
        mul = self.ctx.mul
        r = 0
        for i in range(self.n):
            if v[i] == 0:
                continue
            for j in range(i, self.n):
                c = self.coeffs[i][j]
                if c and v[j]:
                    r ^= mul(c, mul(v[i], v[j]))
        return r

    def polarization(self):
        c = self.matrix
        return c ^ c.T

    def values(self, sp):
        """Q(x) for every vector x of sp, in canonical order."""
        d, mul = sp.digits, self.ctx.mul_table
        out = np.zeros(sp.size, dtype=np.uint8)
        for i in range(self.n):
            for j in range(i, self.n):
                c = self.coeffs[i][j]
                if c:
                    out ^= mul[c, mul[d[:, i], d[:, j]]]
        return out

    def compose(self, mat):
        """The form x -> Q(x @ mat), re-normalised to upper-triangular coefficients.

        Coefficients come from values on basis vectors and on sums of pairs of
        basis vectors, so the result is canonical whatever mat is.
        """
        mat = np.asarray(mat, dtype=np.uint8)
        n = self.n
        rows = [tuple(int(x) for x in mat[i]) for i in range(n)]
        diag = [self(r) for r in rows]
        c = np.zeros((n, n), dtype=np.uint8)
        for i in range(n):
            c[i, i] = diag[i]
            for j in range(i + 1, n):
                s = tuple(a ^ b for a, b in zip(rows[i], rows[j]))
                c[i, j] = self(s) ^ diag[i] ^ diag[j]
        return QuadraticForm.from_matrix(self.ctx, c)

    def act(self, g):
        """Right action Q.g = Q o g^-1."""
        return self.compose(g.inverse().mat)

    def diagonal(self):
        return tuple(self.coeffs[i][i] for i in range(self.n))


def quad_eval(form, v):
    return form(v)


def _check_standard_polarization(form, sp):
    pol = form.polarization()
    if form.n != sp.n:
        raise ValueError(f"form has dimension {form.n}, space has {sp.n}")
    if matrix.rank(pol, sp.ctx) < sp.n:
        raise DegenerateFormError("polarization of the form is degenerate")
    if not np.array_equal(pol, sp.gram):
        raise DegenerateFormError("form does not polarize to the standard alternating form")


def hyperbolic_form(sp, diagonal=None):
    """Q+ plus the diagonal terms d_i x_i^2 (every form with standard polarization has this shape)."""
    c = np.zeros((sp.n, sp.n), dtype=np.uint8)
    for i in range(sp.m):
        c[2 * i, 2 * i + 1] = 1
    if diagonal is not None:
        c[np.arange(sp.n), np.arange(sp.n)] = diagonal
    return QuadraticForm.from_matrix(sp.ctx, c)


def standard_forms(m, ctx):
    """(Q+, Q-) with Q- = Q+ + x_1^2 + delta x_2^2, delta the smallest trace-one element."""
    sp = Space(m, ctx)
    delta = ctx.smallest_trace_one()
    plus = hyperbolic_form(sp)
    minus_diag = [0] * sp.n
    minus_diag[0], minus_diag[1] = 1, delta
    return plus, hyperbolic_form(sp, minus_diag)


def arf_invariant(form, basis):
    """sum Q(e_i) Q(f_i) over a hyperbolic basis (e_1, f_1, ..., e_m, f_m)."""
    ctx = form.ctx
    a = 0
    for i in range(0, len(basis), 2):
        a ^= ctx.mul(form(basis[i]), form(basis[i + 1]))
    return a


def classify_type(form, basis=None):
    """+1 or -1 according to the trace of the Arf invariant."""
    sp = Space(form.n // 2, form.ctx)
    _check_standard_polarization(form, sp)
    if basis is None:
        basis = complete_hyperbolic_basis(sp)
    return -1 if form.ctx.trace(arf_invariant(form, basis)) else 1


def singular_count(m, q, eps):
    """|{v : Q(v) = 0}| for a type-eps form on a 2m-space, including v = 0."""
    return q ** (2 * m - 1) + eps * (q**m - q ** (m - 1))


def classify_type_by_count(form):
    """Type from the number of zeros of Q; independent of the Arf path."""
    sp = Space(form.n // 2, form.ctx)
    _check_standard_polarization(form, sp)
    zeros = int(np.count_nonzero(form.values(sp) == 0))
    for eps in (1, -1):
        if zeros == singular_count(sp.m, sp.q, eps):
            return eps
    raise AssertionError(f"zero count {zeros} matches neither type")


def forms_with_standard_polarization(m, ctx, bound=DEFAULT_FORM_BOUND):
    """All q^(2m) forms polarizing to the standard form, ordered by diagonal index.

    Form number k is Q+ + l^2 where l is the functional whose packed
    coordinates are k; its diagonal is then the coordinatewise square of l.
    """
    sp = Space(m, ctx)
    if sp.size > bound:
        raise BoundExceededError(f"{sp.size} forms exceeds the bound {bound}")
    sq = ctx.sq_table
    return [hyperbolic_form(sp, sq[sp.digits[k]]) for k in range(sp.size)]


def form_types(sp):
    """Type (+1/-1) of every form in ``forms_with_standard_polarization`` order, vectorised.

    Uses the Arf invariant on the standard basis: for Q+ + l^2 it is
    sum l_{2i}^2 l_{2i+1}^2.
    """
    ctx = sp.ctx
    d = ctx.sq_table[sp.digits]
    arf = np.zeros(sp.size, dtype=np.uint8)
    for i in range(0, sp.n, 2):
        arf ^= ctx.mul_table[d[:, i], d[:, i + 1]]
    return np.where(ctx.trace_table[arf] == 0, 1, -1).astype(np.int8)


# -- hyperbolic bases and Witt extension ---------------------------------------


def _standard_pairing(i, j):
    return 1 if i // 2 == j // 2 and i != j else 0


def complete_hyperbolic_basis(sp, partial=()):
    """Extend a partial assignment to a hyperbolic basis (e_1, f_1, ..., e_m, f_m).

    ``partial`` fills basis positions in order; ``None`` leaves a position free.
    Free positions are filled greedily with the smallest vector (canonical order)
    that has the required pairings with every vector placed so far and is not in
    their span.
    """
    n = sp.n
    if len(partial) > n:
        raise NotExtendableError(f"{len(partial)} vectors cannot be part of a basis of dimension {n}")
    slots = [None if v is None else tuple(v) for v in partial] + [None] * (n - len(partial))
    fixed = [i for i, v in enumerate(slots) if v is not None]
    for a in fixed:
        for b in fixed:
            if a < b and sp.bilinear(slots[a], slots[b]) != _standard_pairing(a, b):
                raise NotExtendableError(
                    f"vectors at positions {a} and {b} pair to "
                    f"{sp.bilinear(slots[a], slots[b])}, need {_standard_pairing(a, b)}"
                )
    if fixed and matrix.rank(np.array([slots[i] for i in fixed], dtype=np.uint8), sp.ctx) < len(fixed):
        raise NotExtendableError("prescribed vectors are linearly dependent")

    for pos in range(n):
        if slots[pos] is not None:
            continue
        placed = [i for i in range(n) if slots[i] is not None]
        ok = np.ones(sp.size, dtype=bool)
        for i in placed:
            ok &= sp.bilinear_all(slots[i]) == _standard_pairing(pos, i)
        ok[sp.span_indices([slots[i] for i in placed])] = False
        hits = np.flatnonzero(ok)
        if len(hits) == 0:
            raise NotExtendableError(f"no vector fits basis position {pos}")
        slots[pos] = sp.unpack(int(hits[0]))
    return slots


def witt_extend(sp, v, u, u_image):
    """An element g of Sp(V) with v g = v and u g = u_image.

    Both pairs are completed to hyperbolic bases with v and u in matching
    positions; g sends one basis to the other.
    """
    from .grp import GroupElement

    v, u, u_image = tuple(v), tuple(u), tuple(u_image)
    if not any(v):
        raise PreconditionError("v must be nonzero")
    c = sp.bilinear(v, u)
    if c != sp.bilinear(v, u_image):
        raise PreconditionError("(v,u) != (v,u'), the planes are not isometric")
    span_v = set(int(x) for x in sp.span_indices([v]))
    if sp.pack(u) in span_v or sp.pack(u_image) in span_v:
        raise PreconditionError("u and u' must lie outside <v>")

    def basis_for(w):
        if c:
            return complete_hyperbolic_basis(sp, [v, sp.scale(sp.ctx.inv(c), w)])
        if sp.m < 2:
            raise PreconditionError("an isotropic pair needs m >= 2")
        return complete_hyperbolic_basis(sp, [v, None, w])

    src = np.array(basis_for(u), dtype=np.uint8)
    dst = np.array(basis_for(u_image), dtype=np.uint8)
    return GroupElement(matrix.matmul(matrix.inverse(src, sp.ctx), dst, sp.ctx), sp.ctx)
