"""Dense matrices over GF(2^f) as uint8 numpy arrays.

Entries are field elements in the ``FieldContext`` encoding.  All routines
accept stacked matrices where noted; the leading axes are broadcast.
"""

import numpy as np


def matmul(a, b, ctx):
    """Product a @ b over the field; a is (..., r, k), b is (..., k, c)."""
    a = np.asarray(a, dtype=np.uint8)
    b = np.asarray(b, dtype=np.uint8)
    mul = ctx.mul_table
    k = a.shape[-1]
    if b.shape[-2] != k:
        raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
    if ctx.q == 2:
        # GF(2): multiplication is AND, so an integer matmul mod 2 is exact
        return (np.matmul(a, b, dtype=np.int32) & 1).astype(np.uint8)
    out = mul[a[..., :, 0, None], b[..., 0, None, :]]
    for l in range(1, k):
        out ^= mul[a[..., :, l, None], b[..., l, None, :]]
    return out


def identity(n):
    return np.eye(n, dtype=np.uint8)


def row_reduce(a, ctx):
    """Reduced row echelon form; returns (rref, pivot columns)."""
    a = np.array(a, dtype=np.uint8)
    rows, cols = a.shape
    mul = ctx.mul_table
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if len(nz) == 0:
            continue
        p = r + nz[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        a[r] = mul[ctx.inv_table[a[r, c]], a[r]]
        for i in range(rows):
            if i != r and a[i, c]:
                a[i] ^= mul[a[i, c], a[r]]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(a, ctx):
    return len(row_reduce(a, ctx)[1])


def inverse(a, ctx):
    a = np.asarray(a, dtype=np.uint8)
    n = a.shape[0]
    red, pivots = row_reduce(np.hstack([a, identity(n)]), ctx)
    if pivots[:n] != list(range(n)):
        raise np.linalg.LinAlgError("matrix is singular over GF(2^f)")
    return red[:, n:].copy()


def nullspace_dim(a, ctx):
    a = np.asarray(a, dtype=np.uint8)
    return a.shape[0] - rank(a, ctx)
