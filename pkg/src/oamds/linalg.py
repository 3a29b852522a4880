"""Dense linear algebra over a :class:`~oamds.field.Field`.

Matrices are 2-D numpy int64 arrays of canonical elements.  Row operations
are vectorised along the row, so elimination is O(rows * cols) numpy calls.
"""

from __future__ import annotations

import numpy as np

from .field import Field


class SingularMatrixError(ArithmeticError):
    pass


def rref(field: Field, mat, ncols: int | None = None):
    """Reduced row echelon form, pivoting only within the first ``ncols`` columns.

    Returns ``(reduced, pivot_columns)``; the pivot of the i-th pivot column
    sits in row i.
    """
    a = np.array(mat, dtype=np.int64, copy=True)
    rows, cols = a.shape
    if ncols is None:
        ncols = cols
    pivots = []
    r = 0
    for c in range(ncols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            a[[r, p]] = a[[p, r]]
        a[r] = field.scale(field.inv(int(a[r, c])), a[r])
        for i in np.nonzero(a[:, c])[0]:
            if i != r:
                a[i] = field.vsub(a[i], field.scale(int(a[i, c]), a[r]))
        pivots.append(c)
        r += 1
    return a, pivots


def rank(field: Field, mat) -> int:
    return len(rref(field, mat)[1])


def inverse(field: Field, mat) -> np.ndarray:
    a = np.asarray(mat, dtype=np.int64)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("inverse needs a square matrix")
    red, piv = rref(field, np.hstack([a, np.eye(n, dtype=np.int64)]), ncols=n)
    if len(piv) < n:
        raise SingularMatrixError(f"matrix has rank {len(piv)} < {n}")
    return red[:, n:]


def matmul(field: Field, a, b) -> np.ndarray:
    """Matrix product; ``b`` may carry trailing batch axes."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if not field.binary and field.q < 1 << 20:
        # exact in int64 while inner dimension * q^2 < 2^63
        return np.tensordot(a, b, axes=(1, 0)) % field.q
    out = np.zeros((a.shape[0],) + b.shape[1:], dtype=np.int64)
    for i in range(a.shape[0]):
        for j in np.nonzero(a[i])[0]:
            out[i] = field.vadd(out[i], field.scale(int(a[i, j]), b[j]))
    return out


def vandermonde(field: Field, points, rows: int) -> np.ndarray:
    """``V[t, w] = points[w] ** t`` for t < rows."""
    return np.array([[field.pow(int(x), t) for x in points] for t in range(rows)], dtype=np.int64)
