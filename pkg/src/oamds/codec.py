"""Systematic encoding and erasure decoding.

A codeword is an int64 array of shape ``(l, n, *batch)``: column ``i-1`` is
node ``C_i``.  Trailing batch axes let one call handle many stripes.
Nodes ``1..k`` carry data, ``k+1..n`` parity.

Decoding restricts the parity-check system to the erased columns and solves
it by Gaussian elimination.  The elimination depends only on the erasure
pattern, so it is done once and cached as a linear map from the known
symbols to the erased ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .code import CodeParams, check_node, parity_check_matrix, row_support
from .linalg import matmul, rref


class DecodeError(ValueError):
    pass


@dataclass(frozen=True)
class ErasurePattern:
    """Known cells of a codeword plus the set of erased nodes.

    ``cells`` has the codeword shape; entries of erased columns are ignored.
    """

    cells: np.ndarray
    erased: frozenset

    @classmethod
    def erase(cls, codeword, erased) -> ErasurePattern:
        cells = np.array(codeword, dtype=np.int64, copy=True)
        for i in erased:
            cells[:, i - 1] = 0
        return cls(cells, frozenset(erased))


def _check_shape(params: CodeParams, arr, cols: int, what: str):
    if arr.ndim < 2 or arr.shape[0] != params.l or arr.shape[1] != cols:
        raise DecodeError(f"{what} must have shape ({params.l}, {cols}, ...), got {arr.shape}")


def _flatten(arr) -> np.ndarray:
    """(l, nodes, *batch) -> (nodes*l, *batch), node-major."""
    return np.swapaxes(arr, 0, 1).reshape((arr.shape[0] * arr.shape[1],) + arr.shape[2:])


def _unflatten(vec, l: int) -> np.ndarray:
    nodes = vec.shape[0] // l
    return np.swapaxes(vec.reshape((nodes, l) + vec.shape[1:]), 0, 1)


def syndrome(params: CodeParams, codeword) -> np.ndarray:
    """All r*l parity equations evaluated on ``codeword``; entry t*l + a."""
    c = np.asarray(codeword, dtype=np.int64)
    _check_shape(params, c, params.n, "codeword")
    gf, l = params.gf, params.l
    out = np.zeros((params.r * l,) + c.shape[2:], dtype=np.int64)
    for t in range(params.r):
        for a in range(l):
            acc = out[t * l + a]
            for i in range(1, params.n + 1):
                for b, val in row_support(params, t, i, a):
                    acc = gf.vadd(acc, gf.scale(val, c[b, i - 1]))
            out[t * l + a] = acc
    return out


@lru_cache(maxsize=256)
def erasure_map(params: CodeParams, erased: tuple) -> tuple[tuple, np.ndarray]:
    """Linear map recovering the erased nodes from the known ones.

    Returns ``(known_nodes, M)`` with ``erased_vec = M @ known_vec``, both
    vectors node-major over the listed nodes.
    """
    l = params.l
    known = tuple(i for i in range(1, params.n + 1) if i not in erased)
    h = parity_check_matrix(params)
    cols_e = [(i - 1) * l + b for i in erased for b in range(l)]
    cols_k = [(i - 1) * l + b for i in known for b in range(l)]
    ne = len(cols_e)
    red, piv = rref(params.gf, np.hstack([h[:, cols_e], h[:, cols_k]]), ncols=ne)
    if len(piv) < ne:
        raise DecodeError(f"erasure system for {erased} is singular (rank {len(piv)} < {ne})")
    # H_E x_E + H_K x_K = 0  ->  x_E = -(reduced H_K) x_K
    m = params.gf.vneg(red[:ne, ne:])
    m.setflags(write=False)
    return known, m


def decode(params: CodeParams, pattern: ErasurePattern) -> np.ndarray:
    """Complete an erasure pattern with at most r erased nodes."""
    erased = tuple(sorted(pattern.erased))
    for i in erased:
        check_node(params, i)
    if len(erased) > params.r:
        raise DecodeError(f"{len(erased)} erasures exceed r={params.r}")
    cells = np.asarray(pattern.cells, dtype=np.int64)
    _check_shape(params, cells, params.n, "pattern cells")
    out = cells.copy()
    if erased:
        known, m = erasure_map(params, erased)
        idx_k = [i - 1 for i in known]
        idx_e = [i - 1 for i in erased]
        rec = matmul(params.gf, m, _flatten(cells[:, idx_k]))
        out[:, idx_e] = _unflatten(rec, params.l)
    if np.any(syndrome(params, out)):
        raise DecodeError("known cells are inconsistent with the code")
    return out


def encode(params: CodeParams, data) -> np.ndarray:
    """Systematic encoding of an ``(l, k, *batch)`` data array."""
    d = np.asarray(data, dtype=np.int64)
    _check_shape(params, d, params.k, "data")
    parity = tuple(range(params.k + 1, params.n + 1))
    known, m = erasure_map(params, parity)
    out = np.zeros((params.l, params.n) + d.shape[2:], dtype=np.int64)
    out[:, : params.k] = d
    if parity:
        out[:, params.k :] = _unflatten(matmul(params.gf, m, _flatten(d)), params.l)
    return out
