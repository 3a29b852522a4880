"""Instance-level certification of the MDS and access claims.

``check_mds`` rank-tests the ``r*l x r*l`` block matrix of every r-subset of
nodes.  ``strip_analysis`` exposes the row-strip structure used in the
invertibility argument: after permuting block rows so that strip ``a``
collects row ``a`` of every block ``t``, each nonzero column of a strip is
``L_j`` or ``gamma * L_j`` with ``L_j = (1, lambda_j, ..., lambda_j^(r-1))``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .code import CodeParams, matrix_entry
from .linalg import rank

DEFAULT_BUDGET = 10**9


class BudgetExceeded(RuntimeError):
    pass


def _check_subset(params: CodeParams, subset):
    subset = tuple(subset)
    if len(subset) != params.r:
        raise ValueError(f"subset must have r={params.r} nodes, got {len(subset)}")
    if any(b <= a for a, b in zip(subset, subset[1:])):
        raise ValueError("subset must be strictly increasing")
    if subset[0] < 1 or subset[-1] > params.n:
        raise ValueError(f"subset nodes must lie in [1, {params.n}]")
    return subset


def block_submatrix(params: CodeParams, subset) -> np.ndarray:
    """The block matrix ``[A[t, i_p]]`` (block row t, block column p), from matrix_entry."""
    subset = _check_subset(params, subset)
    l, r = params.l, params.r
    out = np.zeros((r * l, r * l), dtype=np.int64)
    for t in range(r):
        for p, i in enumerate(subset):
            for a in range(l):
                for b in range(l):
                    out[t * l + a, p * l + b] = matrix_entry(params, t, i, a, b)
    return out


def permuted_row(j: int, r: int, l: int) -> int:
    """Destination of source row j: block row t = j // l, row a = j % l goes to a*r + t."""
    return (j - j % l) // l + r * (j % l)


def permute_rows(params: CodeParams, matrix) -> np.ndarray:
    matrix = np.asarray(matrix)
    r, l = params.r, params.l
    if matrix.shape[0] != r * l:
        raise ValueError(f"expected {r * l} rows, got {matrix.shape[0]}")
    out = np.empty_like(matrix)
    for j in range(r * l):
        out[permuted_row(j, r, l)] = matrix[j]
    return out


@dataclass
class StripAnalysis:
    a: int
    nodes: frozenset  # lambda indices j with L_j or gamma*L_j among the strip's nonzero columns
    columns: frozenset  # nonzero column indices
    columns_by_node: dict  # j -> set of columns equal to L_j or gamma*L_j


def _strip_vectors(params: CodeParams) -> dict:
    gf, r = params.gf, params.r
    table = {}
    for j in range(1, len(params.lambdas) + 1):
        col = tuple(gf.pow(params.lam(j), t) for t in range(r))
        table[col] = j
        table[tuple(gf.mul(params.gamma, x) for x in col)] = j
    return table


def strip_analysis(params: CodeParams, subset, a: int, permuted=None) -> StripAnalysis:
    """Classify the nonzero columns of strip ``a`` of the permuted block matrix."""
    if not 0 <= a < params.l:
        raise IndexError(f"strip {a} outside [0, {params.l})")
    if permuted is None:
        permuted = permute_rows(params, block_submatrix(params, subset))
    strip = permuted[a * params.r : (a + 1) * params.r]
    table = _strip_vectors(params)
    by_node: dict = {}
    for col in np.nonzero(strip.any(axis=0))[0]:
        key = tuple(int(x) for x in strip[:, col])
        if key not in table:
            raise AssertionError(f"strip {a} column {col} is not of the form L_j or gamma*L_j")
        by_node.setdefault(table[key], set()).add(int(col))
    cols = frozenset(c for s in by_node.values() for c in s)
    return StripAnalysis(a, frozenset(by_node), cols, by_node)


def strip_analyses(params: CodeParams, subset) -> list[StripAnalysis]:
    permuted = permute_rows(params, block_submatrix(params, subset))
    return [strip_analysis(params, subset, a, permuted) for a in range(params.l)]


def full_rank_strips(params: CodeParams, subset) -> set:
    """Strips whose columns involve exactly r distinct lambda indices."""
    return {sa.a for sa in strip_analyses(params, subset) if len(sa.nodes) == params.r}


@dataclass
class MdsCertificate:
    fingerprint: str
    subsets: list
    verdicts: list

    @property
    def passed(self) -> bool:
        return all(self.verdicts)

    def to_text(self) -> str:
        lines = [f"params={self.fingerprint}"]
        for sub, ok in zip(self.subsets, self.verdicts):
            lines.append(f"subset={','.join(map(str, sub))} invertible={'true' if ok else 'false'}")
        return "\n".join(lines) + "\n"


def mds_cost(params: CodeParams) -> int:
    return math.comb(params.n, params.r) * (params.r * params.l) ** 3


def check_mds(params: CodeParams, budget: int = DEFAULT_BUDGET) -> MdsCertificate:
    cost = mds_cost(params)
    if cost > budget:
        raise BudgetExceeded(f"C(n,r)*(rl)^3 = {cost} exceeds budget {budget}")
    size = params.r * params.l
    subsets, verdicts = [], []
    for sub in itertools.combinations(range(1, params.n + 1), params.r):
        subsets.append(sub)
        verdicts.append(rank(params.gf, block_submatrix(params, sub)) == size)
    return MdsCertificate(params.fingerprint, subsets, verdicts)


def check_subpacketization(params: CodeParams) -> bool:
    """l == r^ceil(n/r) and l >= r^((k-1)/r); only meaningful when s == r."""
    if params.s != params.r:
        return False
    r, n, k, l = params.r, params.n, params.k, params.l
    return l == r ** -(-n // r) and l >= r ** ((k - 1) / r)
