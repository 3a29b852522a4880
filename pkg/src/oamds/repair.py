"""Optimal-access repair of one failed node.

Node ``i = (v-1)*s + u + 1`` is rebuilt from the coordinates
``{a : a_v = u}`` of its helpers, which is ``l/s`` symbols per helper.

Full mode uses all ``n - 1`` survivors.  Group mode uses the ``s - 1`` other
members of the failed node's group plus any ``k`` nodes ``M`` outside it;
the missing out-of-group symbols are first recovered from a projected
system in which the group's own unknowns are annihilated.

``reads`` are mappings ``helper -> {coordinate -> value}``; values may be
ints or arrays (one entry per stripe).  Wrap them in :class:`ReadTrace` to
record exactly what a repair touched.
"""

from __future__ import annotations

import itertools
from collections.abc import Mapping
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .code import CodeParams, ParameterError, check_node, row_terms
from .linalg import SingularMatrixError, inverse, matmul, rank, vandermonde

FULL = "full"
GROUP = "group"


class RepairError(ValueError):
    pass


class AccessViolation(RepairError):
    pass


@dataclass(frozen=True)
class RepairPlan:
    failed: int
    mode: str
    helpers: tuple
    coords: tuple
    v: int
    u: int

    @property
    def d(self) -> int:
        return len(self.helpers)

    def to_bytes(self) -> bytes:
        out = self.failed.to_bytes(2, "little") + (0 if self.mode == FULL else 1).to_bytes(1, "little")
        out += len(self.helpers).to_bytes(2, "little")
        return out + b"".join(h.to_bytes(2, "little") for h in self.helpers)

    @classmethod
    def from_bytes(cls, params: CodeParams, data: bytes) -> RepairPlan:
        failed = int.from_bytes(data[0:2], "little")
        mode = FULL if data[2] == 0 else GROUP
        count = int.from_bytes(data[3:5], "little")
        helpers = [int.from_bytes(data[5 + 2 * j : 7 + 2 * j], "little") for j in range(count)]
        if mode == FULL:
            return plan_full_repair(params, failed)
        v, _ = params.position(failed)
        mates = set(params.group(v))
        return plan_group_repair(params, failed, [h for h in helpers if h not in mates])


@dataclass
class AccessReport:
    node: int
    mode: str
    helpers: tuple
    per_helper: dict
    symbols_accessed: int
    symbols_downloaded: int
    bound: int
    optimal: bool

    def to_json_dict(self) -> dict:
        return {
            "node": self.node,
            "mode": self.mode,
            "helpers": list(self.helpers),
            "symbols_accessed": self.symbols_accessed,
            "bound": self.bound,
            "optimal": self.optimal,
        }


class ReadTrace(Mapping):
    """Mapping wrapper over ``helper -> {coord -> value}`` that logs reads."""

    def __init__(self, source: Mapping):
        self._source = source
        self.log: list[tuple[int, int]] = []

    def __getitem__(self, helper):
        return _TracedNode(self, helper, self._source[helper])

    def __iter__(self):
        return iter(self._source)

    def __len__(self):
        return len(self._source)

    def accessed(self) -> dict:
        out: dict = {}
        for h, a in self.log:
            out.setdefault(h, set()).add(a)
        return out


class _TracedNode(Mapping):
    def __init__(self, trace, helper, node):
        self._trace, self._helper, self._node = trace, helper, node

    def __getitem__(self, a):
        self._trace.log.append((self._helper, a))
        return self._node[a]

    def __iter__(self):
        return iter(self._node)

    def __len__(self):
        return len(self._node)


# plans


def plan_full_repair(params: CodeParams, failed: int) -> RepairPlan:
    check_node(params, failed)
    v, u = params.position(failed)
    helpers = tuple(i for i in range(1, params.n + 1) if i != failed)
    return RepairPlan(failed, FULL, helpers, tuple(params.fiber(v, u)), v, u)


def plan_group_repair(params: CodeParams, failed: int, outside) -> RepairPlan:
    """Helpers: the failed node's group mates plus ``outside`` (k nodes, none in the group)."""
    if params.construction != 1:
        raise ParameterError("group repair is defined for construction 1 only")
    check_node(params, failed)
    v, u = params.position(failed)
    group = params.group(v)
    outside = sorted(set(outside))
    if len(outside) != params.k:
        raise RepairError(f"M must have k={params.k} nodes, got {len(outside)}")
    for i in outside:
        check_node(params, i)
        if i in group:
            raise RepairError(f"node {i} of M lies in group {v} of failed node {failed}")
    helpers = tuple(sorted([i for i in group if i != failed] + outside))
    return RepairPlan(failed, GROUP, helpers, tuple(params.fiber(v, u)), v, u)


# full repair


@lru_cache(maxsize=256)
def _group_vandermonde_inverse(params: CodeParams, v: int) -> np.ndarray:
    # top s rows suffice; lambdas of a group are distinct
    pts = [params.lam(params.node_at(v, w)) for w in range(params.s)]
    try:
        return inverse(params.gf, vandermonde(params.gf, pts, params.s))
    except SingularMatrixError as exc:  # pragma: no cover - distinct lambdas
        raise RepairError(f"group {v} Vandermonde system is singular") from exc


def _fetch(reads, helper: int, a: int):
    try:
        return reads[helper][a]
    except KeyError:
        raise RepairError(f"missing read of coordinate {a} at helper {helper}") from None


def fiber_sums(params: CodeParams, plan: RepairPlan, reads) -> dict:
    """sigma[a][t] = sum_w lambda_{(v-1)s+w+1}^t c_{failed, a(v,w)} for a in the fiber.

    Each is minus the sum of all other terms of parity row (t, a); those
    only touch fiber coordinates of the other nodes.
    """
    gf, failed = params.gf, plan.failed
    sigma = {}
    for a in plan.coords:
        acc = [0] * params.r
        for i in range(1, params.n + 1):
            if i == failed:
                continue
            for b, j, scaled in row_terms(params, i, a):
                val = _fetch(reads, i, b)
                if scaled:
                    val = gf.scale(params.gamma, val)
                lam = params.lam(j)
                p = 1
                for t in range(params.r):
                    acc[t] = gf.vadd(acc[t], gf.scale(p, val))
                    p = gf.mul(p, lam)
        sigma[a] = [gf.vneg(x) for x in acc]
    return sigma


def _solve_fibers(params: CodeParams, plan: RepairPlan, sigma: dict):
    gf, v = params.gf, plan.v
    vinv = _group_vandermonde_inverse(params, v)
    out = None
    for a, sig in sigma.items():
        rhs = np.stack(np.broadcast_arrays(*sig[: params.s]))
        vals = matmul(gf, vinv, rhs)
        if out is None:
            out = np.zeros((params.l,) + vals.shape[1:], dtype=np.int64)
        for w in range(params.s):
            out[a + (w - plan.u) * params.s ** (v - 1)] = vals[w]
    return out


def repair_full(params: CodeParams, plan: RepairPlan, reads) -> np.ndarray:
    """Rebuild the failed column (shape ``(l, *batch)``) from fiber reads of every survivor."""
    if plan.mode == FULL and set(plan.helpers) != set(range(1, params.n + 1)) - {plan.failed}:
        raise RepairError("full repair needs every surviving node")
    return _solve_fibers(params, plan, fiber_sums(params, plan, reads))


# group repair


@dataclass(frozen=True)
class Annihilator:
    v: int
    coeffs: np.ndarray = field(repr=False)  # G: (r - s) x r, row j holds g_j
    projected: dict = field(repr=False)  # node i outside group v -> L-hat_i

    def g0(self, params: CodeParams, x: int) -> int:
        return params.gf.poly_eval([int(c) for c in self.coeffs[0]], x)


def _poly_mul_linear(gf, poly, root):
    """poly(x) * (x - root); coefficients low degree first."""
    out = [0] * (len(poly) + 1)
    for d, c in enumerate(poly):
        out[d + 1] = gf.add(out[d + 1], c)
        out[d] = gf.sub(out[d], gf.mul(c, root))
    return out


@lru_cache(maxsize=256)
def make_annihilator(params: CodeParams, v: int) -> Annihilator:
    if params.construction != 1:
        raise ParameterError("group repair is defined for construction 1 only")
    if not 1 <= v <= params.m:
        raise IndexError(f"group {v} outside [1, {params.m}]")
    if params.s == params.r:
        raise ParameterError("s = r: nothing to annihilate, group repair is full repair")
    gf, r, s = params.gf, params.r, params.s
    g0 = [1]
    for w in range(1, s + 1):
        g0 = _poly_mul_linear(gf, g0, params.lam((v - 1) * s + w))
    coeffs = np.zeros((r - s, r), dtype=np.int64)
    for j in range(r - s):
        coeffs[j, j : j + s + 1] = g0  # g_j = x^j g_0, degree s + j < r
    group = set(params.group(v))
    projected = {}
    for i in range(1, params.n + 1):
        if i in group:
            continue
        g = gf.poly_eval(g0, params.lam(i))
        projected[i] = np.array([gf.mul(g, gf.pow(params.lam(i), j)) for j in range(r - s)], dtype=np.int64)
    coeffs.setflags(write=False)
    return Annihilator(v, coeffs, projected)


def projected_system(params: CodeParams, v: int, u: int):
    """Projected parity equations over the fiber of (v, u).

    Returns ``(rows, columns, E)``: equation rows are ``(a, j)`` for a in the
    fiber and ``j < r - s``; columns are ``(i, b)`` for i outside group v and
    b in the fiber; ``E @ x == 0`` for every codeword.
    """
    ann = make_annihilator(params, v)
    gf, s, r = params.gf, params.s, params.r
    fib = params.fiber(v, u)
    outside = sorted(ann.projected)
    cols = [(i, b) for i in outside for b in fib]
    col_idx = {c: n for n, c in enumerate(cols)}
    rows = [(a, j) for a in fib for j in range(r - s)]
    e = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for ai, a in enumerate(fib):
        for i in outside:
            for b, jj, scaled in row_terms(params, i, a):
                coef = ann.projected[jj]
                if scaled:
                    coef = gf.scale(params.gamma, coef)
                ci = col_idx[(i, b)]
                for j in range(r - s):
                    e[ai * (r - s) + j, ci] = gf.add(int(e[ai * (r - s) + j, ci]), int(coef[j]))
    return rows, cols, e


@lru_cache(maxsize=1024)
def _expansion_map(params: CodeParams, v: int, u: int, outside: tuple):
    rows, cols, e = projected_system(params, v, u)
    known_idx = [n for n, (i, _) in enumerate(cols) if i in outside]
    unknown_idx = [n for n, (i, _) in enumerate(cols) if i not in outside]
    gf = params.gf
    try:
        inv = inverse(gf, e[:, unknown_idx])
    except SingularMatrixError as exc:
        raise RepairError(f"projected system singular for M={outside}") from exc
    m = gf.vneg(matmul(gf, inv, e[:, known_idx]))
    return [cols[n] for n in known_idx], [cols[n] for n in unknown_idx], m


def expand_group_reads(params: CodeParams, plan: RepairPlan, reads) -> dict:
    """Recover fiber symbols of every node outside the failed group from those of M.

    Returns ``{node: {coord: value}}`` for all nodes outside the group.
    """
    group = set(params.group(plan.v))
    outside = tuple(h for h in plan.helpers if h not in group)
    known_cols, unknown_cols, m = _expansion_map(params, plan.v, plan.u, outside)
    known = [np.asarray(_fetch(reads, i, b), dtype=np.int64) for i, b in known_cols]
    shape = np.broadcast_shapes(*(x.shape for x in known)) if known else ()
    vec = np.stack([np.broadcast_to(x, shape) for x in known]) if known else np.zeros((0,) + shape, dtype=np.int64)
    solved = matmul(params.gf, m, vec)
    out: dict = {}
    for (i, b), x in zip(known_cols, known):
        out.setdefault(i, {})[b] = x
    for (i, b), x in zip(unknown_cols, solved):
        out.setdefault(i, {})[b] = x
    return out


def repair_group(params: CodeParams, plan: RepairPlan, reads) -> np.ndarray:
    """Rebuild the failed column from the group mates and the k nodes of M."""
    if plan.mode != GROUP:
        raise RepairError("plan is not a group-repair plan")
    group = params.group(plan.v)
    if params.s == params.r:
        # M is all of N(v): every survivor is already a helper
        return repair_full(params, plan, reads)
    merged = expand_group_reads(params, plan, reads)
    for i in group:
        if i != plan.failed:
            merged[i] = {a: _fetch(reads, i, a) for a in plan.coords}
    return repair_full(params, plan, merged)


# auditing


def access_bound(params: CodeParams, plan: RepairPlan) -> int:
    """Cut-set bound d*l/(d+1-k) for the plan's helper count."""
    d = plan.d
    num = d * params.l
    den = d + 1 - params.k
    return num // den if num % den == 0 else -(-num // den)


def audit_access(params: CodeParams, plan: RepairPlan, trace: ReadTrace) -> AccessReport:
    accessed = trace.accessed() if isinstance(trace, ReadTrace) else trace
    coords = set(plan.coords)
    per_helper = {}
    for h, cs in accessed.items():
        if h not in plan.helpers:
            raise AccessViolation(f"read from node {h}, which is not a helper")
        extra = set(cs) - coords
        if extra:
            raise AccessViolation(f"helper {h} read outside the plan: {sorted(extra)}")
        per_helper[h] = len(cs)
    total = sum(per_helper.values())
    bound = access_bound(params, plan)
    return AccessReport(plan.failed, plan.mode, plan.helpers, per_helper, total, total, bound, total == bound)


def annihilator_independent(params: CodeParams, v: int) -> bool:
    """Every r - s of the projected columns are linearly independent."""
    ann = make_annihilator(params, v)
    width = params.r - params.s
    for combo in itertools.combinations(sorted(ann.projected), width):
        mat = np.stack([ann.projected[i] for i in combo], axis=1)
        if rank(params.gf, mat) < width:
            return False
    return True
