"""Code instances and their parity-check matrices.

A code is the set of ``l x n`` arrays ``(C_1, ..., C_n)`` with
``sum_i A[t, i] @ C_i == 0`` for ``t = 0..r-1``.  Each ``A[t, i]`` is an
``l x l`` matrix with at most ``s`` nonzeros per row, so it is never stored:
entries are produced by rule from the digit expansion of the row index.

Nodes are numbered from 1, coordinates from 0.

Construction 2 (``n = r*m + r'``) is handled as Construction 1 with group
size ``r`` and ``m + 1`` groups of which only the first ``n`` nodes exist.
The missing nodes keep their lambda values, which still appear as entries
of the last group's matrices.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field as dc_field
from functools import cached_property, lru_cache

import numpy as np

from .field import Field, FieldSpec, get_field


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class CodeParams:
    construction: int
    s: int
    r: int
    m: int
    rprime: int
    field: FieldSpec
    n: int = dc_field(init=False)
    k: int = dc_field(init=False)
    l: int = dc_field(init=False)
    lambdas: tuple = dc_field(init=False, repr=False)
    gamma: int = dc_field(init=False, repr=False)

    def __post_init__(self):
        c, s, r, m, rp = self.construction, self.s, self.r, self.m, self.rprime
        q = self.field.order
        if c == 1:
            if s < 1 or m < 1:
                raise ParameterError(f"need s >= 1 and m >= 1 (s={s}, m={m})")
            if not s <= r:
                raise ParameterError(f"violated s <= r (s={s}, r={r})")
            if not r <= s * m:
                raise ParameterError(f"violated r <= s*m (r={r}, s*m={s * m})")
            if rp != 0:
                raise ParameterError("r' is only used by construction 2")
            n, l, nlam = s * m, s**m, s * m
            if not q >= n:
                raise ParameterError(f"violated |F| >= n (|F|={q}, n={n})")
        elif c == 2:
            if r < 2:
                raise ParameterError(f"construction 2 needs r >= 2 (r={r})")
            if s != r:
                raise ParameterError(f"construction 2 has s = r (s={s}, r={r})")
            if not 1 <= rp <= r - 1:
                raise ParameterError(f"violated 1 <= r' <= r-1 (r'={rp}, r={r})")
            if m < 1:
                raise ParameterError(f"violated n = r*m + r' > r, need m >= 1 (m={m})")
            n, l, nlam = r * m + rp, r ** (m + 1), r * (m + 1)
            if not q >= nlam:
                raise ParameterError(f"violated |F| >= r(m+1) (|F|={q}, r(m+1)={nlam})")
        else:
            raise ParameterError(f"construction must be 1 or 2, got {c}")
        if q < 3:
            raise ParameterError("field needs an element gamma outside {0, 1}")
        fld = get_field(self.field)
        set_ = object.__setattr__
        set_(self, "n", n)
        set_(self, "k", n - r)
        set_(self, "l", l)
        set_(self, "lambdas", tuple(fld.element(j) for j in range(nlam)))
        set_(self, "gamma", fld.element(2))

    # Construction 2 is the s = r case with one extra (partial) group.

    @property
    def radix(self) -> int:
        return self.s

    @property
    def depth(self) -> int:
        """Number of digits of a coordinate, i.e. number of node groups."""
        return self.m if self.construction == 1 else self.m + 1

    @cached_property
    def gf(self) -> Field:
        return get_field(self.field)

    def lam(self, i: int) -> int:
        """lambda_i (1-based; may index a missing construction-2 node)."""
        return self.lambdas[i - 1]

    def position(self, i: int) -> tuple[int, int]:
        """Node i -> (group v, offset u) with i = (v-1)*s + u + 1."""
        check_node(self, i)
        return (i - 1) // self.s + 1, (i - 1) % self.s

    def node_at(self, v: int, u: int) -> int:
        return (v - 1) * self.s + u + 1

    def group(self, v: int) -> list[int]:
        """Existing nodes of group v."""
        return [i for i in range(self.node_at(v, 0), self.node_at(v, self.s - 1) + 1) if i <= self.n]

    def fiber(self, v: int, u: int) -> list[int]:
        """Coordinates a with a_v == u, ascending."""
        return [a for a in range(self.l) if digit(self, a, v) == u]

    def to_bytes(self) -> bytes:
        return struct.pack("<BHHHH", self.construction, self.s, self.r, self.m, self.rprime) + self.field.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> CodeParams:
        c, s, r, m, rp = struct.unpack("<BHHHH", data[:9])
        return cls(c, s, r, m, rp, FieldSpec.from_bytes(data[9:14]))

    @property
    def fingerprint(self) -> str:
        return self.to_bytes().hex()

    def lambda_fingerprint(self) -> str:
        raw = b"".join(x.to_bytes(4, "little") for x in self.lambdas + (self.gamma,))
        return hashlib.sha256(raw).hexdigest()[:16]


PARAMS_SIZE = 14


def make_params(construction: int, s: int | None, r: int, m: int, rprime: int = 0, field_spec: FieldSpec | None = None) -> CodeParams:
    """Build a code instance; lambda_i = element(i-1), gamma = element(2).

    For construction 2, ``s`` may be omitted (it is always ``r``).
    """
    if field_spec is None:
        raise ParameterError("a field spec is required")
    if construction == 2 and s is None:
        s = r
    return CodeParams(construction, s, r, m, rprime, field_spec)


def check_node(params: CodeParams, i: int):
    if not 1 <= i <= params.n:
        raise IndexError(f"node {i} outside [1, {params.n}]")


def _check_coord(params: CodeParams, a: int):
    if not 0 <= a < params.l:
        raise IndexError(f"coordinate {a} outside [0, {params.l})")


def digit(params: CodeParams, a: int, v: int) -> int:
    """v-th digit (1 = least significant) of a in base s."""
    _check_coord(params, a)
    if not 1 <= v <= params.depth:
        raise IndexError(f"digit index {v} outside [1, {params.depth}]")
    return (a // params.s ** (v - 1)) % params.s


def set_digit(params: CodeParams, a: int, v: int, u: int) -> int:
    """a(v, u): a with its v-th digit replaced by u."""
    if not 0 <= u < params.s:
        raise ValueError(f"digit value {u} outside [0, {params.s})")
    p = params.s ** (v - 1)
    return a + (u - digit(params, a, v)) * p


def matrix_entry(params: CodeParams, t: int, i: int, a: int, b: int) -> int:
    """Entry (a, b) of A[t, i], evaluated from the three-case rule."""
    if not 0 <= t < params.r:
        raise IndexError(f"t={t} outside [0, {params.r})")
    _check_coord(params, b)
    v, u = params.position(i)
    av = digit(params, a, v)
    gf = params.gf
    if av < u and b == a:
        return gf.pow(params.lam(i), t)
    if av > u and b == a:
        return gf.mul(params.gamma, gf.pow(params.lam(i), t))
    if av == u:
        for w in range(params.s):
            if b == set_digit(params, a, v, w):
                return gf.pow(params.lam(params.node_at(v, w)), t)
    return 0


@lru_cache(maxsize=65536)
def row_terms(params: CodeParams, i: int, a: int) -> tuple:
    """Structure of row a of A[., i] independent of t.

    Returns ``(b, j, scaled)`` triples: entry (a, b) of A[t, i] is
    ``lambda_j^t``, times gamma when ``scaled``.
    """
    v, u = params.position(i)
    av = digit(params, a, v)
    if av < u:
        return ((a, i, False),)
    if av > u:
        return ((a, i, True),)
    return tuple((set_digit(params, a, v, w), params.node_at(v, w), False) for w in range(params.s))


def row_support(params: CodeParams, t: int, i: int, a: int) -> list[tuple[int, int]]:
    """Nonzero ``(b, value)`` entries of row a of A[t, i]."""
    if not 0 <= t < params.r:
        raise IndexError(f"t={t} outside [0, {params.r})")
    gf = params.gf
    out = []
    for b, j, scaled in row_terms(params, i, a):
        val = gf.pow(params.lam(j), t)
        if scaled:
            val = gf.mul(params.gamma, val)
        out.append((b, val))
    return out


def dense_block(params: CodeParams, t: int, i: int) -> np.ndarray:
    """Materialise A[t, i] from matrix_entry (for oracles and display)."""
    l = params.l
    return np.array([[matrix_entry(params, t, i, a, b) for b in range(l)] for a in range(l)], dtype=np.int64)


@lru_cache(maxsize=32)
def parity_check_matrix(params: CodeParams) -> np.ndarray:
    """The ``r*l x n*l`` matrix of the whole system.

    Row ``t*l + a`` is row a of block t; column ``(i-1)*l + b`` is c_{i,b}.
    Built from row_support.
    """
    l = params.l
    h = np.zeros((params.r * l, params.n * l), dtype=np.int64)
    for t in range(params.r):
        for i in range(1, params.n + 1):
            for a in range(l):
                for b, val in row_support(params, t, i, a):
                    h[t * l + a, (i - 1) * l + b] = val
    h.setflags(write=False)
    return h
