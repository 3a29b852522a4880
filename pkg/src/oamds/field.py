"""Finite field arithmetic: prime fields GF(p) and binary fields GF(2^w).

Elements are canonical integers in ``[0, q)``: residues for prime fields,
polynomial coefficient bits for binary fields.  A :class:`Field` performs
arithmetic on plain ints and, element-wise, on numpy integer arrays; the
:class:`FieldElement` wrapper adds spec checking for callers that mix fields.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

PRIME = "prime"
BINARY = "binary"

DEFAULT_POLY_8 = 0x11D  # x^8 + x^4 + x^3 + x^2 + 1
DEFAULT_POLY_16 = 0x1100B  # x^16 + x^12 + x^3 + x + 1


class FieldMismatchError(ValueError):
    pass


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def clmul(x: int, y: int) -> int:
    """Carry-less product of two bit-polynomials."""
    out = 0
    while y:
        if y & 1:
            out ^= x
        x <<= 1
        y >>= 1
    return out


def poly_mod(x: int, mod: int) -> int:
    dm = mod.bit_length() - 1
    while x.bit_length() - 1 >= dm:
        x ^= mod << (x.bit_length() - 1 - dm)
    return x


def is_irreducible(poly: int) -> bool:
    """Trial division by every polynomial of degree 1..deg/2 over GF(2)."""
    deg = poly.bit_length() - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for f in range(1 << d, 1 << (d + 1)):
            if poly_mod(poly, f) == 0:
                return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    kind: str
    p: int = 0
    width: int = 0
    poly: int = 0

    def __post_init__(self):
        if self.kind == PRIME:
            if not _is_prime(self.p):
                raise ValueError(f"GF(p) needs p prime, got {self.p}")
            if self.p >= 1 << 31:
                raise ValueError("prime fields are limited to p < 2^31")
        elif self.kind == BINARY:
            if not 2 <= self.width <= 16:
                raise ValueError(f"binary field width must be in [2, 16], got {self.width}")
            if self.poly.bit_length() - 1 != self.width:
                raise ValueError(f"reduction polynomial {self.poly:#x} is not of degree {self.width}")
            if not is_irreducible(self.poly):
                raise ValueError(f"reduction polynomial {self.poly:#x} is reducible")
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @classmethod
    def prime(cls, p: int) -> FieldSpec:
        return cls(PRIME, p=p)

    @classmethod
    def binary(cls, width: int = 8, poly: int | None = None) -> FieldSpec:
        if poly is None:
            poly = {8: DEFAULT_POLY_8, 16: DEFAULT_POLY_16}.get(width)
            if poly is None:
                raise ValueError(f"no default reduction polynomial for width {width}")
        return cls(BINARY, width=width, poly=poly)

    @property
    def order(self) -> int:
        return self.p if self.kind == PRIME else 1 << self.width

    @property
    def characteristic(self) -> int:
        return self.p if self.kind == PRIME else 2

    def to_bytes(self) -> bytes:
        if self.kind == PRIME:
            return struct.pack("<BI", 0, self.p)
        return struct.pack("<BI", 1, (self.width << 24) | self.poly)

    @classmethod
    def from_bytes(cls, data: bytes) -> FieldSpec:
        if len(data) != 5:
            raise ValueError("field spec is 5 bytes")
        kind, param = struct.unpack("<BI", data)
        if kind == 0:
            return cls.prime(param)
        if kind == 1:
            return cls.binary(param >> 24, param & 0xFFFFFF)
        raise ValueError(f"unknown field kind byte {kind}")

    def __str__(self):
        if self.kind == PRIME:
            return f"GF({self.p})"
        return f"GF(2^{self.width}, poly={self.poly:#x})"


class Field:
    """Arithmetic for one :class:`FieldSpec`.

    Scalar methods take and return ints.  The ``v*`` methods work
    element-wise on numpy int64 arrays (ints broadcast).
    """

    def __init__(self, spec: FieldSpec):
        self.spec = spec
        self.q = spec.order
        self.binary = spec.kind == BINARY
        self._tables = self.binary and spec.width <= 8
        if self._tables:
            self._build_tables()

    def _build_tables(self):
        q, poly = self.q, self.spec.poly
        # find a generator of the multiplicative group
        for g in range(2, q):
            exp = [0] * (2 * q)
            x = 1
            seen = set()
            for i in range(q - 1):
                exp[i] = x
                seen.add(x)
                x = poly_mod(clmul(x, g), poly)
            if len(seen) == q - 1:
                break
        else:  # unreachable: the multiplicative group is cyclic
            raise ValueError("no generator found")
        for i in range(q - 1, 2 * q):
            exp[i] = exp[i - (q - 1)]
        log = [0] * q
        for i in range(q - 1):
            log[exp[i]] = i
        self.exp_table = np.array(exp, dtype=np.int64)
        self.log_table = np.array(log, dtype=np.int64)
        self._exp = exp
        self._log = log

    # scalar ops

    def add(self, x: int, y: int) -> int:
        return x ^ y if self.binary else (x + y) % self.q

    def sub(self, x: int, y: int) -> int:
        return x ^ y if self.binary else (x - y) % self.q

    def neg(self, x: int) -> int:
        return x if self.binary else (-x) % self.q

    def mul(self, x: int, y: int) -> int:
        if not self.binary:
            return x * y % self.q
        if x == 0 or y == 0:
            return 0
        if self._tables:
            return self._exp[self._log[x] + self._log[y]]
        return poly_mod(clmul(x, y), self.spec.poly)

    def inv(self, x: int) -> int:
        if x % self.q == 0:
            raise ZeroDivisionError("zero has no inverse")
        if not self.binary:
            return pow(x, self.q - 2, self.q)
        if self._tables:
            return self._exp[(self.q - 1) - self._log[x]]
        return self.pow(x, self.q - 2)

    def div(self, x: int, y: int) -> int:
        return self.mul(x, self.inv(y))

    def pow(self, x: int, t: int) -> int:
        # 0^0 = 1 by convention
        if t < 0:
            raise ValueError("negative exponent")
        out, base = 1, x
        while t:
            if t & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            t >>= 1
        return out

    def element(self, j: int) -> int:
        if not 0 <= j < self.q:
            raise ValueError(f"element index {j} outside [0, {self.q})")
        return j

    def poly_eval(self, coeffs, x: int) -> int:
        """Evaluate sum(coeffs[t] * x^t)."""
        out = 0
        for c in reversed(coeffs):
            out = self.add(self.mul(out, x), c)
        return out

    # vector ops

    def vadd(self, x, y):
        x, y = np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64)
        return x ^ y if self.binary else (x + y) % self.q

    def vsub(self, x, y):
        x, y = np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64)
        return x ^ y if self.binary else (x - y) % self.q

    def vneg(self, x):
        x = np.asarray(x, dtype=np.int64)
        return x if self.binary else (-x) % self.q

    def vmul(self, x, y):
        x, y = np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64)
        if not self.binary:
            return x * y % self.q
        if self._tables:
            out = self.exp_table[self.log_table[x] + self.log_table[y]]
            return np.where((x == 0) | (y == 0), 0, out)
        return self._vclmul_reduce(x, y)

    def _vclmul_reduce(self, x, y):
        w = self.spec.width
        x, y = np.broadcast_arrays(x, y)
        acc = np.zeros(x.shape, dtype=np.int64)
        for i in range(w):
            acc ^= np.where((y >> i) & 1, x << i, 0)
        for bit in range(2 * w - 2, w - 1, -1):
            acc ^= np.where((acc >> bit) & 1, self.spec.poly << (bit - w), 0)
        return acc

    def scale(self, c: int, x):
        """c * x for scalar c and array x."""
        x = np.asarray(x, dtype=np.int64)
        if c == 0:
            return np.zeros_like(x)
        if c == 1:
            return x.copy()
        if not self.binary:
            return x * c % self.q
        if self._tables:
            out = self.exp_table[self.log_table[x] + self._log[c]]
            return np.where(x == 0, 0, out)
        return self._vclmul_reduce(x, np.int64(c))

    def random(self, rng: np.random.Generator, shape) -> np.ndarray:
        return rng.integers(0, self.q, size=shape, dtype=np.int64)


@lru_cache(maxsize=None)
def get_field(spec: FieldSpec) -> Field:
    return Field(spec)


GF7 = FieldSpec.prime(7)
GF5 = FieldSpec.prime(5)
GF256 = FieldSpec.binary(8)
GF65536 = FieldSpec.binary(16)


@dataclass(frozen=True)
class FieldElement:
    spec: FieldSpec
    value: int

    def __post_init__(self):
        if not 0 <= self.value < self.spec.order:
            raise ValueError(f"{self.value} is not a canonical element of {self.spec}")

    def _check(self, other: FieldElement):
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.spec != self.spec:
            raise FieldMismatchError(f"{self.spec} vs {other.spec}")

    def __add__(self, other):
        return f_add(self, other)

    def __sub__(self, other):
        self._check(other)
        return FieldElement(self.spec, get_field(self.spec).sub(self.value, other.value))

    def __neg__(self):
        return FieldElement(self.spec, get_field(self.spec).neg(self.value))

    def __mul__(self, other):
        return f_mul(self, other)

    def __truediv__(self, other):
        return f_mul(self, f_inv(other))

    def __pow__(self, t: int):
        return f_pow(self, t)

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"FieldElement({self.spec}, {self.value})"


def f_add(x: FieldElement, y: FieldElement) -> FieldElement:
    x._check(y)
    return FieldElement(x.spec, get_field(x.spec).add(x.value, y.value))


def f_mul(x: FieldElement, y: FieldElement) -> FieldElement:
    x._check(y)
    return FieldElement(x.spec, get_field(x.spec).mul(x.value, y.value))


def f_inv(x: FieldElement) -> FieldElement:
    return FieldElement(x.spec, get_field(x.spec).inv(x.value))


def f_pow(x: FieldElement, t: int) -> FieldElement:
    return FieldElement(x.spec, get_field(x.spec).pow(x.value, t))


def enumerate_element(spec: FieldSpec, j: int) -> FieldElement:
    """The element whose canonical encoding is ``j``."""
    return FieldElement(spec, get_field(spec).element(j))
