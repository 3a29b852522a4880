"""Chunk files and file striping.

A chunk file holds one node's column for every stripe of a file::

    magic "OAMC" | version u8 | params (14 bytes) | node u16 | stripe_count u64
    | payload_length u64 | file_length u64 | header_crc32 u32 | payload

All integers are little-endian; the CRC covers every header byte before it.
The payload is stripe-major, coordinate-ascending, ``bytes_per_symbol``
bytes per symbol (GF(2^16) symbols are 2 bytes, little-endian).
"""

from __future__ import annotations

import os
import struct
import tempfile
import zlib
from dataclasses import dataclass

import numpy as np

from .code import PARAMS_SIZE, CodeParams
from .field import BINARY

MAGIC = b"OAMC"
VERSION = 1
_FIXED = struct.Struct("<4sB")
_TAIL = struct.Struct("<HQQQ")
HEADER_SIZE = _FIXED.size + PARAMS_SIZE + _TAIL.size + 4


class ChunkError(IOError):
    pass


class CorruptHeader(ChunkError):
    pass


class VersionMismatch(ChunkError):
    pass


class TruncatedPayload(ChunkError):
    pass


class FileModeError(ValueError):
    pass


def bytes_per_symbol(params: CodeParams) -> int:
    spec = params.field
    if spec.kind != BINARY or spec.width not in (8, 16):
        raise FileModeError(f"file mode needs GF(2^8) or GF(2^16), not {spec}")
    return spec.width // 8


@dataclass(frozen=True)
class ChunkHeader:
    params: CodeParams
    node: int
    stripe_count: int
    payload_length: int
    file_length: int

    def pack(self) -> bytes:
        body = _FIXED.pack(MAGIC, VERSION) + self.params.to_bytes()
        body += _TAIL.pack(self.node, self.stripe_count, self.payload_length, self.file_length)
        return body + struct.pack("<I", zlib.crc32(body))

    @classmethod
    def unpack(cls, raw: bytes) -> ChunkHeader:
        if len(raw) < HEADER_SIZE:
            raise CorruptHeader(f"header is {len(raw)} bytes, expected {HEADER_SIZE}")
        raw = raw[:HEADER_SIZE]
        magic, version = _FIXED.unpack_from(raw)
        if magic != MAGIC:
            raise CorruptHeader(f"bad magic {magic!r}")
        (crc,) = struct.unpack_from("<I", raw, HEADER_SIZE - 4)
        if zlib.crc32(raw[:-4]) != crc:
            raise CorruptHeader("header CRC mismatch")
        if version != VERSION:
            raise VersionMismatch(f"chunk version {version}, expected {VERSION}")
        try:
            params = CodeParams.from_bytes(raw[_FIXED.size : _FIXED.size + PARAMS_SIZE])
        except ValueError as exc:
            raise CorruptHeader(f"bad code parameters: {exc}") from exc
        node, stripes, plen, flen = _TAIL.unpack_from(raw, _FIXED.size + PARAMS_SIZE)
        hdr = cls(params, node, stripes, plen, flen)
        if plen != stripes * params.l * bytes_per_symbol(params):
            raise CorruptHeader("payload length disagrees with stripe count")
        return hdr


def symbols_to_bytes(params: CodeParams, symbols) -> bytes:
    dtype = "<u1" if bytes_per_symbol(params) == 1 else "<u2"
    return np.asarray(symbols).astype(dtype).tobytes()


def bytes_to_symbols(params: CodeParams, raw: bytes) -> np.ndarray:
    dtype = "<u1" if bytes_per_symbol(params) == 1 else "<u2"
    return np.frombuffer(raw, dtype=dtype).astype(np.int64)


def write_chunk(path, header: ChunkHeader, payload: bytes):
    """Write atomically (temporary file in the same directory, then rename)."""
    if len(payload) != header.payload_length:
        raise ValueError("payload length disagrees with header")
    path = os.fspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path) or ".", prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(header.pack())
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_header(path) -> ChunkHeader:
    with open(path, "rb") as fh:
        return ChunkHeader.unpack(fh.read(HEADER_SIZE))


def read_chunk(path) -> tuple[ChunkHeader, bytes]:
    with open(path, "rb") as fh:
        header = ChunkHeader.unpack(fh.read(HEADER_SIZE))
        payload = fh.read()
    if len(payload) < header.payload_length:
        raise TruncatedPayload(f"{path}: payload has {len(payload)} of {header.payload_length} bytes")
    if len(payload) > header.payload_length:
        raise CorruptHeader(f"{path}: {len(payload) - header.payload_length} trailing bytes")
    return header, payload


class RangeReader:
    """Reads byte ranges of a chunk payload with pread and records each one."""

    def __init__(self, path):
        self.path = path
        self.header = read_header(path)
        self.log: list[tuple[int, int]] = []  # (payload offset, length)
        self._fd = os.open(path, os.O_RDONLY)

    def read(self, offset: int, length: int) -> bytes:
        if offset + length > self.header.payload_length:
            raise TruncatedPayload(f"{self.path}: read past end of payload")
        data = os.pread(self._fd, length, HEADER_SIZE + offset)
        if len(data) != length:
            raise TruncatedPayload(f"{self.path}: short read at payload offset {offset}")
        self.log.append((offset, length))
        return data

    def close(self):
        os.close(self._fd)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def coord_ranges(coords, bps: int) -> list[tuple[int, int]]:
    """Merge sorted coordinates into (byte offset, byte length) runs within one stripe."""
    runs = []
    for a in sorted(coords):
        if runs and runs[-1][0] + runs[-1][1] == a:
            runs[-1][1] += 1
        else:
            runs.append([a, 1])
    return [(a * bps, cnt * bps) for a, cnt in runs]


# striping


def stripe_count(params: CodeParams, nbytes: int) -> int:
    per = params.k * params.l * bytes_per_symbol(params)
    return -(-nbytes // per)


def stripe_file(params: CodeParams, data: bytes) -> np.ndarray:
    """Pack bytes row-major into ``(l, k, stripes)`` data cells, zero-padding the last stripe."""
    bps = bytes_per_symbol(params)
    count = stripe_count(params, len(data))
    per = params.k * params.l * bps
    buf = bytes(data) + bytes(count * per - len(data))
    syms = bytes_to_symbols(params, buf).reshape(count, params.l, params.k)
    return np.ascontiguousarray(np.moveaxis(syms, 0, -1))


def unstripe(params: CodeParams, stripes, length: int) -> bytes:
    arr = np.moveaxis(np.asarray(stripes), -1, 0)
    return symbols_to_bytes(params, arr.reshape(-1))[:length]
