import struct
import zlib

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oamds import make_params
from oamds.field import GF7, GF256, GF65536
from oamds.storage import (
    HEADER_SIZE,
    ChunkHeader,
    CorruptHeader,
    FileModeError,
    RangeReader,
    TruncatedPayload,
    VersionMismatch,
    coord_ranges,
    read_chunk,
    stripe_file,
    unstripe,
    write_chunk,
)

P8 = make_params(1, 3, 3, 2, 0, GF256)
P16 = make_params(1, 2, 2, 2, 0, GF65536)


def test_empty_file():
    st_ = stripe_file(P8, b"")
    assert st_.shape == (9, 3, 0)
    assert unstripe(P8, st_, 0) == b""


def test_exact_stripe_no_padding():
    data = bytes(range(27))
    st_ = stripe_file(P8, data)
    assert st_.shape == (9, 3, 1)
    assert st_[0, :, 0].tolist() == [0, 1, 2]  # row-major
    assert st_[1, 0, 0] == 3
    assert unstripe(P8, st_, 27) == data


def test_padding_is_zero():
    st_ = stripe_file(P8, b"\xff" * 28)
    assert st_.shape[-1] == 2
    assert st_[..., 1].sum() == 0xFF


def test_gf65536_packs_two_bytes_little_endian():
    st_ = stripe_file(P16, b"\x01\x02")
    assert st_[0, 0, 0] == 0x0201
    data = bytes(range(200))
    assert unstripe(P16, stripe_file(P16, data), 200) == data


def test_prime_field_rejected():
    with pytest.raises(FileModeError):
        stripe_file(make_params(1, 3, 3, 2, 0, GF7), b"abc")


def test_round_trip_many_lengths():
    rng = np.random.default_rng(20)
    for _ in range(1000):
        n = int(rng.integers(0, 400))
        data = rng.integers(0, 256, size=n, dtype=np.uint8).tobytes()
        params = P8 if n % 2 else P16
        assert unstripe(params, stripe_file(params, data), n) == data


@settings(max_examples=50)
@given(st.binary(max_size=300))
def test_round_trip_property(data):
    assert unstripe(P8, stripe_file(P8, data), len(data)) == data


def _write(tmp_path, stripes=2):
    payload = bytes(range(stripes * 9))
    hdr = ChunkHeader(P8, 4, stripes, len(payload), 40)
    path = tmp_path / "node_4.oamc"
    write_chunk(path, hdr, payload)
    return path, hdr, payload


def test_chunk_round_trip(tmp_path):
    path, hdr, payload = _write(tmp_path)
    got_hdr, got_payload = read_chunk(path)
    assert got_hdr == hdr and got_payload == payload
    raw = path.read_bytes()
    assert raw[:4] == b"OAMC" and raw[4] == 1
    assert len(raw) == HEADER_SIZE + len(payload)
    assert [p.name for p in tmp_path.iterdir()] == ["node_4.oamc"]


@pytest.mark.parametrize("offset", [5, 10, 19, 20, 30, HEADER_SIZE - 1])
def test_header_flip_detected(tmp_path, offset):
    path, _, _ = _write(tmp_path)
    raw = bytearray(path.read_bytes())
    raw[offset] ^= 0x40
    path.write_bytes(bytes(raw))
    with pytest.raises(CorruptHeader):
        read_chunk(path)


def test_bad_magic(tmp_path):
    path, _, _ = _write(tmp_path)
    raw = bytearray(path.read_bytes())
    raw[0] = ord("X")
    path.write_bytes(bytes(raw))
    with pytest.raises(CorruptHeader, match="magic"):
        read_chunk(path)


def test_version_mismatch(tmp_path):
    path, _, _ = _write(tmp_path)
    raw = bytearray(path.read_bytes())
    raw[4] = 2
    raw[HEADER_SIZE - 4 : HEADER_SIZE] = struct.pack("<I", zlib.crc32(bytes(raw[: HEADER_SIZE - 4])))
    path.write_bytes(bytes(raw))
    with pytest.raises(VersionMismatch):
        read_chunk(path)


def test_truncated_payload(tmp_path):
    path, _, _ = _write(tmp_path)
    path.write_bytes(path.read_bytes()[:-1])
    with pytest.raises(TruncatedPayload):
        read_chunk(path)


def test_range_reader_logs(tmp_path):
    path, _, payload = _write(tmp_path)
    with RangeReader(path) as rd:
        assert rd.read(3, 2) == payload[3:5]
        assert rd.read(9, 1) == payload[9:10]
        assert rd.log == [(3, 2), (9, 1)]
        with pytest.raises(TruncatedPayload):
            rd.read(17, 2)


def test_coord_ranges():
    assert coord_ranges([0, 3, 6], 1) == [(0, 1), (3, 1), (6, 1)]
    assert coord_ranges([0, 1, 2], 1) == [(0, 3)]
    assert coord_ranges([4, 5, 8], 2) == [(8, 4), (16, 2)]
