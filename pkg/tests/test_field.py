import numpy as np
import pytest
from hypothesis import given, strategies as st

from oamds.field import (
    GF5,
    GF7,
    GF256,
    GF65536,
    FieldElement,
    FieldMismatchError,
    FieldSpec,
    enumerate_element,
    f_add,
    f_inv,
    f_mul,
    f_pow,
    get_field,
    is_irreducible,
)
from oracles import log_antilog_tables, schoolbook_gf2_mul


def el(spec, x):
    return FieldElement(spec, x)


def test_prime_examples():
    assert f_add(el(GF7, 3), el(GF7, 5)) == el(GF7, 1)
    assert f_mul(el(GF7, 3), el(GF7, 5)) == el(GF7, (3 * 5) % 7)
    assert f_inv(el(GF7, 3)) == el(GF7, 5)
    assert f_pow(el(GF7, 3), 2) == el(GF7, 9 % 7)
    for x in range(7):
        assert f_add(el(GF7, x), el(GF7, 0)) == el(GF7, x)
        assert f_mul(el(GF7, x), el(GF7, 1)) == el(GF7, x)


def test_binary_examples():
    assert f_add(el(GF256, 0xA5), el(GF256, 0xA5)) == el(GF256, 0)
    assert f_mul(el(GF256, 0x80), el(GF256, 0x02)) == el(GF256, 0x1D)
    exp, log = log_antilog_tables(0x11D, 8)
    assert exp[(log[0x80] + log[0x02]) % 255] == 0x1D


@pytest.mark.parametrize("spec", [GF5, GF7, GF256, GF65536])
def test_zero_power_zero_is_one(spec):
    assert f_pow(enumerate_element(spec, 0), 0).value == 1
    assert f_pow(enumerate_element(spec, 0), 3).value == 0


def test_inverse_of_one():
    for spec in (GF5, GF7, GF256, GF65536):
        assert f_inv(enumerate_element(spec, 1)).value == 1


def test_inverse_of_zero_fails():
    with pytest.raises(ZeroDivisionError):
        f_inv(el(GF7, 0))


def test_gf256_inverse_random():
    rng = np.random.default_rng(7)
    for x in rng.integers(1, 256, size=1000):
        x = el(GF256, int(x))
        assert f_mul(f_inv(x), x).value == 1


def test_mismatched_fields():
    with pytest.raises(FieldMismatchError):
        f_add(el(GF7, 1), el(GF5, 1))
    with pytest.raises(FieldMismatchError):
        el(GF7, 1) * el(GF256, 1)


def test_non_canonical_value_rejected():
    with pytest.raises(ValueError):
        el(GF7, 7)


def test_enumerate():
    assert enumerate_element(GF7, 0).value == 0
    assert enumerate_element(GF7, 5).value == 5
    assert enumerate_element(GF256, 2).value == 0b10
    with pytest.raises(ValueError):
        enumerate_element(GF7, 7)
    assert len({enumerate_element(GF256, j) for j in range(256)}) == 256


@pytest.mark.parametrize("spec,width,poly", [(GF256, 8, 0x11D), (GF65536, 16, 0x1100B)])
def test_mul_matches_schoolbook(spec, width, poly):
    gf = get_field(spec)
    rng = np.random.default_rng(11)
    xs = rng.integers(0, 1 << width, size=2000)
    ys = rng.integers(0, 1 << width, size=2000)
    expect = [schoolbook_gf2_mul(int(x), int(y), poly, width) for x, y in zip(xs, ys)]
    assert [gf.mul(int(x), int(y)) for x, y in zip(xs, ys)] == expect
    assert gf.vmul(xs, ys).tolist() == expect
    assert [int(gf.scale(int(x), ys[j : j + 1])[0]) for j, x in enumerate(xs)] == expect


def test_fermat_all_nonzero():
    for spec in (GF5, GF7, GF256):
        gf = get_field(spec)
        assert all(gf.pow(x, spec.order - 1) == 1 for x in range(1, spec.order))
    gf = get_field(GF65536)
    rng = np.random.default_rng(3)
    assert all(gf.pow(int(x), 65535) == 1 for x in rng.integers(1, 65536, size=300))


def test_spec_validation():
    with pytest.raises(ValueError):
        FieldSpec.prime(9)
    with pytest.raises(ValueError):
        FieldSpec.binary(8, 0x100)  # x^8, reducible
    assert is_irreducible(0x11D) and is_irreducible(0x1100B)
    assert not is_irreducible(0b101)  # x^2 + 1 = (x + 1)^2


@pytest.mark.parametrize("spec", [GF5, GF7, GF256, GF65536, FieldSpec.prime(65521)])
def test_spec_serialization_round_trip(spec):
    raw = spec.to_bytes()
    assert len(raw) == 5
    assert FieldSpec.from_bytes(raw) == spec


def test_spec_serialization_layout():
    assert FieldSpec.prime(7).to_bytes() == bytes([0, 7, 0, 0, 0])
    assert GF256.to_bytes() == bytes([1]) + ((8 << 24) | 0x11D).to_bytes(4, "little")


@given(st.integers(0, 255), st.integers(0, 255), st.integers(0, 255))
def test_gf256_axioms(x, y, z):
    gf = get_field(GF256)
    assert gf.mul(x, gf.mul(y, z)) == gf.mul(gf.mul(x, y), z)
    assert gf.mul(x, gf.add(y, z)) == gf.add(gf.mul(x, y), gf.mul(x, z))
    assert gf.mul(x, y) == gf.mul(y, x)
    if x:
        assert gf.mul(x, gf.inv(x)) == 1


@given(st.integers(0, 65535), st.integers(0, 65535), st.integers(0, 65535))
def test_gf65536_axioms(x, y, z):
    gf = get_field(GF65536)
    assert gf.mul(x, gf.mul(y, z)) == gf.mul(gf.mul(x, y), z)
    assert gf.mul(x, gf.add(y, z)) == gf.add(gf.mul(x, y), gf.mul(x, z))
    if x:
        assert gf.mul(x, gf.inv(x)) == 1
