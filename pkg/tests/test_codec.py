import itertools

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from oamds import DecodeError, ErasurePattern, decode, encode, make_params, syndrome
from oamds.field import GF7, GF65536
from oracles import dense_parity_check, random_codewords


def test_zero_codeword(example_params):
    p = example_params
    assert not syndrome(p, np.zeros((p.l, p.n), dtype=np.int64)).any()
    assert not encode(p, np.zeros((p.l, p.k), dtype=np.int64)).any()


def test_encode_has_zero_syndrome(example_params):
    cw = random_codewords(example_params, 1000, seed=0)
    assert not syndrome(example_params, cw).any()


def test_encode_is_systematic(group_params):
    p = group_params
    rng = np.random.default_rng(5)
    data = p.gf.random(rng, (p.l, p.k))
    assert np.array_equal(encode(p, data)[:, : p.k], data)


def test_single_cell_flip_detected(example_params):
    p = example_params
    cw = random_codewords(p, 1, seed=1)[..., 0]
    for a in range(p.l):
        for i in range(p.n):
            bad = cw.copy()
            bad[a, i] = (bad[a, i] + 3) % 7
            assert syndrome(p, bad).any()


def test_encode_linear(example_params):
    p, gf = example_params, example_params.gf
    rng = np.random.default_rng(2)
    for _ in range(20):
        x, y = gf.random(rng, (p.l, p.k)), gf.random(rng, (p.l, p.k))
        assert np.array_equal(gf.vadd(encode(p, x), encode(p, y)), encode(p, gf.vadd(x, y)))


def test_unit_data_matches_dense_oracle(example_params):
    p = example_params
    h = sympy.Matrix(dense_parity_check(p).tolist())
    kl = p.k * p.l
    h_data, h_par = h[:, :kl], h[:, kl:]
    x = sympy.zeros(kl, 1)
    x[0] = 1  # node 1, coordinate 0
    parity = (-(h_par.inv_mod(7)) * h_data * x).applyfunc(lambda e: e % 7)
    data = np.zeros((p.l, p.k), dtype=np.int64)
    data[0, 0] = 1
    cw = encode(p, data)
    got = [int(cw[b, i]) for i in range(p.k, p.n) for b in range(p.l)]
    assert got == [int(e) for e in parity]


def test_decode_identity(example_params):
    cw = random_codewords(example_params, 1, seed=3)[..., 0]
    assert np.array_equal(decode(example_params, ErasurePattern.erase(cw, [])), cw)


def test_decode_worked_subset(example_params):
    cw = random_codewords(example_params, 100, seed=4)
    out = decode(example_params, ErasurePattern.erase(cw, {1, 2, 5}))
    assert np.array_equal(out, cw)


def test_decode_every_r_subset_small(small_params):
    p = small_params
    cw = random_codewords(p, 20, seed=5)
    subsets = list(itertools.combinations(range(1, p.n + 1), p.r))
    assert len(subsets) == 6
    for sub in subsets:
        assert np.array_equal(decode(p, ErasurePattern.erase(cw, sub)), cw)


def test_decode_recovers_parity_like_encode(group_params):
    p = group_params
    rng = np.random.default_rng(6)
    data = p.gf.random(rng, (p.l, p.k, 10))
    cw = encode(p, data)
    out = decode(p, ErasurePattern.erase(cw, range(p.k + 1, p.n + 1)))
    assert np.array_equal(out, cw)


def test_decode_too_many_erasures(example_params):
    cw = random_codewords(example_params, 1, seed=7)[..., 0]
    with pytest.raises(DecodeError):
        decode(example_params, ErasurePattern.erase(cw, {1, 2, 3, 4}))


def test_decode_inconsistent(example_params):
    cw = random_codewords(example_params, 1, seed=8)[..., 0]
    pat = ErasurePattern.erase(cw, {1})
    pat.cells[0, 5] = (pat.cells[0, 5] + 1) % 7
    with pytest.raises(DecodeError):
        decode(example_params, pat)


def test_decode_bad_shape(example_params):
    with pytest.raises(DecodeError):
        decode(example_params, ErasurePattern(np.zeros((9, 5), dtype=np.int64), frozenset()))


def test_gf65536_round_trip():
    p = make_params(1, 2, 2, 2, 0, GF65536)
    cw = random_codewords(p, 5, seed=9)
    assert not syndrome(p, cw).any()
    assert np.array_equal(decode(p, ErasurePattern.erase(cw, {1, 4})), cw)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_decode_random_patterns(data):
    p = make_params(1, 2, 3, 3, 0, GF7)
    seed = data.draw(st.integers(0, 2**32 - 1))
    erased = data.draw(st.sets(st.integers(1, p.n), max_size=p.r))
    cw = random_codewords(p, 2, seed)
    assert np.array_equal(decode(p, ErasurePattern.erase(cw, erased)), cw)
