"""Encoder, successive-cancellation decoder, and the simulation harness."""

import math
import random

import numpy as np
import pytest

from polarforge.channel import bec, bsc
from polarforge.codec import PolarCode, SimReport, encode, sc_decode, simulate, wilson_upper_95
from polarforge.codec import _butterfly
from polarforge.construct import _arikan_map, select_info_set, sweep_all


def full_rate(n):
    return PolarCode(n=n, frozen_set=())


# ------------------------------------------------------------------- codes


def test_polar_code_shape():
    code = PolarCode(n=8, frozen_set=(0, 1, 2, 4))
    assert code.k == 4
    assert code.info_set == (3, 5, 6, 7)


def test_polar_code_validation():
    with pytest.raises(ValueError):
        PolarCode(n=3, frozen_set=())
    with pytest.raises(ValueError):
        PolarCode(n=4, frozen_set=(4,))
    with pytest.raises(ValueError):
        PolarCode(n=4, frozen_set=(1, 1))
    with pytest.raises(ValueError):
        PolarCode(n=4, frozen_set=(2, 1))


def test_code_from_construction_result():
    table = sweep_all(bsc(0.11), 8, 3)
    result = select_info_set(table, k=4)
    code = PolarCode.from_result(result)
    assert code.n == 8 and code.k == 4
    assert code.frozen_set == result.frozen_set


# ----------------------------------------------------------------- encoder


def test_encode_two_bit_kernel():
    code = full_rate(2)
    for u0, u1 in ((0, 0), (0, 1), (1, 0), (1, 1)):
        x = encode(code, [u0, u1])
        assert x.tolist() == [u0 ^ u1, u1]


def test_encode_all_zero():
    code = PolarCode(n=16, frozen_set=(0, 1, 2, 3))
    assert encode(code, [0] * 12).tolist() == [0] * 16


def test_encode_matches_bruteforce_map():
    rng = random.Random(60)
    for m in (2, 3, 4):
        n = 1 << m
        code = full_rate(n)
        for _ in range(10):
            u = [rng.randint(0, 1) for _ in range(n)]
            assert encode(code, u).tolist() == _arikan_map(tuple(u))


def test_butterfly_is_involution():
    rng = np.random.default_rng(61)
    batch = rng.integers(0, 2, size=(5, 32), dtype=np.uint8)
    assert np.array_equal(_butterfly(_butterfly(batch.copy())), batch)


def test_encode_rejects_wrong_length():
    code = PolarCode(n=4, frozen_set=(0,))
    with pytest.raises(ValueError):
        encode(code, [1, 0])


# ----------------------------------------------------------------- decoder


def test_noiseless_roundtrip():
    rng = random.Random(62)
    for n in (4, 8, 32):
        for _ in range(8):
            frozen = tuple(sorted(rng.sample(range(n), rng.randint(0, n - 1))))
            code = PolarCode(n=n, frozen_set=frozen)
            msg = [rng.randint(0, 1) for _ in range(code.k)]
            x = encode(code, msg)
            llrs = np.where(x == 0, 20.0, -20.0)
            assert sc_decode(code, llrs).tolist() == msg


def test_noiseless_roundtrip_infinite_llrs():
    code = PolarCode(n=8, frozen_set=(0, 1, 4))
    msg = [1, 0, 1, 1, 0]
    x = encode(code, msg)
    llrs = np.where(x == 0, math.inf, -math.inf)
    assert sc_decode(code, llrs).tolist() == msg


def test_total_erasure_decodes_to_zero():
    # every tie resolves to 0, so the all-zero message comes back
    code = PolarCode(n=8, frozen_set=(0, 3))
    assert sc_decode(code, np.zeros(8)).tolist() == [0] * 6


def test_single_flip_protected_by_frozen_bits():
    # n=4 k=1 code: both codewords are constant words, four observations
    # apart, so one flipped observation can never throw off the decoder
    code = PolarCode(n=4, frozen_set=(0, 1, 2))
    for msg in ([0], [1]):
        x = encode(code, msg)
        clean = np.where(x == 0, 4.0, -4.0)
        for pos in range(4):
            llrs = clean.copy()
            llrs[pos] = -llrs[pos]
            assert sc_decode(code, llrs).tolist() == msg


def test_decode_rejects_wrong_length():
    code = PolarCode(n=4, frozen_set=(0,))
    with pytest.raises(ValueError):
        sc_decode(code, np.zeros(8))


# -------------------------------------------------------------- simulation


def test_wilson_upper_frozen_values():
    assert wilson_upper_95(100, 10) == pytest.approx(0.17436566150491348, rel=1e-12)
    assert wilson_upper_95(1000, 0) == pytest.approx(0.003826758485555124, rel=1e-12)
    # zero successes still leaves an upper bound above zero
    assert wilson_upper_95(50, 0) > 0.0


def test_simulate_is_deterministic():
    code = PolarCode(n=16, frozen_set=tuple(range(8)))
    r1 = simulate(code, "bsc:0.05", trials=500, seed=7)
    r2 = simulate(code, "bsc:0.05", trials=500, seed=7)
    assert isinstance(r1, SimReport)
    assert r1 == r2
    assert r1.trials == 500
    assert r1.estimated_bler == r1.block_errors / 500
    assert r1.wilson_upper_95 == wilson_upper_95(500, r1.block_errors)


def test_simulate_validates_arguments():
    code = PolarCode(n=4, frozen_set=(0,))
    with pytest.raises(ValueError):
        simulate(code, "bsc:0.1", trials=0, seed=1)
    with pytest.raises(ValueError):
        simulate(code, "laplace:0.1", trials=10, seed=1)
    with pytest.raises(ValueError):
        simulate(code, "bsc:1.5", trials=10, seed=1)


def test_simulate_bec_respects_union_bound():
    table = sweep_all(bec(0.5), 8, 3)
    result = select_info_set(table, budget=0.1)
    assert 0 < result.k < 8
    code = PolarCode.from_result(result)
    report = simulate(code, "bec:0.5", trials=4000, seed=11, union_bound=result.union_bound)
    assert report.union_bound == result.union_bound
    assert report.estimated_bler <= report.union_bound


def test_simulate_noiseless_awgn():
    code = PolarCode(n=16, frozen_set=tuple(range(8)))
    report = simulate(code, "awgn:0.01", trials=300, seed=3)
    assert report.block_errors == 0


def test_simulate_batching_invariance():
    # results must not depend on how trials split into decode batches
    import polarforge.codec as codec_mod
    code = PolarCode(n=8, frozen_set=(0, 1, 2))
    full = simulate(code, "bsc:0.2", trials=700, seed=9)
    old = codec_mod._SIM_BATCH
    try:
        codec_mod._SIM_BATCH = 64
        split = simulate(code, "bsc:0.2", trials=700, seed=9)
    finally:
        codec_mod._SIM_BATCH = old
    assert full == split
