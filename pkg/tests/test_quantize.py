"""AWGN quantizer: capacity functionals, grids, degrade/upgrade channels."""

import math
import random

import pytest
from scipy import integrate

from polarforge.channel import BmsChannel, InvalidChannelError, pair_capacity
from polarforge.quantize import (
    AwgnSpec,
    awgn_grid,
    c_inverse,
    c_of_lambda,
    degrade_awgn,
    degrade_discrete,
    upgrade_awgn,
)

from conftest import random_channel


def awgn_capacity_numeric(sigma2: float) -> float:
    """High-resolution numeric capacity of the binary-input AWGN channel."""
    norm = 1.0 / math.sqrt(2.0 * math.pi * sigma2)

    def f0(y):
        return norm * math.exp(-((y - 1.0) ** 2) / (2.0 * sigma2))

    def integrand(y):
        p = f0(y)
        q = f0(-y)
        if p + q <= 0.0 or p <= 0.0:
            return 0.0
        return p * math.log2(2.0 * p / (p + q))

    s = math.sqrt(sigma2)
    val, err = integrate.quad(
        integrand, -1.0 - 14.0 * s, 1.0 + 14.0 * s,
        limit=500, epsabs=1e-13, epsrel=1e-13, points=[0.0, 1.0],
    )
    assert err < 1e-9
    return val


# ------------------------------------------------------ capacity functional


def test_c_of_lambda_endpoints():
    assert c_of_lambda(1.0) == 0.0
    assert c_of_lambda(math.inf) == 1.0
    assert c_of_lambda(3.0) == pytest.approx(0.18872, abs=5e-6)


def test_c_of_lambda_matches_pair_capacity():
    rng = random.Random(40)
    for _ in range(100):
        lam = 1.0 + rng.random() * 50.0
        a = lam / (lam + 1.0)
        assert c_of_lambda(lam) == pytest.approx(pair_capacity(a, 1.0 - a), abs=1e-13)


def test_c_of_lambda_increasing():
    xs = [1.0, 1.5, 2.0, 3.0, 10.0, 100.0, 1e6, 1e12]
    cs = [c_of_lambda(x) for x in xs]
    assert cs == sorted(cs)
    assert all(0.0 <= c <= 1.0 for c in cs)


def test_c_of_lambda_rejects_below_one():
    with pytest.raises(ValueError):
        c_of_lambda(0.5)


def test_c_inverse_endpoints_and_roundtrip():
    assert c_inverse(0.0) == 1.0
    assert c_inverse(1.0) == math.inf
    assert c_inverse(0.18872) == pytest.approx(3.0, abs=1e-3)
    rng = random.Random(41)
    for _ in range(50):
        t = rng.random() * 0.9999
        lam = c_inverse(t)
        assert abs(c_of_lambda(lam) - t) <= 1e-12
    with pytest.raises(ValueError):
        c_inverse(-0.1)
    with pytest.raises(ValueError):
        c_inverse(1.1)


# ------------------------------------------------------------------- grid


def test_grid_shape_and_partition():
    spec = AwgnSpec(0.5)
    grid = awgn_grid(spec, 16)
    assert grid.nu == 8
    assert len(grid.boundaries) == 9
    assert grid.boundaries[0] == 0.0
    assert grid.boundaries[-1] == math.inf
    assert list(grid.boundaries) == sorted(grid.boundaries)
    assert len(grid.thetas) == 8
    assert grid.thetas[-1] == math.inf
    # capacity values at interior boundaries hit i/nu
    for i, y in enumerate(grid.boundaries[1:-1], start=1):
        lam = math.exp(2.0 * y / spec.sigma2)
        assert c_of_lambda(lam) == pytest.approx(i / grid.nu, abs=1e-11)
    # total probability over the partition
    total = math.fsum(m0 + m1 for m0, m1 in grid.interval_masses(spec))
    assert total == pytest.approx(1.0, abs=1e-10)


def test_awgn_spec_validation():
    with pytest.raises(InvalidChannelError):
        AwgnSpec(0.0)
    with pytest.raises(InvalidChannelError):
        AwgnSpec(-1.0)


# -------------------------------------------------------- degrade / upgrade


def test_hard_decision_limit():
    # nu = 1: the degraded channel is the hard-decision BSC
    out = degrade_awgn(AwgnSpec(1.0), 2)
    assert len(out) == 1
    phi1 = 0.5 * math.erfc(-1.0 / math.sqrt(2.0))
    assert out.a[0] == pytest.approx(phi1, abs=1e-12)
    assert out.b[0] == pytest.approx(1.0 - phi1, abs=1e-12)
    # nu = 1 upgrade is the perfect channel
    up = upgrade_awgn(AwgnSpec(1.0), 2)
    assert len(up) == 1
    assert up.a[0] == pytest.approx(1.0, abs=1e-12)
    assert up.b[0] == 0.0
    assert up.capacity() == pytest.approx(1.0, abs=1e-12)


def test_quantizer_sandwich_and_loss_bounds():
    for sigma2 in (0.5, 1.0):
        true_i = awgn_capacity_numeric(sigma2)
        for mu in (8, 64):
            spec = AwgnSpec(sigma2)
            lo = degrade_awgn(spec, mu)
            hi = upgrade_awgn(spec, mu)
            lo.validate()
            hi.validate()
            assert len(lo) <= mu // 2 and len(hi) <= mu // 2
            assert lo.capacity() <= true_i + 1e-9
            assert hi.capacity() >= true_i - 1e-9
            assert true_i - lo.capacity() <= 2.0 / mu + 1e-9
            assert hi.capacity() - true_i <= 2.0 / mu + 1e-9


def test_fine_quantizer_tight_gap():
    spec = AwgnSpec(0.1581)
    lo = degrade_awgn(spec, 2000)
    hi = upgrade_awgn(spec, 2000)
    gap = hi.capacity() - lo.capacity()
    assert 0.0 <= gap <= 0.002
    true_i = awgn_capacity_numeric(0.1581)
    assert lo.capacity() <= true_i <= hi.capacity()


def test_noiseless_limit():
    assert degrade_awgn(AwgnSpec(0.01), 4).capacity() > 0.99


def test_gap_never_grows_with_mu():
    spec = AwgnSpec(0.5)
    gaps = []
    for mu in (4, 8, 16, 32):
        gap = upgrade_awgn(spec, mu).capacity() - degrade_awgn(spec, mu).capacity()
        gaps.append(gap)
    for g2, g1 in zip(gaps[1:], gaps):
        assert g2 <= g1 + 1e-12


def test_awgn_rejects_bad_mu():
    with pytest.raises(ValueError):
        degrade_awgn(AwgnSpec(1.0), 3)
    with pytest.raises(ValueError):
        upgrade_awgn(AwgnSpec(1.0), 0)


# ------------------------------------------------------- discrete variant


def test_degrade_discrete_identity_when_small():
    ch = random_channel(random.Random(42), max_pairs=3)
    assert degrade_discrete(ch, 8) is ch


def test_degrade_discrete_bounds():
    rng = random.Random(43)
    for _ in range(40):
        ch = random_channel(rng, max_pairs=12)
        mu = 2 * rng.randint(1, 4)
        out = degrade_discrete(ch, mu)
        out.validate()
        assert len(out) <= max(1, mu // 2)
        assert out.capacity() <= ch.capacity() + 1e-12
        assert ch.capacity() - out.capacity() <= 2.0 / mu + 1e-12
        assert out.error_probability() >= ch.error_probability() - 1e-12
        assert out.bhattacharyya() >= ch.bhattacharyya() - 1e-12
