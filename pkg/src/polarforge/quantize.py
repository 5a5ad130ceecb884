"""Quantized approximations of the binary-input AWGN channel.

The channel maps a BPSK symbol ±1 to ``y = ±1 + noise`` with noise variance
``sigma2``.  Its likelihood ratio on the positive half-line is
``lambda(y) = exp(2 y / sigma2)``, which increases with ``y``, so any
partition of ``[0, inf)`` into intervals yields a finite-output channel.
Here the interval boundaries are chosen so that the normalized symmetric
capacity ``c_of_lambda`` sweeps ``[0, 1]`` in equal steps: merging an
interval to a single output (degrading) or pretending the whole interval
sits at its best likelihood ratio (upgrading) then moves the channel
capacity by at most one step, giving a two-sided bracket that tightens
like ``1 / mu``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import BmsChannel, InvalidChannelError, pair_capacity

__all__ = [
    "AwgnSpec",
    "QuantizerGrid",
    "awgn_grid",
    "c_of_lambda",
    "c_inverse",
    "degrade_awgn",
    "upgrade_awgn",
    "degrade_discrete",
]

_SQRT2 = math.sqrt(2.0)
_MASS_FLOOR = 1e-300


@dataclass(frozen=True)
class AwgnSpec:
    """Binary-input AWGN channel with unit signal power and given noise variance."""

    sigma2: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.sigma2) and self.sigma2 > 0.0):
            raise InvalidChannelError(f"noise variance must be positive, got {self.sigma2!r}")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)


def c_of_lambda(lam: float) -> float:
    """Symmetric capacity of a single pair with likelihood ratio ``lam >= 1``."""
    if not lam >= 1.0:
        raise ValueError(f"likelihood ratio must be >= 1, got {lam!r}")
    if math.isinf(lam):
        return 1.0
    return (
        1.0
        - (lam / (lam + 1.0)) * math.log2(1.0 + 1.0 / lam)
        - (1.0 / (lam + 1.0)) * math.log2(1.0 + lam)
    )


def c_inverse(target: float) -> float:
    """Smallest likelihood ratio whose capacity reaches ``target``.

    Bisection on the increasing map ``c_of_lambda``; the result satisfies
    ``|c_of_lambda(result) - target| <= 1e-12`` (exact at the endpoints).
    """
    if not 0.0 <= target <= 1.0:
        raise ValueError(f"capacity target must lie in [0, 1], got {target!r}")
    if target == 0.0:
        return 1.0
    if target == 1.0:
        return math.inf
    lo, hi = 1.0, 2.0
    while c_of_lambda(hi) < target:
        lo, hi = hi, hi * 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        c = c_of_lambda(mid)
        if abs(c - target) <= 1e-13:
            return mid
        if c < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class QuantizerGrid:
    """Capacity-uniform partition of the positive observation half-line.

    ``boundaries`` has ``nu + 1`` entries running ``0, y_1, ..., inf``;
    interval ``i`` (1-based) is ``[boundaries[i-1], boundaries[i])`` and
    ``thetas[i-1]`` is the likelihood ratio at its upper end.
    """

    nu: int
    boundaries: tuple[float, ...]
    thetas: tuple[float, ...]

    def interval_masses(self, spec: AwgnSpec) -> list[tuple[float, float]]:
        """Per-interval probabilities (under each input) of landing there.

        Entry ``i`` is ``(P[y in A_i | +1], P[y in A_i | -1])``.
        """
        s = spec.sigma
        out = []
        for lo, hi in zip(self.boundaries, self.boundaries[1:]):
            m0 = _gauss_mass(lo, hi, 1.0, s)
            m1 = _gauss_mass(lo, hi, -1.0, s)
            out.append((m0, m1))
        return out


def _gauss_mass(lo: float, hi: float, mean: float, sigma: float) -> float:
    """P[lo <= N(mean, sigma^2) < hi] via complementary error functions."""
    zl = (lo - mean) / (sigma * _SQRT2)
    zh = (hi - mean) / (sigma * _SQRT2)
    return max(0.0, 0.5 * (math.erfc(zl) - math.erfc(zh)))


def _validate_mu(mu: int) -> int:
    if not isinstance(mu, int) or mu < 2 or mu % 2:
        raise ValueError(f"output budget must be an even integer >= 2, got {mu!r}")
    return mu // 2


def awgn_grid(spec: AwgnSpec, mu: int) -> QuantizerGrid:
    """Capacity-uniform grid with ``mu // 2`` intervals for the given channel."""
    nu = _validate_mu(mu)
    thetas = [c_inverse(i / nu) for i in range(1, nu + 1)]
    boundaries = [0.0]
    for theta in thetas:
        boundaries.append(math.inf if math.isinf(theta) else spec.sigma2 * math.log(theta) / 2.0)
    return QuantizerGrid(nu=nu, boundaries=tuple(boundaries), thetas=tuple(thetas))


def degrade_awgn(spec: AwgnSpec, mu: int) -> BmsChannel:
    """Degraded finite approximation: each grid interval becomes one output."""
    grid = awgn_grid(spec, mu)
    items = []
    for m0, m1 in grid.interval_masses(spec):
        hi, lo = (m0, m1) if m0 >= m1 else (m1, m0)
        if hi + lo < _MASS_FLOOR:
            continue
        items.append((hi, lo))
    return BmsChannel._from_items(items)


def upgrade_awgn(spec: AwgnSpec, mu: int) -> BmsChannel:
    """Upgraded finite approximation: each interval plays its top likelihood ratio.

    The interval mass ``pi`` is split as ``(theta pi / (theta + 1), pi / (theta + 1))``
    so the pair's ratio equals the best ratio seen inside the interval, which can
    only help the decoder.
    """
    grid = awgn_grid(spec, mu)
    items = []
    for (m0, m1), theta in zip(grid.interval_masses(spec), grid.thetas):
        pi = m0 + m1
        if pi < _MASS_FLOOR:
            continue
        if math.isinf(theta):
            items.append((pi, 0.0))
        else:
            items.append((theta * pi / (theta + 1.0), pi / (theta + 1.0)))
    return BmsChannel._from_items(items)


def degrade_discrete(ch: BmsChannel, mu: int) -> BmsChannel:
    """Degrade an already-finite channel by pooling pairs of similar quality.

    Pairs whose normalized capacity falls in the same of ``mu // 2`` equal bins
    are merged; the capacity loss is at most one bin width, ``2 / mu``.  Unlike
    the greedy merge this is a single pass, useful as a cheap preconditioner.
    """
    nu = _validate_mu(mu)
    if len(ch) <= nu:
        return ch
    sums: dict[int, tuple[float, float]] = {}
    for hi, lo in ch.pairs:
        cn = pair_capacity(hi, lo) / (hi + lo)
        k = min(int(nu * cn), nu - 1)
        sa, sb = sums.get(k, (0.0, 0.0))
        sums[k] = (sa + hi, sb + lo)
    return BmsChannel._from_items(list(sums.values()))
