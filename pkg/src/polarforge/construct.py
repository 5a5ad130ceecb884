"""Bit-channel bounds for polar codes over arbitrary symmetric channels.

Each of the ``n = 2^m`` bit channels is obtained from the root channel by a
chain of minus/plus transforms chosen by the bits of its index (most
significant bit first).  Keeping the full chain is intractable, so every
transform is followed by a size-capped merge: degrading merges yield a
channel provably worse than the true bit channel, upgrading merges one
provably better, and together they bracket the quantities that matter for
code design (error probability, capacity, Bhattacharyya parameter).

A third, cheaper upper bound tracks the Bhattacharyya recursion alongside
the degraded chain and takes the better of the two at every step; it never
loses to the plain degraded bound.

``sweep_all`` evaluates the whole index range in one depth-first pass over
the tree of intermediate channels, so each distinct channel is built once
(2n - 2 transform+merge steps) while holding only one root-to-leaf path in
memory.  Subtrees whose channel has collapsed to the exactly perfect or
exactly useless fixed point are filled in closed form.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .channel import BmsChannel
from .merge import degrading_merge, upgrading_merge
from .transforms import transform_minus, transform_plus

__all__ = [
    "BitIndex",
    "ChannelBounds",
    "BoundsTable",
    "ConstructionResult",
    "degrade_bit_channel",
    "upgrade_bit_channel",
    "pe_upper_bound",
    "sweep_all",
    "select_info_set",
    "classify_by_threshold",
    "exact_bit_channel",
    "write_bounds",
    "read_bounds",
    "write_frozen",
    "read_frozen",
]

# Closed-form fills for saturated subtrees; module-level so tests can
# disable them and compare against the plain recursion.
_saturate = True

_MODES = frozenset({"degrade", "upgrade", "pe_upper"})


@dataclass(frozen=True)
class BitIndex:
    """Bit-channel index inside a code of length ``2^m``."""

    i: int
    m: int

    def __post_init__(self) -> None:
        if self.m < 0 or not 0 <= self.i < (1 << self.m):
            raise ValueError(f"index {self.i} out of range for m={self.m}")

    @property
    def bits(self) -> tuple[int, ...]:
        """Index bits, most significant first; 0 picks minus, 1 picks plus."""
        return tuple((self.i >> (self.m - 1 - j)) & 1 for j in range(self.m))

    @classmethod
    def from_bits(cls, bits) -> "BitIndex":
        i = 0
        for b in bits:
            if b not in (0, 1):
                raise ValueError(f"bits must be 0 or 1, got {b!r}")
            i = (i << 1) | b
        return cls(i, len(bits))


@dataclass(frozen=True)
class ChannelBounds:
    """Bracketing quantities for one bit channel (NaN where not computed)."""

    index: BitIndex
    pe_upper: float
    pe_lower: float
    pe_degraded: float
    i_lower: float
    i_upper: float
    z_upper: float


@dataclass
class BoundsTable:
    """Per-index bound columns for a full sweep; NaN marks absent modes.

    ``pe_degraded``/``i_lower`` come from the degraded chain, ``pe_lower``/
    ``i_upper`` from the upgraded chain, and ``pe_upper``/``z_upper`` from
    the degraded chain tightened by the tracked Bhattacharyya recursion.
    """

    n: int
    mu: int
    pe_upper: np.ndarray
    pe_lower: np.ndarray
    pe_degraded: np.ndarray
    i_lower: np.ndarray
    i_upper: np.ndarray
    z_upper: np.ndarray

    @classmethod
    def empty(cls, n: int, mu: int) -> "BoundsTable":
        return cls(
            n=n,
            mu=mu,
            pe_upper=np.full(n, math.nan),
            pe_lower=np.full(n, math.nan),
            pe_degraded=np.full(n, math.nan),
            i_lower=np.full(n, math.nan),
            i_upper=np.full(n, math.nan),
            z_upper=np.full(n, math.nan),
        )

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> ChannelBounds:
        if not 0 <= i < self.n:
            raise IndexError(i)
        m = self.n.bit_length() - 1
        return ChannelBounds(
            index=BitIndex(i, m),
            pe_upper=float(self.pe_upper[i]),
            pe_lower=float(self.pe_lower[i]),
            pe_degraded=float(self.pe_degraded[i]),
            i_lower=float(self.i_lower[i]),
            i_upper=float(self.i_upper[i]),
            z_upper=float(self.z_upper[i]),
        )

    def __iter__(self):
        return (self[i] for i in range(self.n))


@dataclass(frozen=True)
class ConstructionResult:
    """Chosen information set plus the bound sums that certify it."""

    n: int
    k: int
    info_set: tuple[int, ...]
    frozen_set: tuple[int, ...]
    union_bound: float
    pe_lower_sum: float
    rate: float


# ------------------------------------------------------------------ drivers


def degrade_bit_channel(w: BmsChannel, mu: int, idx: BitIndex) -> BmsChannel:
    """Size-capped degraded stand-in for bit channel ``idx`` of root ``w``."""
    q = degrading_merge(w, mu)
    for b in idx.bits:
        t = transform_plus(q) if b else transform_minus(q)
        q = degrading_merge(t, mu)
    return q


def upgrade_bit_channel(w: BmsChannel, mu: int, idx: BitIndex) -> BmsChannel:
    """Size-capped upgraded stand-in for bit channel ``idx`` of root ``w``."""
    q = upgrading_merge(w, mu)
    for b in idx.bits:
        t = transform_plus(q) if b else transform_minus(q)
        q = upgrading_merge(t, mu)
    return q


def pe_upper_bound(w: BmsChannel, mu: int, idx: BitIndex) -> float:
    """Error-probability upper bound from the degraded chain with a tracked
    Bhattacharyya recursion; never worse than the plain degraded bound."""
    z = w.bhattacharyya()
    q = degrading_merge(w, mu)
    for b in idx.bits:
        if b:
            t = transform_plus(q)
            z = z * z
        else:
            t = transform_minus(q)
            z = min(t.bhattacharyya(), 2.0 * z - z * z)
        q = degrading_merge(t, mu)
    return min(q.error_probability(), z)


# -------------------------------------------------------------------- sweep


def sweep_all(w: BmsChannel, mu: int, m: int, modes=("degrade", "pe_upper", "upgrade")) -> BoundsTable:
    """Evaluate all ``2^m`` bit channels in one shared pass per side."""
    modeset = frozenset(modes)
    unknown = modeset - _MODES
    if unknown:
        raise ValueError(f"unknown sweep modes: {sorted(unknown)}")
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    table = BoundsTable.empty(n=1 << m, mu=mu)
    want_deg = "degrade" in modeset
    want_pe = "pe_upper" in modeset
    if want_deg or want_pe:
        z0 = w.bhattacharyya() if want_pe else 0.0
        _degrade_walk(table, degrading_merge(w, mu), z0, 0, table.n, mu, want_deg, want_pe)
    if "upgrade" in modeset:
        _upgrade_walk(table, upgrading_merge(w, mu), 0, table.n, mu)
    return table


def _useless_z_fill(z0: float, size: int) -> np.ndarray:
    """Bhattacharyya recursion under a subtree pinned at the useless channel.

    The channel itself is a fixed point with Bhattacharyya parameter exactly
    1, so only the tracked scalar keeps evolving; children interleave as
    (minus, plus) blocks, which the strided writes reproduce.
    """
    zs = np.array([z0])
    while zs.size < size:
        nxt = np.empty(zs.size * 2)
        nxt[0::2] = np.minimum(1.0, 2.0 * zs - zs * zs)
        nxt[1::2] = zs * zs
        zs = nxt
    return zs


def _degrade_walk(table, q, z, base, size, mu, want_deg, want_pe) -> None:
    if size == 1:
        if want_deg:
            table.pe_degraded[base] = q.error_probability()
            table.i_lower[base] = q.capacity()
        if want_pe:
            table.pe_upper[base] = min(q.error_probability(), z)
            table.z_upper[base] = min(q.bhattacharyya(), z)
        return
    if _saturate and len(q) == 1:
        a0, b0 = q.a[0], q.b[0]
        sl = slice(base, base + size)
        if a0 == 1.0 and b0 == 0.0:
            if want_deg:
                table.pe_degraded[sl] = 0.0
                table.i_lower[sl] = 1.0
            if want_pe:
                table.pe_upper[sl] = 0.0
                table.z_upper[sl] = 0.0
            return
        if a0 == 0.5 and b0 == 0.5:
            if want_deg:
                table.pe_degraded[sl] = 0.5
                table.i_lower[sl] = 0.0
            if want_pe:
                zv = _useless_z_fill(z, size)
                table.pe_upper[sl] = np.minimum(0.5, zv)
                table.z_upper[sl] = np.minimum(1.0, zv)
            return
    half = size >> 1
    t = transform_minus(q)
    zm = min(t.bhattacharyya(), 2.0 * z - z * z) if want_pe else 0.0
    _degrade_walk(table, degrading_merge(t, mu), zm, base, half, mu, want_deg, want_pe)
    t = transform_plus(q)
    _degrade_walk(table, degrading_merge(t, mu), z * z, base + half, half, mu, want_deg, want_pe)


def _upgrade_walk(table, q, base, size, mu) -> None:
    if size == 1:
        table.pe_lower[base] = q.error_probability()
        table.i_upper[base] = q.capacity()
        return
    if _saturate and len(q) == 1:
        a0, b0 = q.a[0], q.b[0]
        sl = slice(base, base + size)
        if a0 == 1.0 and b0 == 0.0:
            table.pe_lower[sl] = 0.0
            table.i_upper[sl] = 1.0
            return
        if a0 == 0.5 and b0 == 0.5:
            table.pe_lower[sl] = 0.5
            table.i_upper[sl] = 0.0
            return
    half = size >> 1
    _upgrade_walk(table, upgrading_merge(transform_minus(q), mu), base, half, mu)
    _upgrade_walk(table, upgrading_merge(transform_plus(q), mu), base + half, half, mu)


# --------------------------------------------------------------- selection


def select_info_set(bounds: BoundsTable, *, k: int | None = None, budget: float | None = None) -> ConstructionResult:
    """Pick information bits by ascending ``pe_upper`` (ties to low index).

    Exactly one of ``k`` (fixed dimension) and ``budget`` (largest set whose
    bound sum stays strictly below the budget) must be given.
    """
    if (k is None) == (budget is None):
        raise ValueError("exactly one of k= and budget= must be given")
    n = bounds.n
    pe = bounds.pe_upper
    if np.isnan(pe).any():
        raise ValueError("selection needs pe_upper bounds for every index")
    order = np.argsort(pe, kind="stable")
    if k is not None:
        if not 0 <= k <= n:
            raise ValueError(f"k must lie in [0, {n}], got {k}")
        chosen = order[:k]
    else:
        if math.isnan(budget):
            raise ValueError("budget must be a number")
        running = np.cumsum(pe[order])
        chosen = order[: int(np.searchsorted(running, budget, side="left"))]
    info = np.sort(chosen)
    mask = np.ones(n, dtype=bool)
    mask[info] = False
    frozen = np.nonzero(mask)[0]
    union = math.fsum(pe[info].tolist())
    if np.isnan(bounds.pe_lower).any():
        lower_sum = math.nan
    else:
        lower_sum = math.fsum(bounds.pe_lower[info].tolist())
    kk = int(info.size)
    return ConstructionResult(
        n=n,
        k=kk,
        info_set=tuple(info.tolist()),
        frozen_set=tuple(frozen.tolist()),
        union_bound=union,
        pe_lower_sum=lower_sum,
        rate=kk / n,
    )


def classify_by_threshold(bounds: BoundsTable, threshold: float):
    """Split indices into (good, bad, undecided) against a per-channel target.

    Good means the upper bound already meets the target; bad means even the
    lower bound misses it; anything else cannot be resolved at this fidelity.
    """
    pe_u = bounds.pe_upper
    pe_l = bounds.pe_lower
    if np.isnan(pe_u).any() or np.isnan(pe_l).any():
        raise ValueError("classification needs both pe_upper and pe_lower")
    good = pe_u <= threshold
    bad = pe_l > threshold
    undecided = ~(good | bad)
    return (
        tuple(np.nonzero(good)[0].tolist()),
        tuple(np.nonzero(bad)[0].tolist()),
        tuple(np.nonzero(undecided)[0].tolist()),
    )


# ------------------------------------------------------- brute-force oracle


def _bit_reverse(k: int, m: int) -> int:
    r = 0
    for _ in range(m):
        r = (r << 1) | (k & 1)
        k >>= 1
    return r


def _arikan_map(bits) -> list[int]:
    """Codeword bits for one input vector: bit-reversal permutation followed
    by the in-place XOR butterfly, widest blocks first."""
    n = len(bits)
    m = n.bit_length() - 1
    x = [bits[_bit_reverse(j, m)] for j in range(n)]
    size = n
    while size > 1:
        half = size >> 1
        for start in range(0, n, size):
            for j in range(start, start + half):
                x[j] ^= x[j + half]
        size = half
    return x


def exact_bit_channel(w: BmsChannel, idx: BitIndex) -> BmsChannel:
    """Brute-force bit channel by enumerating every (output, prior-bits)
    tuple; exponential in both n and the alphabet, so only a test oracle."""
    m, i = idx.m, idx.i
    n = 1 << m
    syms = w.symbols()
    ny = len(syms)
    if m > 3 or ny**n * (1 << n) > (1 << 26):
        raise ValueError("brute-force bit channel needs m <= 3 and a small alphabet")
    t0 = np.array([s[0] for s in syms])
    t1 = np.array([s[1] for s in syms])
    tx = (t0, t1)
    acc0: dict[tuple, np.ndarray] = {}
    acc1: dict[tuple, np.ndarray] = {}
    for u in range(1 << n):
        bits = tuple((u >> (n - 1 - j)) & 1 for j in range(n))
        x = _arikan_map(bits)
        p = tx[x[0]]
        for xk in x[1:]:
            p = np.multiply.outer(p, tx[xk])
        p = p.ravel()
        acc = acc1 if bits[i] else acc0
        key = bits[:i]
        if key in acc:
            acc[key] = acc[key] + p
        else:
            acc[key] = p
    scale = 0.5 ** (n - 1)
    pairs: list[tuple[float, float]] = []
    for key in sorted(acc0):
        p0 = (acc0[key] * scale).tolist()
        p1 = (acc1[key] * scale).tolist()
        pairs.extend(zip(p0, p1))
    return BmsChannel.from_pairs(pairs)


# ------------------------------------------------------------- file formats

_BOUNDS_HEADER = re.compile(r"#bounds v1 n=(\d+) mu=(\d+)$")
_FROZEN_HEADER = re.compile(r"#frozen v1 n=(\d+) k=(\d+)$")


def write_bounds(table: BoundsTable, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"#bounds v1 n={table.n} mu={table.mu}\n")
        for i in range(table.n):
            fh.write(
                f"{i}\t{table.pe_upper[i]:.6e}\t{table.pe_lower[i]:.6e}"
                f"\t{table.i_lower[i]:.6e}\t{table.i_upper[i]:.6e}\n"
            )


def read_bounds(path) -> BoundsTable:
    with open(path) as fh:
        header = fh.readline().rstrip("\n")
        match = _BOUNDS_HEADER.match(header)
        if not match:
            raise ValueError(f"not a bounds file: {header!r}")
        n, mu = int(match.group(1)), int(match.group(2))
        table = BoundsTable.empty(n=n, mu=mu)
        count = 0
        for line in fh:
            fields = line.split("\t")
            if len(fields) != 5:
                raise ValueError(f"malformed bounds row: {line!r}")
            i = int(fields[0])
            table.pe_upper[i] = float(fields[1])
            table.pe_lower[i] = float(fields[2])
            table.i_lower[i] = float(fields[3])
            table.i_upper[i] = float(fields[4])
            count += 1
        if count != n:
            raise ValueError(f"expected {n} rows, found {count}")
    return table


def write_frozen(result: ConstructionResult, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"#frozen v1 n={result.n} k={result.k}\n")
        for i in result.frozen_set:
            fh.write(f"{i}\n")


def read_frozen(path) -> tuple[int, tuple[int, ...]]:
    with open(path) as fh:
        header = fh.readline().rstrip("\n")
        match = _FROZEN_HEADER.match(header)
        if not match:
            raise ValueError(f"not a frozen-set file: {header!r}")
        n, k = int(match.group(1)), int(match.group(2))
        frozen = tuple(int(line) for line in fh if line.strip())
    if len(frozen) != n - k:
        raise ValueError(f"expected {n - k} frozen indices, found {len(frozen)}")
    if any(not 0 <= i < n for i in frozen) or list(frozen) != sorted(frozen):
        raise ValueError("frozen indices must be ascending and in range")
    return n, frozen
