"""Canonical representation of binary-input memoryless symmetric channels.

A BMS channel is stored through half its output alphabet: the symmetry
involution pairs every output y with a conjugate y', and the pair is fully
described by the two masses (a, b) = (W(y|0), W(y'|0)) with the
representative chosen so that a >= b.  Pairs are kept sorted by likelihood
ratio a/b, pairs with exactly equal ratio are coalesced (this loses
nothing), and the masses of the half alphabet sum to one.
"""

from __future__ import annotations

import functools
import math
from typing import Iterable, NamedTuple

__all__ = [
    "BmsChannel",
    "ChannelError",
    "ConsistencyError",
    "InvalidChannelError",
    "SymbolPair",
    "bec",
    "bsc",
    "pair_capacity",
    "parse_preset",
]

# |sum - 1| below this is ignored; between the two we rescale; above the
# looser bound the channel is considered corrupt.
_DRIFT_IGNORE = 1e-12
_DRIFT_RESCALE = 1e-9


class ChannelError(Exception):
    """Base class for channel-model errors."""


class InvalidChannelError(ChannelError, ValueError):
    """Raised when ingested channel data is malformed."""


class ConsistencyError(ChannelError, RuntimeError):
    """Raised when an internal invariant (e.g. mass normalization) breaks."""


class SymbolPair(NamedTuple):
    """One conjugate output pair: a = W(y|0), b = W(y'|0), with a >= b."""

    a: float
    b: float

    @property
    def lr(self) -> float:
        """Likelihood ratio a/b; infinity when b == 0."""
        return self.a / self.b if self.b > 0.0 else math.inf


def pair_capacity(a: float, b: float) -> float:
    """Capacity contribution C(a, b) of one conjugate pair, in bits.

    C(a, b) = -(a+b)*log2((a+b)/2) + a*log2(a) + b*log2(b), with the usual
    convention 0*log2(0) = 0.  C(a, 0) reduces to a, and C(x, x) to 0.
    """
    if b <= 0.0:
        return a
    if a <= 0.0:
        return b
    s = a + b
    return a * math.log2(a) + b * math.log2(b) - s * (math.log2(s) - 1.0)


def _ratio_key(p: tuple[float, float]) -> float:
    return p[0] / p[1] if p[1] > 0.0 else math.inf


def _cross_cmp(p: tuple[float, float], q: tuple[float, float]) -> int:
    # LR(p) < LR(q)  <=>  p.a*q.b < q.a*p.b  (exact products, no division)
    d = p[0] * q[1] - q[0] * p[1]
    return -1 if d < 0.0 else (1 if d > 0.0 else 0)


def _coalesce(sorted_items: list[tuple[float, float]]) -> list[tuple[float, float]]:
    out: list[tuple[float, float]] = []
    for x, y in sorted_items:
        if out:
            px, py = out[-1]
            if px * y == x * py:  # exactly equal LR
                out[-1] = (px + x, py + y)
                continue
        out.append((x, y))
    return out


def _is_cross_sorted(items: list[tuple[float, float]]) -> bool:
    for t in range(len(items) - 1):
        if items[t][0] * items[t + 1][1] > items[t + 1][0] * items[t][1]:
            return False
    return True


def _canonical_items(items: Iterable[tuple[float, float]]) -> list[tuple[float, float]]:
    """Sort half-pairs by LR, coalesce equal-LR pairs, drop zero-mass pairs."""
    kept = [p for p in items if p[0] + p[1] > 0.0]
    kept.sort(key=_ratio_key)
    out = _coalesce(kept)
    if not _is_cross_sorted(out):
        # The float ratio key can mis-order pairs in overflow/denormal
        # regimes; redo the sort with exact cross-product comparisons.
        kept.sort(key=functools.cmp_to_key(_cross_cmp))
        out = _coalesce(kept)
    return out


class BmsChannel:
    """A BMS channel in canonical half-alphabet form.

    Parameters
    ----------
    items : iterable of (a, b)
        One entry per conjugate output pair.  Entries are reoriented so
        a >= b, zero-mass entries dropped, equal-LR entries coalesced and
        the result sorted by likelihood ratio.  The total mass must be 1
        within 1e-9.

    Notes
    -----
    Instances are immutable; every operation on them returns a fresh
    channel.  `a` and `b` are parallel tuples of floats, ordered by
    ascending LR, and are the representation all transforms and merges
    work on.
    """

    __slots__ = ("a", "b")

    a: tuple[float, ...]
    b: tuple[float, ...]

    def __init__(self, items: Iterable[tuple[float, float]]):
        oriented = []
        for x, y in items:
            if not (math.isfinite(x) and math.isfinite(y)) or x < 0.0 or y < 0.0:
                raise InvalidChannelError(f"bad probability pair ({x!r}, {y!r})")
            oriented.append((x, y) if x >= y else (y, x))
        total = math.fsum(x + y for x, y in oriented)
        if abs(total - 1.0) > _DRIFT_RESCALE:
            raise InvalidChannelError(f"half-alphabet mass is {total!r}, expected 1")
        ch = BmsChannel._from_items(oriented)
        self.a = ch.a
        self.b = ch.b

    @classmethod
    def _from_items(cls, items: Iterable[tuple[float, float]]) -> "BmsChannel":
        """Trusted constructor: items already satisfy a >= b per entry."""
        out = _canonical_items(items)
        if not out:
            raise InvalidChannelError("channel has no probability mass")
        total = math.fsum(x + y for x, y in out)
        err = total - 1.0
        if err > _DRIFT_IGNORE or err < -_DRIFT_IGNORE:
            if abs(err) > _DRIFT_RESCALE:
                raise ConsistencyError(f"probability mass drifted to {total!r}")
            out = [(x / total, y / total) for x, y in out]
        ch = object.__new__(cls)
        ch.a = tuple(x for x, _ in out)
        ch.b = tuple(y for _, y in out)
        return ch

    @classmethod
    def _from_arrays(cls, a, b) -> "BmsChannel":
        """Trusted vectorized canonicalizer for large alphabets.

        `a`, `b` are parallel numpy float64 arrays with a >= b per entry
        (the transforms guarantee this).  Semantics match _from_items.
        """
        import numpy as np

        keep = (a + b) > 0.0
        if not keep.all():
            a = a[keep]
            b = b[keep]
        if a.size == 0:
            raise InvalidChannelError("channel has no probability mass")
        with np.errstate(divide="ignore"):
            ratio = np.where(b > 0.0, a / np.where(b > 0.0, b, 1.0), np.inf)
        order = np.argsort(ratio, kind="stable")
        a = a[order]
        b = b[order]
        if a.size > 1:
            same = (a[:-1] * b[1:]) == (a[1:] * b[:-1])
            if same.any():
                starts = np.flatnonzero(np.concatenate(([True], ~same)))
                a = np.add.reduceat(a, starts)
                b = np.add.reduceat(b, starts)
            if np.any(a[:-1] * b[1:] > a[1:] * b[:-1]):
                # pathological rounding; redo with exact comparisons
                return cls._from_items(list(zip(a.tolist(), b.tolist())))
        total = float(a.sum() + b.sum())
        err = total - 1.0
        if err > _DRIFT_IGNORE or err < -_DRIFT_IGNORE:
            if abs(err) > _DRIFT_RESCALE:
                raise ConsistencyError(f"probability mass drifted to {total!r}")
            a = a / total
            b = b / total
        ch = object.__new__(cls)
        ch.a = tuple(a.tolist())
        ch.b = tuple(b.tolist())
        return ch

    @classmethod
    def from_pairs(cls, raw: Iterable[tuple[float, float]]) -> "BmsChannel":
        """Build a channel from a full output alphabet.

        Parameters
        ----------
        raw : iterable of (p0, p1)
            W(y|0) and W(y|1) for *every* output symbol y.  Conjugate
            symbols must both be listed; a symbol with p0 == p1 may stand
            alone (erasure-like output, its own conjugate), in which case
            its mass is split into two conjugate halves.

        Raises
        ------
        InvalidChannelError
            On negative masses or totals off from 1 by more than 1e-9.
        """
        halves = []
        s0 = 0.0
        s1 = 0.0
        for p0, p1 in raw:
            if not (math.isfinite(p0) and math.isfinite(p1)) or p0 < 0.0 or p1 < 0.0:
                raise InvalidChannelError(f"bad symbol masses ({p0!r}, {p1!r})")
            s0 += p0
            s1 += p1
            if p0 + p1 == 0.0:
                continue
            hi, lo = (p0, p1) if p0 >= p1 else (p1, p0)
            # Each listed symbol carries half of its conjugate pair; the
            # conjugate's own listing (or the erasure split) supplies the
            # other half, and equal-LR coalescing reassembles them.
            halves.append((0.5 * hi, 0.5 * lo))
        if abs(s0 - 1.0) > _DRIFT_RESCALE or abs(s1 - 1.0) > _DRIFT_RESCALE:
            raise InvalidChannelError(
                f"symbol masses must each sum to 1 (got {s0!r} given 0, {s1!r} given 1)"
            )
        return cls._from_items(halves)

    # -- scalar functionals -------------------------------------------------

    def error_probability(self) -> float:
        """Error probability of the ML single-use decision, sum of the b_i."""
        return math.fsum(self.b)

    def bhattacharyya(self) -> float:
        """Bhattacharyya parameter Z = 2 * sum_i sqrt(a_i * b_i)."""
        return 2.0 * math.fsum(math.sqrt(x * y) for x, y in zip(self.a, self.b))

    def capacity(self) -> float:
        """Symmetric capacity in bits per channel use."""
        return math.fsum(pair_capacity(x, y) for x, y in zip(self.a, self.b))

    # -- views --------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.a)

    @property
    def pairs(self) -> tuple[SymbolPair, ...]:
        return tuple(SymbolPair(x, y) for x, y in zip(self.a, self.b))

    def lr(self, i: int) -> float:
        """Likelihood ratio of pair i (infinity when b_i == 0)."""
        return self.a[i] / self.b[i] if self.b[i] > 0.0 else math.inf

    def symbols(self) -> list[tuple[float, float]]:
        """Full output alphabet as (W(y|0), W(y|1)) rows, conjugates adjacent."""
        out = []
        for x, y in zip(self.a, self.b):
            out.append((x, y))
            out.append((y, x))
        return out

    def validate(self) -> None:
        """Assert every canonical-form invariant; used by tests."""
        if len(self.a) != len(self.b) or not self.a:
            raise ConsistencyError("empty or ragged channel")
        for x, y in zip(self.a, self.b):
            if not (x >= y >= 0.0) or x + y <= 0.0:
                raise ConsistencyError(f"non-canonical pair ({x!r}, {y!r})")
        for t in range(len(self.a) - 1):
            # strictly increasing LR via cross products
            if self.a[t] * self.b[t + 1] >= self.a[t + 1] * self.b[t]:
                raise ConsistencyError(f"pairs {t},{t+1} not in strict LR order")
        total = math.fsum(x + y for x, y in zip(self.a, self.b))
        if abs(total - 1.0) > _DRIFT_IGNORE:
            raise ConsistencyError(f"mass {total!r} out of tolerance")

    # -- serialization ------------------------------------------------------

    def to_text(self) -> str:
        """Render in the `#bms v1` text format (round-trips exactly)."""
        lines = [f"#bms v1 pairs={len(self)}"]
        lines.extend(f"{x:.17g}\t{y:.17g}" for x, y in zip(self.a, self.b))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BmsChannel":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("#bms v1"):
            raise InvalidChannelError("missing '#bms v1' header")
        header = lines[0]
        try:
            declared = int(header.split("pairs=")[1].split()[0])
        except (IndexError, ValueError) as exc:
            raise InvalidChannelError(f"bad header {header!r}") from exc
        rows = []
        for ln in lines[1:]:
            fields = ln.split()
            if len(fields) != 2:
                raise InvalidChannelError(f"bad channel row {ln!r}")
            try:
                rows.append((float(fields[0]), float(fields[1])))
            except ValueError as exc:
                raise InvalidChannelError(f"bad channel row {ln!r}") from exc
        if len(rows) != declared:
            raise InvalidChannelError(f"header declares {declared} pairs, found {len(rows)}")
        return cls(rows)

    def __repr__(self) -> str:
        head = ", ".join(f"({x:.6g}, {y:.6g})" for x, y in zip(self.a[:4], self.b[:4]))
        tail = ", ..." if len(self) > 4 else ""
        return f"BmsChannel[{len(self)} pairs: {head}{tail}]"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BmsChannel):
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self) -> int:
        return hash((self.a, self.b))


def bsc(p: float) -> BmsChannel:
    """Binary symmetric channel with crossover probability p."""
    if not 0.0 <= p <= 1.0:
        raise InvalidChannelError(f"BSC crossover must be in [0, 1], got {p!r}")
    return BmsChannel([(1.0 - p, p)])


def bec(e: float) -> BmsChannel:
    """Binary erasure channel with erasure probability e.

    The self-conjugate erasure output is carried as two conjugate symbols
    of mass e/2 each, so BEC(e) has pairs [(e/2, e/2), (1-e, 0)].
    """
    if not 0.0 <= e <= 1.0:
        raise InvalidChannelError(f"BEC erasure must be in [0, 1], got {e!r}")
    return BmsChannel([(0.5 * e, 0.5 * e), (1.0 - e, 0.0)])


def parse_preset(text: str) -> BmsChannel:
    """Parse `bsc:<p>` / `bec:<e>` preset strings (AWGN is handled upstream)."""
    kind, sep, arg = text.partition(":")
    if not sep:
        raise InvalidChannelError(f"not a channel preset: {text!r}")
    try:
        value = float(arg)
    except ValueError as exc:
        raise InvalidChannelError(f"bad preset parameter in {text!r}") from exc
    if kind == "bsc":
        return bsc(value)
    if kind == "bec":
        return bec(value)
    raise InvalidChannelError(f"unknown channel preset kind {kind!r}")
