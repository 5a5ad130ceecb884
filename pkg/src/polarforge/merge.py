"""Alphabet reduction for BMS channels.

Two reducers map a channel with many conjugate pairs onto one with at most
nu = mu/2 pairs:

* `degrading_merge` repeatedly adds the masses of the adjacent pair whose
  merge costs the least capacity.  The result is degraded with respect to
  the input (everything gets worse: capacity down, error probability and
  Bhattacharyya up).

* `upgrading_merge` redistributes pairs' masses onto neighbours of higher
  and lower likelihood ratio.  The result is upgraded (everything gets
  better), so together the two reducers bracket the original channel.

Both run in O(L log L) using a doubly-linked pair list plus a lazy
min-heap: stale heap entries are skipped via per-element version counters
instead of being moved inside the heap.  Ties in the capacity delta break
toward the smallest LR (leftmost) element so results are reproducible.
"""

from __future__ import annotations

import heapq
import math

from .channel import BmsChannel, pair_capacity

__all__ = [
    "degrading_merge",
    "delta_capacity_closed_form",
    "merge_delta_capacity",
    "upgrade_step_pairwise",
    "upgrade_step_triple",
    "upgrading_merge",
]

# Flipped on by tests: validates the workspace invariants after every
# mutation (heap/list consistency).  Far too slow for production sweeps.
_selfcheck = False


def _validate_mu(mu) -> int:
    if mu != int(mu) or int(mu) < 2 or int(mu) % 2:
        raise ValueError(f"mu must be an even integer >= 2, got {mu!r}")
    return int(mu) // 2


def merge_delta_capacity(a1: float, b1: float, a2: float, b2: float) -> float:
    """Capacity lost by mass-adding pair (a1,b1) into pair (a2,b2)."""
    return (
        pair_capacity(a1, b1)
        + pair_capacity(a2, b2)
        - pair_capacity(a1 + a2, b1 + b2)
    )


# --------------------------------------------------------------- degrading


def degrading_merge(ch: BmsChannel, mu: int) -> BmsChannel:
    """Reduce `ch` to at most mu/2 conjugate pairs, degrading it.

    Greedy: always merge the adjacent pair with the smallest capacity
    loss.  Channels that already fit are returned unchanged.
    """
    nu = _validate_mu(mu)
    n = len(ch)
    if n <= nu:
        return ch
    a = list(ch.a)
    b = list(ch.b)
    nxt = list(range(1, n)) + [-1]
    prv = [-1] + list(range(n - 1))
    alive = [True] * n
    ver = [0] * n
    heap = [
        (merge_delta_capacity(a[i], b[i], a[i + 1], b[i + 1]), i, 0)
        for i in range(n - 1)
    ]
    heapq.heapify(heap)
    count = n
    while count > nu:
        d, i, v = heapq.heappop(heap)
        if not alive[i] or v != ver[i]:
            continue
        j = nxt[i]
        if j == -1:
            continue
        a[i] += a[j]
        b[i] += b[j]
        alive[j] = False
        ver[j] += 1
        nj = nxt[j]
        nxt[i] = nj
        if nj != -1:
            prv[nj] = i
        count -= 1
        ver[i] += 1
        if nj != -1:
            heapq.heappush(
                heap, (merge_delta_capacity(a[i], b[i], a[nj], b[nj]), i, ver[i])
            )
        p = prv[i]
        if p != -1:
            ver[p] += 1
            heapq.heappush(
                heap, (merge_delta_capacity(a[p], b[p], a[i], b[i]), p, ver[p])
            )
        if _selfcheck:
            _check_workspace(a, b, nxt, prv, alive, ver, heap, count, 0)
    items = []
    i = 0  # the head never dies: merges always eat the right member
    while i != -1:
        items.append((a[i], b[i]))
        i = nxt[i]
    return BmsChannel._from_items(items)


# ---------------------------------------------------------------- upgrading


def _pairwise_gain(a1: float, b1: float, at: float, bt: float) -> tuple[float, float]:
    """Mass (a1+b1) split in the target's LR proportion (exact for bt == 0).

    The target is normalized first so neither factor can overflow or lose
    precision when the two pairs carry masses at very different scales.
    """
    s = a1 + b1
    denom = at + bt
    return (at / denom) * s, (bt / denom) * s


def upgrade_step_pairwise(ch: BmsChannel, i: int) -> BmsChannel:
    """Promote pair i onto pair i+1 (the higher-LR neighbour).

    The whole mass of pair i lands on pair i+1, split so the target's LR
    is unchanged.  Used when the two LRs are too close for the three-way
    split to be numerically meaningful.
    """
    n = len(ch)
    if not 0 <= i < n - 1:
        raise IndexError(f"pair index {i} out of range for {n} pairs")
    ga, gb = _pairwise_gain(ch.a[i], ch.b[i], ch.a[i + 1], ch.b[i + 1])
    items = []
    for t in range(n):
        if t == i:
            continue
        if t == i + 1:
            items.append((ch.a[t] + ga, ch.b[t] + gb))
        else:
            items.append((ch.a[t], ch.b[t]))
    return BmsChannel._from_items(items)


def upgrade_step_triple(ch: BmsChannel, i: int) -> BmsChannel:
    """Dissolve pair i+1, splitting its mass onto pairs i and i+2.

    The split leaves both neighbours' LRs unchanged and conserves mass;
    it is the tightest single-pair upgrade when the three LRs are
    strictly increasing.
    """
    n = len(ch)
    if not 0 <= i < n - 2:
        raise IndexError(f"triple start {i} out of range for {n} pairs")
    al, bl = ch.a[i], ch.b[i]
    ar, br = ch.a[i + 2], ch.b[i + 2]
    t1, t3 = _triple_split(
        al, bl, ch.a[i + 1], ch.b[i + 1], ar, br, strict=True
    )
    sl = al + bl
    sr = ar + br
    items = []
    for t in range(n):
        if t == i:
            items.append((al + (al / sl) * t1, bl + (bl / sl) * t1))
        elif t == i + 1:
            continue
        elif t == i + 2:
            items.append((ar + (ar / sr) * t3, br + (br / sr) * t3))
        else:
            items.append((ch.a[t], ch.b[t]))
    return BmsChannel._from_items(items)


def _triple_split(al, bl, am, bm, ar, br, strict=False):
    """Masses sent left/right when the middle pair dissolves, or None.

    Works on per-pair normalized components so the cross products stay in
    a sane floating range no matter how small the pair masses are (raw
    products of two ~1e-160 pairs would land in the subnormal range and
    the quotients would be garbage).  The split depends only on the three
    LRs and the middle mass, so normalizing changes nothing algebraically.
    Returns None when the outer LRs are too degenerate to separate (the
    caller then promotes the middle pairwise); with strict=True raises
    instead.
    """
    sl = al + bl
    sm = am + bm
    sr = ar + br
    nal, nbl = al / sl, bl / sl
    nam, nbm = am / sm, bm / sm
    nar, nbr = ar / sr, br / sr
    den = nar * nbl - nal * nbr
    if den <= 0.0:
        if strict:
            raise ValueError(
                "triple step needs strictly increasing LRs; merge pairwise instead"
            )
        return None
    num1 = nar * nbm - nam * nbr
    num3 = nam * nbl - nal * nbm
    if num1 < 0.0:
        num1 = 0.0
    if num3 < 0.0:
        num3 = 0.0
    return sm * (num1 / den), sm * (num3 / den)


def _upgrade_candidate(a, b, l, j, r):
    """Capacity increase and neighbour gains for dissolving interior pair j.

    Returns (delta, ga_l, gb_l, ga_r, gb_r).  The normalized kernel covers
    the infinite-LR right neighbour without a special branch; if the outer
    LRs have degenerated to equality, falls back to promoting j wholesale
    onto its right neighbour.
    """
    al, bl = a[l], b[l]
    am, bm = a[j], b[j]
    ar, br = a[r], b[r]
    split = _triple_split(al, bl, am, bm, ar, br)
    if split is not None:
        t1, t3 = split
        sl = al + bl
        sr = ar + br
        g1a = (al / sl) * t1
        g1b = (bl / sl) * t1
        g3a = (ar / sr) * t3
        g3b = (br / sr) * t3
        delta = (
            pair_capacity(al + g1a, bl + g1b)
            + pair_capacity(ar + g3a, br + g3b)
            - pair_capacity(al, bl)
            - pair_capacity(am, bm)
            - pair_capacity(ar, br)
        )
        return delta, g1a, g1b, g3a, g3b
    ga, gb = _pairwise_gain(am, bm, ar, br)
    delta = pair_capacity(ar + ga, br + gb) - pair_capacity(am, bm) - pair_capacity(ar, br)
    return delta, 0.0, 0.0, ga, gb


def upgrading_merge(ch: BmsChannel, mu: int, eps: float = 1e-3) -> BmsChannel:
    """Reduce `ch` to at most mu/2 conjugate pairs, upgrading it.

    First a preliminary pass promotes away pairs whose LR is within a
    factor 1+eps of the next pair (re-scanning from the lowest affected
    index after each promotion); then interior pairs are dissolved onto
    their neighbours, cheapest capacity increase first.
    """
    nu = _validate_mu(mu)
    if not eps > 0.0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    n = len(ch)
    if n <= nu:
        return ch
    a = list(ch.a)
    b = list(ch.b)
    nxt = list(range(1, n)) + [-1]
    prv = [-1] + list(range(n - 1))
    alive = [True] * n
    count = n
    head = 0

    # preliminary pass: collapse near-equal LR ratios (cross-product form
    # of LR_next < (1+eps) * LR_this on normalized pairs, robust against
    # b -> 0 and against masses small enough that raw products underflow)
    one_pe = 1.0 + eps
    i = head
    while True:
        j = nxt[i]
        if j == -1:
            break
        si = a[i] + b[i]
        sj = a[j] + b[j]
        if (a[j] / sj) * (b[i] / si) < one_pe * ((a[i] / si) * (b[j] / sj)):
            ga, gb = _pairwise_gain(a[i], b[i], a[j], b[j])
            a[j] += ga
            b[j] += gb
            alive[i] = False
            p = prv[i]
            prv[j] = p
            if p == -1:
                head = j
            else:
                nxt[p] = j
            count -= 1
            i = p if p != -1 else j
        else:
            i = j

    if count > nu:
        ver = [0] * n
        heap = []
        t = nxt[head]
        while t != -1 and nxt[t] != -1:
            delta, g1a, g1b, g3a, g3b = _upgrade_candidate(a, b, prv[t], t, nxt[t])
            heap.append((delta, t, 0, g1a, g1b, g3a, g3b))
            t = nxt[t]
        heapq.heapify(heap)
        while count > nu:
            if count == 2:  # no interior pair left (only reachable when nu == 1)
                j = nxt[head]
                ga, gb = _pairwise_gain(a[head], b[head], a[j], b[j])
                a[j] += ga
                b[j] += gb
                alive[head] = False
                prv[j] = -1
                head = j
                count -= 1
                continue
            d, j, v, g1a, g1b, g3a, g3b = heapq.heappop(heap)
            if not alive[j] or v != ver[j]:
                continue
            l = prv[j]
            r = nxt[j]
            a[l] += g1a
            b[l] += g1b
            a[r] += g3a
            b[r] += g3b
            alive[j] = False
            ver[j] += 1
            nxt[l] = r
            prv[r] = l
            count -= 1
            # only these two windows changed; other deltas are invariant
            # because every surviving pair keeps its LR
            for t in (l, r):
                ver[t] += 1
                p, nn = prv[t], nxt[t]
                if p != -1 and nn != -1:
                    delta, h1a, h1b, h3a, h3b = _upgrade_candidate(a, b, p, t, nn)
                    heapq.heappush(heap, (delta, t, ver[t], h1a, h1b, h3a, h3b))
            if _selfcheck:
                _check_workspace(a, b, nxt, prv, alive, ver, heap, count, head)

    items = []
    i = head
    while i != -1:
        items.append((a[i], b[i]))
        i = nxt[i]
    return BmsChannel._from_items(items)


# --------------------------------------------------- closed-form capacity


def _g(l: float) -> float:
    return l * math.log2(1.0 + 1.0 / l) + math.log2(1.0 + l)


def delta_capacity_closed_form(l1: float, l2: float, pi2: float, l3: float) -> float:
    """Capacity increase of dissolving a middle pair, in closed form.

    The middle pair has LR l2 and total mass pi2; its mass moves onto
    neighbours of LRs l1 <= l2 <= l3 (l3 may be infinite).  Depends on the
    neighbours only through their LRs, which is what makes the lazy
    candidate heap in `upgrading_merge` sound; this function is kept as an
    independent cross-check and is not used inside the merge loop.
    """
    if not (1.0 <= l1 <= l2 <= l3):
        raise ValueError(f"need 1 <= l1 <= l2 <= l3, got {l1!r}, {l2!r}, {l3!r}")
    if pi2 < 0.0:
        raise ValueError(f"pi2 must be nonnegative, got {pi2!r}")
    if pi2 == 0.0 or l1 == l3 or math.isinf(l2):
        return 0.0
    if math.isinf(l3):
        return pi2 / (l2 + 1.0) * (_g(l2) - _g(l1))
    bracket = (l3 - l2) * _g(l1) + (l2 - l1) * _g(l3) + (l1 - l3) * _g(l2)
    return pi2 / ((l2 + 1.0) * (l1 - l3)) * bracket


# ------------------------------------------------------------- selfcheck


def _check_workspace(a, b, nxt, prv, alive, ver, heap, count, head):
    """Debug invariants: list/LR order, link symmetry, heap consistency."""
    seen = 0
    i = head
    last = -1
    while i != -1:
        assert alive[i], f"dead pair {i} reachable"
        assert prv[i] == last, f"prv[{i}] broken"
        if last != -1:
            # LR order along the list (tolerate tie-level rounding);
            # normalized so tiny masses cannot underflow the products
            sl = a[last] + b[last]
            si = a[i] + b[i]
            assert (a[last] / sl) * (b[i] / si) <= (a[i] / si) * (b[last] / sl) * (1.0 + 1e-9) + 1e-300
        last = i
        seen += 1
        i = nxt[i]
    assert seen == count, f"count {count} != reachable {seen}"
    for k in range(len(heap)):
        left, right = 2 * k + 1, 2 * k + 2
        if left < len(heap):
            assert heap[k][:3] <= heap[left][:3], "heap property broken"
        if right < len(heap):
            assert heap[k][:3] <= heap[right][:3], "heap property broken"
    current = {}
    for entry in heap:
        d, j, v = entry[0], entry[1], entry[2]
        if alive[j] and v == ver[j]:
            assert j not in current, f"duplicate current entry for {j}"
            current[j] = d
    i = head
    while i != -1:
        if prv[i] != -1 and nxt[i] != -1:
            assert i in current, f"live interior pair {i} missing from heap"
        i = nxt[i]
