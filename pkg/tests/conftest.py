"""Shared helpers for the test suite."""

import math
import random

from polarforge.channel import BmsChannel


def random_channel(rng: random.Random, max_pairs: int = 6, p_inf: float = 0.2) -> BmsChannel:
    """A random canonical BMS channel with up to `max_pairs` conjugate pairs.

    With probability `p_inf` the last generated pair gets b = 0 so that
    LR = infinity paths are exercised too.
    """
    npairs = rng.randint(1, max_pairs)
    items = []
    for i in range(npairs):
        x = rng.uniform(0.05, 1.0)
        y = rng.uniform(0.0, x)
        if i == npairs - 1 and rng.random() < p_inf:
            y = 0.0
        items.append((x, y))
    total = math.fsum(x + y for x, y in items)
    return BmsChannel([(x / total, y / total) for x, y in items])


def entropy2(p: float) -> float:
    """Binary entropy h2(p) in bits."""
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)
