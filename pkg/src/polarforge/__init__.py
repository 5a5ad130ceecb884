"""polarforge: polar-code construction for BMS channels.

Every polar bit-channel is sandwiched between a degraded and an upgraded
finite approximation, giving provable two-sided bounds on its error
probability; the information set is chosen from those bounds.  Includes a
quantizer for the binary-input AWGN channel, a successive-cancellation
codec for validation, and a CLI.
"""

from .channel import (
    BmsChannel,
    ChannelError,
    ConsistencyError,
    InvalidChannelError,
    SymbolPair,
    bec,
    bsc,
    pair_capacity,
    parse_preset,
)

__version__ = "0.1.0"

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
    "__version__",
]
