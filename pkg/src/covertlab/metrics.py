"""Entropy, covertness and capacity metrics for covert channels."""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np


def _counts(symbols: Sequence[Hashable]) -> np.ndarray:
    if len(symbols) == 0:
        raise ValueError("entropy of an empty sequence is undefined")
    return np.fromiter(Counter(symbols).values(), dtype=float)


def shannon_entropy(symbols: Sequence[Hashable]) -> float:
    """Empirical Shannon entropy in bits per symbol, ``-sum p log2 p``.

    >>> round(shannon_entropy("network"), 4)
    2.8074
    """
    counts = _counts(symbols)
    p = counts / counts.sum()
    h = float(-(p * np.log2(p)).sum())
    return h if h > 0 else 0.0  # constant input gives -0.0


def min_code_bits(symbols: Sequence[Hashable]) -> int:
    """Fixed-length code size for the whole sequence: ceil(log2 distinct) bits per symbol."""
    distinct = len(_counts(symbols))
    per_symbol = math.ceil(math.log2(distinct)) if distinct > 1 else 1
    return per_symbol * len(symbols)


@dataclass(frozen=True)
class EntropyReport:
    entropy_bits: float
    symbol_count: int
    distinct_symbols: int
    total_code_bits: int


def entropy_report(symbols: Sequence[Hashable]) -> EntropyReport:
    return EntropyReport(
        entropy_bits=shannon_entropy(symbols),
        symbol_count=len(symbols),
        distinct_symbols=len(set(symbols)),
        total_code_bits=min_code_bits(symbols),
    )


class ChannelVariant(enum.Enum):
    NCC = "network-covert-channel"
    SUBLIMINAL = "subliminal"


@dataclass(frozen=True)
class CovertnessParams:
    variant: ChannelVariant
    t_set: int
    t_max: int
    rounds_used: int = 0
    rounds_max: int = 1

    def __post_init__(self):
        if self.t_max < 1 or not 0 <= self.t_set <= self.t_max:
            raise ValueError(f"need t_max >= 1 and 0 <= t_set <= t_max, got {self.t_set}/{self.t_max}")
        if self.variant is ChannelVariant.SUBLIMINAL:
            if self.rounds_max < 1 or not 0 <= self.rounds_used <= self.rounds_max:
                raise ValueError("need rounds_max >= 1 and 0 <= rounds_used <= rounds_max")

    def eta(self) -> float:
        if self.variant is ChannelVariant.NCC:
            return covertness_ncc(self.t_set, self.t_max)
        return covertness_subliminal(self.rounds_used, self.rounds_max, self.t_set, self.t_max)


def covertness_ncc(t_set: int, t_max: int) -> float:
    """Covertness index of a network covert channel: trapdoors set over trapdoors available."""
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    if not 0 <= t_set <= t_max:
        raise ValueError(f"t_set must lie in [0, {t_max}], got {t_set}")
    return t_set / t_max


def covertness_subliminal(rounds_used: int, rounds_max: int, t_set: int, t_max: int) -> float:
    """Covertness index of a subliminal channel: round share times trapdoor share."""
    if rounds_max <= 0:
        raise ValueError("rounds_max must be positive")
    if not 0 <= rounds_used <= rounds_max:
        raise ValueError(f"rounds_used must lie in [0, {rounds_max}], got {rounds_used}")
    return (rounds_used / rounds_max) * covertness_ncc(t_set, t_max)


def channel_capacity(field_bits: int, message_bits: int) -> float:
    """``log2(1 + field_bits / message_bits)``, evaluated literally."""
    if message_bits <= 0:
        raise ValueError("message_bits must be positive")
    if field_bits < 0:
        raise ValueError("field_bits must be non-negative")
    return math.log2(1 + field_bits / message_bits)


def ce_ratio(capacity: float, t: int, entropy: float) -> float:
    """Capacity-to-entropy ratio ``capacity * t / entropy``."""
    if entropy <= 0:
        raise ValueError("entropy must be positive")
    if t < 1:
        raise ValueError("trapdoor count must be at least 1")
    return capacity * t / entropy


class Detectability(enum.Enum):
    DETECTABLE = "Detectable"
    LIKELY_DETECTABLE = "LikelyDetectable"
    NOT_DETECTABLE = "NotDetectable"


def classify(eta: float) -> Detectability:
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"covertness index must be in [0, 1], got {eta}")
    if eta < 0.5:
        return Detectability.DETECTABLE
    if eta == 0.5:
        return Detectability.LIKELY_DETECTABLE
    return Detectability.NOT_DETECTABLE


@dataclass(frozen=True)
class CovertnessReport:
    eta: float
    classification: Detectability
    capacity: float
    ce_ratio: float
    robust: bool


def robustness(eta: float, capacity: float, t: int, entropy: float) -> CovertnessReport:
    """A channel is robust when its C/E ratio stays under H and eta exceeds 1/2."""
    ratio = ce_ratio(capacity, t, entropy)
    cls = classify(eta)
    return CovertnessReport(
        eta=eta,
        classification=cls,
        capacity=capacity,
        ce_ratio=ratio,
        robust=ratio < entropy and eta > 0.5,
    )


def embed_feasible(message_entropy_total_bits: float, field_bits: int) -> bool:
    return message_entropy_total_bits < field_bits
