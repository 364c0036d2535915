"""Per-link delivery models.

Every transmission gets its own uniform draw keyed by (seed, sender,
receiver, message type, per-link sequence number). Keying the draw rather
than pulling from one shared stream means the n-th copy of a packet meets
the same fate whatever else the run did, so runs that differ only in the
retransmission count share their random numbers.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

_SCALE = float(1 << 64)


def uniform01(seed, *parts) -> float:
    h = hashlib.blake2b(digest_size=8)
    h.update(repr(seed).encode())
    for p in parts:
        h.update(b"|" + str(p).encode())
    return int.from_bytes(h.digest(), "big") / _SCALE


@dataclass(frozen=True)
class LossModel:
    """Delivery probability ``p_near`` up to ``good_fraction * radius``,
    then falling linearly to ``p_far`` at the radius."""

    p_near: float = 0.95
    p_far: float = 0.5
    good_fraction: float = 0.5

    def __post_init__(self):
        for v in (self.p_near, self.p_far, self.good_fraction):
            if not 0.0 <= v <= 1.0:
                raise ValueError("probabilities and fractions must lie in [0, 1]")

    @classmethod
    def lossless(cls) -> "LossModel":
        return cls(1.0, 1.0)

    @classmethod
    def blackout(cls) -> "LossModel":
        return cls(0.0, 0.0)

    @classmethod
    def parse(cls, text: str) -> "LossModel":
        """``near=0.95,far=0.5[,good=0.5]``."""
        kw = {}
        names = {"near": "p_near", "far": "p_far", "good": "good_fraction"}
        for item in text.split(","):
            k, _, v = item.partition("=")
            if k.strip() not in names:
                raise ValueError(f"unknown loss parameter {k!r}")
            kw[names[k.strip()]] = float(v)
        return cls(**kw)

    def probability(self, dist: float, radius: float) -> float:
        r_good = self.good_fraction * radius
        if dist <= r_good:
            return self.p_near
        if dist >= radius:
            return self.p_far
        frac = (dist - r_good) / (radius - r_good)
        return self.p_near + (self.p_far - self.p_near) * frac

    def delivers(self, seed, src: int, dst: int, msg_type: int, seq: int, dist: float, radius: float) -> bool:
        return uniform01(seed, src, dst, msg_type, seq) < self.probability(dist, radius)


@dataclass(frozen=True)
class ScriptedLoss:
    """Wraps a model and additionally drops listed transmissions.

    ``drops`` holds ``(src, dst, msg_type, seq)`` tuples where ``seq`` counts
    from 0 per (src, dst, msg_type).
    """

    base: LossModel = field(default_factory=LossModel.lossless)
    drops: frozenset = frozenset()

    def delivers(self, seed, src, dst, msg_type, seq, dist, radius) -> bool:
        if (src, dst, msg_type, seq) in self.drops:
            return False
        return self.base.delivers(seed, src, dst, msg_type, seq, dist, radius)
