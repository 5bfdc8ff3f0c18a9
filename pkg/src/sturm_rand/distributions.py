"""Per-coordinate probability laws for the random couplings."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

KINDS = ("uniform", "gaussian", "cantor", "atomic")


@dataclass(frozen=True)
class DistributionSpec:
    """One factor of the product measure.

    ``params`` depends on ``kind``: ``lo``/``hi`` for uniform and cantor,
    ``mean``/``sd`` for gaussian, ``points`` (a tuple of ``(value, prob)``)
    for atomic. Use the classmethod constructors rather than building the
    mapping by hand.
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        p = self.params
        if self.kind in ("uniform", "cantor"):
            lo, hi = float(p["lo"]), float(p["hi"])
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ValueError(f"{self.kind} needs finite lo < hi, got ({lo}, {hi})")
            object.__setattr__(self, "params", {"lo": lo, "hi": hi})
        elif self.kind == "gaussian":
            mean, sd = float(p["mean"]), float(p["sd"])
            if not (math.isfinite(mean) and sd > 0 and math.isfinite(sd)):
                raise ValueError(f"gaussian needs finite mean and sd > 0, got ({mean}, {sd})")
            object.__setattr__(self, "params", {"mean": mean, "sd": sd})
        else:
            points = tuple((float(v), float(w)) for v, w in p["points"])
            if not points:
                raise ValueError("atomic distribution needs at least one point")
            if any(w <= 0 for _, w in points):
                raise ValueError("atomic probabilities must be positive")
            total = math.fsum(w for _, w in points)
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"atomic probabilities sum to {total}, not 1")
            object.__setattr__(self, "params", {"points": points})

    @classmethod
    def uniform(cls, lo=0.0, hi=1.0):
        return cls("uniform", {"lo": lo, "hi": hi})

    @classmethod
    def gaussian(cls, mean=0.0, sd=1.0):
        return cls("gaussian", {"mean": mean, "sd": sd})

    @classmethod
    def cantor(cls, lo=0.0, hi=1.0):
        return cls("cantor", {"lo": lo, "hi": hi})

    @classmethod
    def atomic(cls, points):
        return cls("atomic", {"points": points})

    @property
    def is_continuous(self) -> bool:
        """True when the law has no atoms."""
        return self.kind != "atomic"

    def mean(self) -> float:
        p = self.params
        if self.kind in ("uniform", "cantor"):
            return 0.5 * (p["lo"] + p["hi"])
        if self.kind == "gaussian":
            return p["mean"]
        return math.fsum(v * w for v, w in p["points"])

    def variance(self) -> float:
        p = self.params
        if self.kind == "uniform":
            return (p["hi"] - p["lo"]) ** 2 / 12.0
        if self.kind == "cantor":
            return (p["hi"] - p["lo"]) ** 2 / 8.0
        if self.kind == "gaussian":
            return p["sd"] ** 2
        m = self.mean()
        return math.fsum(w * (v - m) ** 2 for v, w in p["points"])
