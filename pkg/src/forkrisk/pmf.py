"""Finite, truncated probability mass functions over non-negative integers."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(eq=False, frozen=True)
class Pmf:
    """Masses indexed from 0 plus the residual mass beyond the truncation point.

    Indices past the stored support read as 0 through :meth:`p`; the residual
    stays available as ``tail_mass`` so totals remain exactly accountable.
    """

    masses: np.ndarray
    tail_mass: float

    def __post_init__(self) -> None:
        masses = np.asarray(self.masses, dtype=np.float64)
        masses.flags.writeable = False
        object.__setattr__(self, "masses", masses)

    def __len__(self) -> int:
        return len(self.masses)

    def p(self, i: int) -> float:
        if 0 <= i < len(self.masses):
            return float(self.masses[i])
        return 0.0

    def total(self) -> float:
        return math.fsum(self.masses) + self.tail_mass

    def ccdf(self, i: int) -> float:
        """P(X >= i), counting the truncated tail."""
        if i <= 0:
            return self.total()
        return math.fsum(self.masses[i:]) + self.tail_mass

    def cdf(self, i: int) -> float:
        """P(X <= i) restricted to the stored support."""
        return math.fsum(self.masses[: i + 1])

    def mean(self) -> float:
        """Mean over the stored support (tail contribution excluded)."""
        return float(np.dot(np.arange(len(self.masses)), self.masses))


def convolve(a: np.ndarray, b: np.ndarray, length: int | None = None) -> np.ndarray:
    """Discrete convolution of two mass arrays, optionally truncated.

    Entry c of the result is exact whenever both inputs cover indices 0..c,
    which is all the callers here need.
    """
    out = np.convolve(a, b)
    if length is not None:
        out = out[:length]
    return out


def self_convolve(masses: np.ndarray, k: int, length: int | None = None) -> np.ndarray:
    """k-fold self-convolution (k >= 1) of a mass array."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    out = np.asarray(masses, dtype=np.float64)
    if length is not None:
        out = out[:length]
    for _ in range(k - 1):
        out = convolve(out, masses, length)
    return out
