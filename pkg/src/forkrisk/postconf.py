"""Post-confirmation race laws.

Lower bound: a three-way random walk (left alpha0, stay alpha1, right beta1)
where a "stay" step at the running maximum still wins the race, because the
adversary can publish a window block ahead of the jumper that offsets it.
Upper bound: a two-arrival walk moving +/-2 with an odd-deficit evening toss.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonConvergence, RegimeViolation
from .lead import LeadPmf, LeadVariant, DEFAULT_EPS, INDEX_CAP
from .params import DerivedParams


def _pow(ratio: float, n: int) -> float:
    """ratio^n, via logs for deep exponents to dodge intermediate underflow."""
    if n <= 0:
        return 1.0
    if n > 50 and ratio > 0.0:
        return math.exp(n * math.log(ratio))
    return ratio**n


@dataclass(frozen=True)
class WalkParams:
    """Step law of the three-way race walk."""

    p_left: float
    p_stay: float
    p_right: float

    def __post_init__(self) -> None:
        for name, v in (("p_left", self.p_left), ("p_stay", self.p_stay), ("p_right", self.p_right)):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be a probability, got {v}")
        if abs(self.p_left + self.p_stay + self.p_right - 1.0) > 1e-12:
            raise ValueError("walk probabilities must sum to 1")

    @classmethod
    def from_derived(cls, d: DerivedParams) -> "WalkParams":
        return cls(p_left=d.alpha0, p_stay=d.alpha1, p_right=d.beta1)

    def require_drift(self) -> None:
        if self.p_right >= self.p_left:
            raise RegimeViolation(
                f"race walk must drift left, got p_right={self.p_right} >= p_left={self.p_left}"
            )


@dataclass(frozen=True)
class TwoStepWalk:
    """Two-arrival upper-bound walk: +/-2 steps with ratio betabar/alphabar,
    plus the single-toss honest probability used to even out odd deficits."""

    alpha_bar: float
    beta_bar: float

    def __post_init__(self) -> None:
        if self.alpha_bar <= 0.0 or self.beta_bar < 0.0:
            raise ValueError("two-step walk needs alpha_bar > 0 and beta_bar >= 0")

    @classmethod
    def from_derived(cls, d: DerivedParams) -> "TwoStepWalk":
        return cls(alpha_bar=d.abar, beta_bar=d.bbar)

    @property
    def ratio(self) -> float:
        return self.beta_bar / self.alpha_bar


def three_way_max_tail(w: WalkParams, a: int) -> float:
    """P(running maximum of the tie-adjusted three-way walk >= a).

    Equals (p_right/p_left)^(a-1) * (1-p_left)/(1-p_right) for a >= 1, and 1
    for a <= 0 (deficit already closed).
    """
    if a <= 0:
        return 1.0
    w.require_drift()
    scale = (1.0 - w.p_left) / (1.0 - w.p_right)
    return _pow(w.p_right / w.p_left, a - 1) * scale


def lead_equivalent_pmf(
    w: WalkParams, eps: float = DEFAULT_EPS, min_support: int = 0
) -> LeadPmf:
    """PMF of the race-walk maximum, obtained by differencing its tail.

    Coincides with the truncated-chain lead PMF at the same step law, which
    is why one table serves both ends of the lower bound.
    """
    w.require_drift()
    tails = [1.0, three_way_max_tail(w, 1)]
    while tails[-1] > eps or len(tails) - 1 < min_support:
        if len(tails) > INDEX_CAP:
            raise NonConvergence(f"race-walk maximum support exceeded {INDEX_CAP}")
        tails.append(three_way_max_tail(w, len(tails)))
    masses = np.array([tails[i] - tails[i + 1] for i in range(len(tails) - 1)])
    return LeadPmf(masses=masses, tail_mass=tails[-1], variant=LeadVariant.TRUNCATED_LOWER)


def two_step_catchup_cdf(w: TwoStepWalk, l: int) -> float:
    """F(l) = P(the two-arrival walk's maximum never exceeds l).

    Odd l:  1 - (betabar/alphabar)^(l+1).
    Even l: 1 - (betabar/alphabar)^l * (1 - alphabar + alphabar*(betabar/alphabar)^2),
    the even case folding in the single evening toss (honest w.p. alphabar).
    """
    if l < 0:
        return 0.0
    if w.beta_bar >= w.alpha_bar:
        raise RegimeViolation(
            f"catch-up walk must drift down, got betabar={w.beta_bar} >= alphabar={w.alpha_bar}"
        )
    r = w.ratio
    if l % 2 == 1:
        return 1.0 - _pow(r, l + 1)
    return 1.0 - _pow(r, l) * (1.0 - w.alpha_bar + w.alpha_bar * r * r)


def max_hit_count_law(w: WalkParams, n: int) -> float:
    """P(the walk climbs to its all-time maximum exactly n times).

    Geometric in n with success odds p_left : p_right; covers the two-way
    case (p_stay = 0) and the three-way case alike.  Independent of where
    the maximum lands.
    """
    if n < 1:
        raise ValueError(f"hit count must be >= 1, got {n}")
    w.require_drift()
    q = w.p_right / (w.p_left + w.p_right)
    return (1.0 - q) * _pow(q, n - 1)
