"""Protocol parameters and the per-event probability masses derived from them.

Everything downstream (lead chains, confirmation counts, race walks) is
expressed in terms of a handful of scalars derived from the tuple
(mining rate, delay bound, honest fraction, confirmation depth):

    alpha_i   = alpha * exp(-beta*lam*delta) * (beta*lam*delta)^i / i!
    beta_1    = 1 - alpha_0 - alpha_1
    alphabar_i= alpha * exp(-lam*delta) * (lam*delta)^i / i!
    alphabar  = alphabar_0
    rho       = alphabar * (1 + lam*delta + beta - alphabar)
    betabar^2 = 1 - alphabar^2 - rho

plus the tail sums a_i, b_i (adversarial-only delay windows) and
abar_i, bbar_i (rigged delay windows) feeding the steady-state recursions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Poisson tail summation: stop once a term falls below this fraction of the
# running sum.  The hard index cap guards pathological inputs; in the target
# regimes (lam*delta well below 1) the sums converge in a handful of terms.
_TERM_CUTOFF = 1e-18
_INDEX_CAP = 64


def poisson_pmf(mu: float, i: int) -> float:
    """P(Poisson(mu) = i), computed multiplicatively."""
    if i < 0:
        return 0.0
    term = math.exp(-mu)
    for j in range(i):
        term *= mu / (j + 1)
    return term


def poisson_tail(mu: float, i: int) -> float:
    """P(Poisson(mu) >= i) by forward summation from index i."""
    if i <= 0:
        return 1.0
    term = poisson_pmf(mu, i)
    total = term
    j = i
    while j < i + _INDEX_CAP:
        j += 1
        term *= mu / j
        total += term
        if term < _TERM_CUTOFF * total:
            break
    return total


@dataclass(frozen=True)
class ProtocolParams:
    """The protocol/attack tuple: rate lam (blocks/s), delay bound delta (s),
    honest fraction alpha, confirmation depth k."""

    lam: float
    delta: float
    alpha: float
    k: int

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise ValueError(f"mining rate must be positive, got {self.lam}")
        if self.delta < 0:
            raise ValueError(f"delay bound must be >= 0, got {self.delta}")
        if not 0 < self.alpha <= 1:
            raise ValueError(f"honest fraction must be in (0, 1], got {self.alpha}")
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"confirmation depth must be an integer >= 1, got {self.k}")

    @property
    def beta(self) -> float:
        return 1.0 - self.alpha

    @property
    def lam_delta(self) -> float:
        return self.lam * self.delta


@dataclass(frozen=True)
class DerivedParams:
    """Scalars derived from ProtocolParams; sequence accessors are methods."""

    params: ProtocolParams
    alpha0: float
    alpha1: float
    beta1: float
    abar: float
    rho: float
    bbar_sq: float

    @property
    def bbar(self) -> float:
        return math.sqrt(max(self.bbar_sq, 0.0))

    def alpha_i(self, i: int) -> float:
        """Jumper arrival with i adversarial blocks in its delay window."""
        p = self.params
        return p.alpha * poisson_pmf(p.beta * p.lam_delta, i)

    def alphabar_i(self, i: int) -> float:
        """Jumper arrival with i blocks of any origin (all rigged) in its window."""
        p = self.params
        return p.alpha * poisson_pmf(p.lam_delta, i)

    def a_i(self, i: int) -> float:
        """sum_{j>=i} alpha_j + beta*1{i<=2} (steady-state weights, plain windows)."""
        p = self.params
        return p.alpha * poisson_tail(p.beta * p.lam_delta, i) + (p.beta if i <= 2 else 0.0)

    def b_i(self, i: int) -> float:
        """sum_{j>=i} alpha_j + beta*1{i<=1} (boundary-row weights, plain windows)."""
        p = self.params
        return p.alpha * poisson_tail(p.beta * p.lam_delta, i) + (p.beta if i <= 1 else 0.0)

    def abar_i(self, i: int) -> float:
        """sum_{j>=i} alphabar_j + beta*1{i<=2} (steady-state weights, rigged windows)."""
        p = self.params
        return p.alpha * poisson_tail(p.lam_delta, i) + (p.beta if i <= 2 else 0.0)

    def bbar_i(self, i: int) -> float:
        """sum_{j>=i} alphabar_j + beta*1{i<=1} (boundary-row weights, rigged windows)."""
        p = self.params
        return p.alpha * poisson_tail(p.lam_delta, i) + (p.beta if i <= 1 else 0.0)


def derive(p: ProtocolParams) -> DerivedParams:
    """Compute every derived scalar for a valid parameter tuple."""
    beta = p.beta
    ld = p.lam_delta
    alpha0 = p.alpha * math.exp(-beta * ld)
    alpha1 = alpha0 * beta * ld
    abar = p.alpha * math.exp(-ld)
    rho = abar * (1.0 + ld + beta - abar)
    return DerivedParams(
        params=p,
        alpha0=alpha0,
        alpha1=alpha1,
        beta1=1.0 - alpha0 - alpha1,
        abar=abar,
        rho=rho,
        bbar_sq=1.0 - abar * abar - rho,
    )


@dataclass(frozen=True)
class RegimeReport:
    """Which fault-tolerance conditions hold.  Data, not an error: callers
    (and the CLI) decide what to do with an invalid regime."""

    ultimate_ok: bool      # beta < (1-beta) / (1 + (1-beta)*lam*delta)
    rigged_ok: bool        # 1 > 2*beta + alpha*lam*delta
    two_step_ok: bool      # betabar < alphabar
    three_way_ok: bool     # beta1 < alpha0

    @property
    def lower_bound_ok(self) -> bool:
        return self.ultimate_ok and self.three_way_ok

    @property
    def upper_bound_ok(self) -> bool:
        return self.rigged_ok and self.two_step_ok

    def as_dict(self) -> dict[str, bool]:
        return {
            "ultimate_ok": self.ultimate_ok,
            "rigged_ok": self.rigged_ok,
            "two_step_ok": self.two_step_ok,
            "three_way_ok": self.three_way_ok,
        }


def check_regime(p: ProtocolParams) -> RegimeReport:
    """Evaluate each fault-tolerance inequality independently (all strict)."""
    d = derive(p)
    beta = p.beta
    ld = p.lam_delta
    return RegimeReport(
        ultimate_ok=beta < (1.0 - beta) / (1.0 + (1.0 - beta) * ld),
        rigged_ok=1.0 > 2.0 * beta + p.alpha * ld,
        two_step_ok=d.bbar_sq < d.abar * d.abar,
        three_way_ok=d.beta1 < d.alpha0,
    )
