"""Pre-mining lead distributions.

Three variants of the adversary's head start at the moment the target
transaction arrives, all steady states of skip-free-to-the-left chains:

* ``TRUNCATED_LOWER`` -- delay windows truncated to at most two adversarial
  arrivals; closed-form geometric steady state.  Weakest adversary.
* ``FULL_LOWER``      -- untruncated adversarial windows; steady state by the
  Ramaswami recursion with pi0 = (1 - beta*(2 + alpha*lam*delta)) / alpha.
* ``RIGGED_UPPER``    -- every block in a jumper's window credited to the
  adversary; pi0 = (1 - 2*beta - alpha*lam*delta) / alpha.  Strongest.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NonConvergence, RegimeViolation
from .params import DerivedParams
from .pmf import Pmf

DEFAULT_EPS = 1e-12
INDEX_CAP = 10_000


class LeadVariant(enum.Enum):
    TRUNCATED_LOWER = "truncated-lower"
    FULL_LOWER = "full-lower"
    RIGGED_UPPER = "rigged-upper"


@dataclass(eq=False, frozen=True)
class LeadPmf(Pmf):
    variant: LeadVariant


def truncated_lead_ccdf(d: DerivedParams, i: int) -> float:
    """Closed-form P(lead >= i) for the truncated chain.

    (beta1/alpha0)^(i-1) * (1-alpha0)/(1-beta1) for i >= 1, else 1.
    """
    if i <= 0:
        return 1.0
    if d.beta1 >= d.alpha0:
        raise RegimeViolation(
            f"truncated lead needs beta1 < alpha0, got beta1={d.beta1} alpha0={d.alpha0}"
        )
    ratio = d.beta1 / d.alpha0
    scale = (1.0 - d.alpha0) / (1.0 - d.beta1)
    if i - 1 > 50 and ratio > 0.0:
        return math.exp((i - 1) * math.log(ratio)) * scale
    return ratio ** (i - 1) * scale


def lead_truncated_lower(
    d: DerivedParams, eps: float = DEFAULT_EPS, min_support: int = 0
) -> LeadPmf:
    """Geometric steady state of the truncated chain.

    pi_0 = (alpha0 - beta1)/(1 - beta1); pi_1 = pi_0 (1 - alpha0)/alpha0;
    pi_i = pi_1 (beta1/alpha0)^(i-1) afterwards.
    """
    if d.beta1 >= d.alpha0:
        raise RegimeViolation(
            f"truncated lead needs beta1 < alpha0, got beta1={d.beta1} alpha0={d.alpha0}"
        )
    pi0 = (d.alpha0 - d.beta1) / (1.0 - d.beta1)
    pi1 = pi0 * (1.0 - d.alpha0) / d.alpha0
    ratio = d.beta1 / d.alpha0
    masses = [pi0]
    i = 0
    while truncated_lead_ccdf(d, i + 1) > eps or len(masses) < min_support:
        i += 1
        if i >= INDEX_CAP:
            raise NonConvergence(f"truncated lead support exceeded {INDEX_CAP} entries")
        masses.append(pi1 if i == 1 else masses[-1] * ratio)
    return LeadPmf(
        masses=np.array(masses),
        tail_mass=truncated_lead_ccdf(d, i + 1),
        variant=LeadVariant.TRUNCATED_LOWER,
    )


def ramaswami_steady_state(
    a: Callable[[int], float],
    b: Callable[[int], float],
    pi0: float,
    eps: float = DEFAULT_EPS,
    index_cap: int = INDEX_CAP,
    min_support: int = 0,
    variant: LeadVariant = LeadVariant.FULL_LOWER,
) -> LeadPmf:
    """Steady state of an M/G/1-type chain with known pi0.

    pi_i = (pi0*b_i + sum_{j=1}^{i-1} pi_j * a_{i+1-j}) / (1 - a_1) for i >= 1,
    accumulated until the mass reaches 1 - eps.  Each pi_i is exact given its
    predecessors; eps only decides where the support stops.
    """
    if not 0.0 < pi0 <= 1.0:
        raise RegimeViolation(f"pi0 must be in (0, 1], got {pi0}")
    a1 = a(1)
    if a1 >= 1.0:
        raise RegimeViolation(f"recursion needs a_1 < 1, got {a1}")
    masses = [pi0]
    a_cache = [0.0, a1]  # a_cache[m] = a(m); index 0 unused
    cum = pi0
    while 1.0 - cum > eps or len(masses) < min_support:
        i = len(masses)
        if i >= index_cap:
            raise NonConvergence(
                f"steady-state mass reached only {cum} after {index_cap} entries"
            )
        a_cache.append(a(i + 1))
        acc = pi0 * b(i)
        for j in range(1, i):
            acc += masses[j] * a_cache[i + 1 - j]
        masses.append(acc / (1.0 - a1))
        cum += masses[-1]
    return LeadPmf(masses=np.array(masses), tail_mass=max(1.0 - cum, 0.0), variant=variant)


def lead_full_lower(
    d: DerivedParams, eps: float = DEFAULT_EPS, min_support: int = 0
) -> LeadPmf:
    """Steady state of the untruncated adversarial-window chain."""
    p = d.params
    pi0 = (1.0 - p.beta * (2.0 + p.alpha * p.lam_delta)) / p.alpha
    if pi0 <= 0.0:
        raise RegimeViolation(
            "full lead chain escapes to infinity: requires 1 > beta*(2 + alpha*lam*delta)"
        )
    return ramaswami_steady_state(
        d.a_i, d.b_i, pi0, eps=eps, min_support=min_support, variant=LeadVariant.FULL_LOWER
    )


def lead_rigged_upper(
    d: DerivedParams, eps: float = DEFAULT_EPS, min_support: int = 0
) -> LeadPmf:
    """Steady state of the rigged-window chain (upper-bound lead)."""
    p = d.params
    pi0 = (1.0 - 2.0 * p.beta - p.alpha * p.lam_delta) / p.alpha
    if pi0 <= 0.0:
        raise RegimeViolation(
            "rigged lead chain escapes to infinity: requires 1 > 2*beta + alpha*lam*delta"
        )
    return ramaswami_steady_state(
        d.abar_i, d.bbar_i, pi0, eps=eps, min_support=min_support, variant=LeadVariant.RIGGED_UPPER
    )
