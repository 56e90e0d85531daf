"""Distributions of adversarial blocks mined during the confirmation interval.

The count per published jumper is a geometric number of pre-arrival blocks
plus an independent Poisson count from the jumper's delay window (rate
beta*lam*delta for the adversarial-only windows, lam*delta when everything
in the window is rigged over to the adversary).  The k-jumper confirmation
count is the k-fold sum.

Two evaluation stacks are kept side by side:

* ``printed``     -- the closed-form expressions evaluated term by term;
* ``composition`` -- explicit geometric (x) Poisson convolutions.

The two are algebraically identical (beta^(c-j) * (beta*lam*delta)^j equals
beta^c * (lam*delta)^j term by term); both stay available so each can check
the other, and because the printed upper form divides by beta it falls back
to the composition at beta = 0.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import NonConvergence
from .params import DerivedParams, poisson_pmf
from .pmf import Pmf, convolve, self_convolve

DEFAULT_EPS = 1e-12
INDEX_CAP = 50_000

PRINTED = "printed"
COMPOSITION = "composition"

# Past this point the multiplicative binomial recurrence hands off to
# exp(lgamma) to keep intermediates bounded.
_BINOM_LGAMMA_CUTOFF = 60


class ConfVariant(enum.Enum):
    LOWER = "lower"
    UPPER = "upper"


@dataclass(eq=False, frozen=True)
class ConfPmf(Pmf):
    variant: ConfVariant
    k: int


def _binom_next(k: int, n: int, prev: float) -> float:
    """binom(k-1+n, n) from binom(k-2+n, n-1)."""
    if k - 1 + n > _BINOM_LGAMMA_CUTOFF:
        return math.exp(
            math.lgamma(k + n) - math.lgamma(n + 1) - math.lgamma(k)
        )
    return prev * (k - 1 + n) / n


def _window_rate(d: DerivedParams, variant: ConfVariant) -> float:
    p = d.params
    return p.beta * p.lam_delta if variant is ConfVariant.LOWER else p.lam_delta


def _per_jumper_composition(d: DerivedParams, c: int, variant: ConfVariant) -> float:
    """alpha * sum_j beta^(c-j) * Poisson(window rate)(j)."""
    if c < 0:
        return 0.0
    p = d.params
    mu = _window_rate(d, variant)
    pois = math.exp(-mu)
    terms = []
    for j in range(c + 1):
        if j > 0:
            pois *= mu / j
        terms.append(p.beta ** (c - j) * pois)
    return p.alpha * math.fsum(terms)


def per_jumper_pmf_lower(d: DerivedParams, c: int, form: str = COMPOSITION) -> float:
    """P(adversarial blocks between consecutive jumper publications = c).

    Printed form: alpha * beta^c * exp(-beta*lam*delta) * sum_{j<=c} (lam*delta)^j / j!.
    """
    if form == COMPOSITION:
        return _per_jumper_composition(d, c, ConfVariant.LOWER)
    if c < 0:
        return 0.0
    p = d.params
    ld = p.lam_delta
    term, partial = 1.0, 1.0
    for j in range(1, c + 1):
        term *= ld / j
        partial += term
    return p.alpha * p.beta**c * math.exp(-p.beta * ld) * partial


def per_jumper_pmf_upper(d: DerivedParams, c: int, form: str = COMPOSITION) -> float:
    """Rigged-window analogue: alpha * beta^c * exp(-lam*delta) * sum_{j<=c} (lam*delta/beta)^j / j!.

    At beta = 0 the printed expression is indeterminate, so the composition
    form is used regardless of ``form``.
    """
    if form == COMPOSITION or d.params.beta == 0.0:
        return _per_jumper_composition(d, c, ConfVariant.UPPER)
    if c < 0:
        return 0.0
    p = d.params
    x = p.lam_delta / p.beta
    term, partial = 1.0, 1.0
    for j in range(1, c + 1):
        term *= x / j
        partial += term
    return p.alpha * p.beta**c * math.exp(-p.lam_delta) * partial


def per_jumper_masses(
    d: DerivedParams, variant: ConfVariant, length: int, form: str = COMPOSITION
) -> np.ndarray:
    """First ``length`` per-jumper masses, each exact for its index."""
    mu = _window_rate(d, variant)
    p = d.params
    if form == COMPOSITION:
        geo = p.alpha * p.beta ** np.arange(length, dtype=np.float64)
        pois = np.array([poisson_pmf(mu, j) for j in range(length)])
        return convolve(geo, pois, length)
    fn = per_jumper_pmf_lower if variant is ConfVariant.LOWER else per_jumper_pmf_upper
    return np.array([fn(d, c, PRINTED) for c in range(length)])


def _conf_pmf(
    d: DerivedParams,
    k: int,
    variant: ConfVariant,
    eps: float,
    form: str,
    min_support: int,
) -> ConfPmf:
    if k < 1:
        raise ValueError(f"confirmation depth must be >= 1, got {k}")
    if form not in (PRINTED, COMPOSITION):
        raise ValueError(f"unknown pmf form {form!r}")
    p = d.params
    if form == COMPOSITION or (variant is ConfVariant.UPPER and p.beta == 0.0):
        return _conf_pmf_composition(d, k, variant, eps, min_support)

    mu_total = p.lam_delta * k
    base = d.alpha0 if variant is ConfVariant.LOWER else d.abar
    prefactor = base**k

    binoms = [1.0]          # binom(k-1+n, n)
    weights = [1.0]         # (lam*delta*k)^m / m!
    masses: list[float] = []
    cum = 0.0
    beta_pow = 1.0
    s = 0
    while cum < 1.0 - eps or len(masses) < min_support:
        if s >= INDEX_CAP:
            raise NonConvergence(
                f"confirmation mass reached only {cum} after {INDEX_CAP} entries"
            )
        binoms.append(_binom_next(k, s + 1, binoms[-1]))
        weights.append(weights[-1] * mu_total / (s + 1))
        if variant is ConfVariant.LOWER:
            inner = math.fsum(binoms[n] * weights[s - n] for n in range(s + 1))
            mass = prefactor * beta_pow * inner
        else:
            inner = math.fsum(
                binoms[n] * p.beta**n * weights[s - n] for n in range(s + 1)
            )
            mass = prefactor * inner
        masses.append(mass)
        cum += mass
        beta_pow *= p.beta
        s += 1
    return ConfPmf(
        masses=np.array(masses), tail_mass=max(1.0 - cum, 0.0), variant=variant, k=k
    )


def _conf_pmf_composition(
    d: DerivedParams, k: int, variant: ConfVariant, eps: float, min_support: int
) -> ConfPmf:
    """k-fold self-convolution of the per-jumper PMF, grown until the mass target."""
    length = max(min_support, 4 * k, 32)
    while True:
        per = per_jumper_masses(d, variant, length, COMPOSITION)
        masses = self_convolve(per, k, length)
        cum = math.fsum(masses)
        if 1.0 - cum <= eps:
            return ConfPmf(
                masses=masses, tail_mass=max(1.0 - cum, 0.0), variant=variant, k=k
            )
        if length >= INDEX_CAP:
            raise NonConvergence(
                f"confirmation mass reached only {cum} after {INDEX_CAP} entries"
            )
        length = min(length * 2, INDEX_CAP)


def conf_pmf_lower(
    d: DerivedParams,
    k: int,
    eps: float = DEFAULT_EPS,
    form: str = PRINTED,
    min_support: int = 0,
) -> ConfPmf:
    """PMF of adversarial blocks mined during the k-jumper confirmation interval.

    Closed form: P(s) = alpha0^k * beta^s * sum_{n<=s} binom(k-1+n, n)
    (lam*delta*k)^(s-n) / (s-n)!.
    """
    return _conf_pmf(d, k, ConfVariant.LOWER, eps, form, min_support)


def conf_pmf_upper(
    d: DerivedParams,
    k: int,
    eps: float = DEFAULT_EPS,
    form: str = PRINTED,
    min_support: int = 0,
) -> ConfPmf:
    """Rigged-model confirmation count PMF.

    Closed form: P(s) = alphabar^k * sum_{n<=s} binom(k-1+n, n)
    (lam*delta*k)^(s-n) / (s-n)! * beta^n.
    """
    return _conf_pmf(d, k, ConfVariant.UPPER, eps, form, min_support)
