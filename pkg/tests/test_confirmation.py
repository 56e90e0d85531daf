import math

import numpy as np
import pytest

from forkrisk import (
    COMPOSITION,
    PRINTED,
    ConfVariant,
    ProtocolParams,
    conf_pmf_lower,
    conf_pmf_upper,
    derive,
    per_jumper_masses,
    per_jumper_pmf_lower,
    per_jumper_pmf_upper,
    self_convolve,
)


@pytest.mark.parametrize("fixture", ["bitcoin90", "bitcoin75", "ethereum75"])
@pytest.mark.parametrize("fn", [per_jumper_pmf_lower, per_jumper_pmf_upper])
def test_printed_equals_composition(fixture, fn, request):
    d = derive(request.getfixturevalue(fixture))
    for c in range(40):
        printed = fn(d, c, PRINTED)
        composed = fn(d, c, COMPOSITION)
        assert printed == pytest.approx(composed, rel=1e-12, abs=1e-300)


def test_per_jumper_delta0_is_geometric():
    d = derive(ProtocolParams(lam=1.0, delta=0.0, alpha=0.75, k=6))
    for c in range(10):
        assert per_jumper_pmf_lower(d, c) == pytest.approx(0.75 * 0.25**c, rel=1e-14)
        assert per_jumper_pmf_upper(d, c) == pytest.approx(0.75 * 0.25**c, rel=1e-14)


def test_per_jumper_c0(bitcoin90):
    d = derive(bitcoin90)
    assert per_jumper_pmf_lower(d, 0) == pytest.approx(d.alpha0, rel=1e-15)
    assert per_jumper_pmf_upper(d, 0) == pytest.approx(d.abar, rel=1e-15)


def test_per_jumper_bitcoin_c1(bitcoin90):
    # alpha*beta*exp(-beta*lam*delta)*(1 + lam*delta), frozen at 50 digits
    d = derive(bitcoin90)
    assert per_jumper_pmf_lower(d, 1) == pytest.approx(0.091347627012760889, rel=1e-14)


def test_per_jumper_upper_all_honest_limit():
    # with no adversarial miner the rigged count is pure window Poisson
    d = derive(ProtocolParams(lam=1 / 13, delta=2.0, alpha=1.0, k=6))
    ld = 2 / 13
    assert per_jumper_pmf_upper(d, 1) == pytest.approx(math.exp(-ld) * ld, rel=1e-14)
    assert per_jumper_pmf_upper(d, 1, PRINTED) == pytest.approx(math.exp(-ld) * ld, rel=1e-14)


def test_per_jumper_normalizes(bitcoin75):
    d = derive(bitcoin75)
    total = math.fsum(per_jumper_pmf_lower(d, c) for c in range(200))
    assert total == pytest.approx(1.0, abs=1e-13)
    total = math.fsum(per_jumper_pmf_upper(d, c) for c in range(200))
    assert total == pytest.approx(1.0, abs=1e-13)


@pytest.mark.parametrize("fixture", ["bitcoin90", "ethereum75"])
def test_conf_masses_at_zero(fixture, request):
    d = derive(request.getfixturevalue(fixture))
    k = 6
    assert conf_pmf_lower(d, k).p(0) == pytest.approx(d.alpha0**k, rel=1e-13)
    assert conf_pmf_upper(d, k).p(0) == pytest.approx(d.abar**k, rel=1e-13)


def test_conf_printed_equals_composition_stack(bitcoin90):
    d = derive(bitcoin90)
    a = conf_pmf_lower(d, 3, form=PRINTED)
    b = conf_pmf_lower(d, 3, form=COMPOSITION, min_support=len(a))
    for i in range(len(a)):
        assert abs(a.p(i) - b.p(i)) < 1e-12


@pytest.mark.parametrize("k", [1, 3])
@pytest.mark.parametrize("variant", [ConfVariant.LOWER, ConfVariant.UPPER])
def test_convolution_identity_small(bitcoin90, k, variant):
    d = derive(bitcoin90)
    closed = (conf_pmf_lower if variant is ConfVariant.LOWER else conf_pmf_upper)(d, k)
    per = per_jumper_masses(d, variant, len(closed) + 4)
    folded = self_convolve(per, k, len(closed))
    assert np.max(np.abs(folded - closed.masses)) < 1e-10


@pytest.mark.parametrize("alpha", [0.75, 0.9])
def test_delta0_negative_binomial(alpha):
    d = derive(ProtocolParams(lam=1.0, delta=0.0, alpha=alpha, k=6))
    k, beta = 6, 1 - alpha
    lower = conf_pmf_lower(d, k)
    upper = conf_pmf_upper(d, k)
    for s in range(len(lower)):
        nb = math.comb(k - 1 + s, s) * alpha**k * beta**s
        assert abs(lower.p(s) - nb) < 1e-12
        assert abs(upper.p(s) - nb) < 1e-12


@pytest.mark.parametrize("fixture", ["bitcoin90", "bitcoin75", "ethereum75"])
def test_normalization_and_dominance(fixture, request):
    d = derive(request.getfixturevalue(fixture))
    lower = conf_pmf_lower(d, 6)
    upper = conf_pmf_upper(d, 6)
    assert lower.total() == pytest.approx(1.0, abs=1e-12)
    assert upper.total() == pytest.approx(1.0, abs=1e-12)
    # rigged counts stochastically dominate adversarial-only counts
    for s in range(40):
        assert upper.ccdf(s) >= lower.ccdf(s) - 1e-12


def test_mean_identity(bitcoin75):
    d = derive(bitcoin75)
    k = 6
    conf = conf_pmf_lower(d, k, eps=1e-14)
    per = per_jumper_masses(d, ConfVariant.LOWER, len(conf))
    per_mean = float(np.dot(np.arange(len(per)), per))
    assert abs(conf.mean() - k * per_mean) < 1e-10


def test_invalid_k_rejected(bitcoin90):
    d = derive(bitcoin90)
    with pytest.raises(ValueError):
        conf_pmf_lower(d, 0)
    with pytest.raises(ValueError):
        conf_pmf_lower(d, 3, form="exotic")
