import math

import pytest

from forkrisk import ProtocolParams


@pytest.fixture
def bitcoin90():
    return ProtocolParams(lam=1 / 600, delta=10.0, alpha=0.90, k=6)


@pytest.fixture
def bitcoin75():
    return ProtocolParams(lam=1 / 600, delta=10.0, alpha=0.75, k=6)


@pytest.fixture
def ethereum75():
    return ProtocolParams(lam=1 / 13, delta=2.0, alpha=0.75, k=6)


def assert_bins_match(emp, analytic_p, sigma=3.0, min_expected=25):
    """Compare an empirical histogram to an analytic PMF bin by bin.

    Bins whose expected count falls below ``min_expected`` are skipped: the
    normal approximation behind the z-score is meaningless there.
    """
    n = emp.trials
    checked = 0
    for i in range(len(emp.counts)):
        p = analytic_p(i)
        if p * n < min_expected:
            continue
        se = math.sqrt(p * (1.0 - p) / n)
        assert abs(emp.p(i) - p) <= sigma * se, (
            f"bin {i}: empirical {emp.p(i):.6g} vs analytic {p:.6g} "
            f"(|z| = {abs(emp.p(i) - p) / se:.2f})"
        )
        checked += 1
    assert checked >= 2, "too few bins carried enough mass to compare"
