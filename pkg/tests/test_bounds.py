import pytest

from forkrisk import (
    COMPOSITION,
    LeadVariant,
    ProtocolParams,
    RegimeViolation,
    Theorem,
    lower_bound,
    sweep,
    upper_bound,
)


def test_bitcoin90_reference_values(bitcoin90):
    lo = lower_bound(bitcoin90)
    assert lo.value == pytest.approx(0.00112412, rel=1e-4)
    assert lo.theorem is Theorem.LOWER_T1
    assert lo.truncation_error == 0.0
    lo_full = lower_bound(bitcoin90, lead_variant=LeadVariant.FULL_LOWER)
    assert lo_full.value == pytest.approx(0.00112415, rel=1e-4)
    assert lo_full.value > lo.value  # tighter lead can only raise the bound
    up = upper_bound(bitcoin90)
    assert 0.00165 <= up.value <= 0.00180
    assert up.theorem is Theorem.UPPER_T2


def test_bitcoin75_reference_values(bitcoin75):
    assert 0.115 <= lower_bound(bitcoin75).value <= 0.125
    assert 0.125 <= upper_bound(bitcoin75).value <= 0.135


def test_k1_delta0_hand_check():
    # lower: 1 - pi0 * alpha * pi0 with pi0 = 2/3; upper coincides at delta=0
    p = ProtocolParams(lam=1.0, delta=0.0, alpha=0.75, k=1)
    assert lower_bound(p).value == pytest.approx(2 / 3, rel=1e-14)
    assert upper_bound(p).value == pytest.approx(2 / 3, rel=1e-13)


def test_composition_stack_matches_printed(bitcoin90):
    assert lower_bound(bitcoin90, form=COMPOSITION).value == pytest.approx(
        lower_bound(bitcoin90).value, rel=1e-12
    )
    assert upper_bound(bitcoin90, form=COMPOSITION).value == pytest.approx(
        upper_bound(bitcoin90).value, rel=1e-12
    )


def test_monotone_in_k(bitcoin90):
    rows = sweep(bitcoin90, k_values=range(1, 13))
    lowers = [r.lower.value for r in rows]
    uppers = [r.upper.value for r in rows]
    assert all(b < a for a, b in zip(lowers, lowers[1:]))
    assert all(b < a for a, b in zip(uppers, uppers[1:]))
    assert all(lo <= up for lo, up in zip(lowers, uppers))


def test_regime_violation_propagates():
    weak = ProtocolParams(lam=1 / 13, delta=2.0, alpha=0.52, k=6)
    with pytest.raises(RegimeViolation):
        upper_bound(weak)
    boundary = ProtocolParams(lam=1.0, delta=0.0, alpha=0.5, k=6)
    with pytest.raises(RegimeViolation):
        lower_bound(boundary)


def test_lower_rejects_rigged_lead(bitcoin90):
    with pytest.raises(ValueError):
        lower_bound(bitcoin90, lead_variant=LeadVariant.RIGGED_UPPER)


def test_eps_insensitivity(bitcoin90):
    for fn in (lower_bound, upper_bound):
        coarse = fn(bitcoin90, eps=1e-10).value
        fine = fn(bitcoin90, eps=1e-14).value
        assert abs(coarse - fine) < 1e-9


def test_sweep_marks_invalid_rows():
    base = ProtocolParams(lam=1 / 13, delta=2.0, alpha=0.75, k=6)
    rows = sweep(base, alpha_values=[0.52, 0.75])
    assert rows[0].upper is None and not rows[0].regime.upper_bound_ok
    assert rows[0].lower is not None  # lower-bound regime still holds there
    assert rows[1].lower is not None and rows[1].upper is not None


def test_sweep_empty_range(bitcoin90):
    assert sweep(bitcoin90, k_values=[]) == []


def test_sweep_rejects_double_grid(bitcoin90):
    with pytest.raises(ValueError):
        sweep(bitcoin90, k_values=[1], alpha_values=[0.9])
