import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stickycouple.model import (
    AssumptionConstants,
    FarModel,
    TauMajorant,
    ar1_shift_model,
    euler_model,
    tau_eval,
    validate_h1h2,
)

MAJ = TauMajorant(0.1, 0.5, 1.0)


def test_tau_values_at_crossover():
    gamma = 0.1
    assert tau_eval(MAJ, gamma, 0.0) == 0.0
    assert tau_eval(MAJ, gamma, 1.0) == pytest.approx((1 + 0.1 * gamma) * 1.0)
    # beyond R1 the extra distance contracts
    assert tau_eval(MAJ, gamma, 3.0) == pytest.approx(
        (1 + 0.1 * gamma) * 1.0 + (1 - 0.5 * gamma) * 2.0
    )


def test_tau_rejects_bad_gamma_and_radius():
    with pytest.raises(ValueError):
        tau_eval(MAJ, 0.0, 1.0)
    with pytest.raises(ValueError):
        tau_eval(MAJ, 2.0 + 1e-9, 1.0)
    with pytest.raises(ValueError):
        tau_eval(MAJ, 0.1, -1.0)


def test_crossover_radius():
    assert MAJ.radius_R2 == pytest.approx(2.0 * 1.0 * (0.1 + 0.5) / 0.5)


@given(
    r1=st.floats(0.0, 50.0),
    r2=st.floats(0.0, 50.0),
    gamma=st.floats(1e-6, 2.0),
)
def test_tau_monotone_and_dominates_contraction(r1, r2, gamma):
    lo, hi = sorted((r1, r2))
    t_lo = tau_eval(MAJ, gamma, lo)
    t_hi = tau_eval(MAJ, gamma, hi)
    assert t_lo <= t_hi + 1e-12
    # beyond R1 + expansion zone the majorant contracts
    assert t_hi <= (1 + MAJ.lip_L * gamma) * hi + 1e-12


@given(gamma=st.floats(1e-6, 2.0), r=st.floats(2.5, 100.0))
def test_tau_contracts_past_R2(gamma, r):
    # past R2 = 2 R1 (L+m)/m the majorant contracts by at least 1 - m*gamma/2
    if r >= MAJ.radius_R2:
        assert tau_eval(MAJ, gamma, r) <= (1 - 0.5 * MAJ.contraction_m * gamma) * r + 1e-9


def test_kappa_form_requires_zero_at_origin():
    with pytest.raises(ValueError):
        TauMajorant(0.0, 1.0, 0.0, kappa=lambda w: np.asarray(w) + 1.0)


def test_kappa_form_rejects_non_monotone_profile():
    with pytest.raises(ValueError):
        TauMajorant(0.0, 0.5, 0.0, kappa=lambda w: -3.0 * np.asarray(w))


def test_kappa_form_evaluation():
    maj = TauMajorant(0.0, 1.0, 0.0, kappa=lambda w: -0.5 * np.asarray(w))
    assert maj.evaluate(0.1, 2.0) == pytest.approx(2.0 - 0.1 * 1.0)


def test_constants_validation():
    with pytest.raises(ValueError):
        AssumptionConstants(0.1, 0.0, 1.0, 0.1)
    with pytest.raises(ValueError):
        AssumptionConstants(-0.1, 0.5, 1.0, 0.1)


def test_ar1_model_passes_spot_check():
    model = ar1_shift_model(1.0, 0.5, gamma_max=0.1)
    report = validate_h1h2(model, model.consts, n_samples=200, seed=0)
    assert report.passed
    assert report.n_pairs > 0


def test_spot_check_catches_wrong_constants():
    model = ar1_shift_model(1.0, 0.5, gamma_max=0.1)
    lying = AssumptionConstants(lip_L=0.0, contraction_m=2.0, radius_R1=0.0, c_inf=0.5)
    report = validate_h1h2(model, lying, n_samples=100, seed=0)
    assert not report.passed
    assert any(kind == "contraction" for kind, *_ in report.violations)


def test_spot_check_catches_understated_drift_gap():
    model = ar1_shift_model(1.0, 0.5, gamma_max=0.1)
    lying = AssumptionConstants(lip_L=0.0, contraction_m=1.0, radius_R1=0.0, c_inf=0.01)
    report = validate_h1h2(model, lying, n_samples=100, seed=0)
    assert any(kind == "drift-gap" for kind, *_ in report.violations)


def test_euler_model_maps():
    b = lambda x: -x
    bt = lambda x: -x + 0.05
    model = euler_model(b, bt, dim=1, sigma=1.0, gamma_max=0.1)
    x = np.array([2.0])
    assert model.drift_map(0.1, x) == pytest.approx(np.array([1.8]))
    assert model.perturbed_map(0.1, x) == pytest.approx(np.array([1.805]))


def test_model_requires_positive_scales():
    with pytest.raises(ValueError):
        FarModel(0, 1.0, 0.1, lambda g, x: x, lambda g, x: x)
    with pytest.raises(ValueError):
        FarModel(1, 0.0, 0.1, lambda g, x: x, lambda g, x: x)
