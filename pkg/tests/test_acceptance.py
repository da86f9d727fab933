"""End-to-end acceptance checks.

Each test pins one user-facing guarantee: closed-form kernel identities,
pathwise domination, certified bounds dominating simulation, exact
stationary gaps, coalescence rates, ODE-posterior bias linearity, solver
order, the small-step limit study, and the frozen constant regression.
Monte-Carlo tolerances are stated inline next to each assertion.
"""

import math
import time

import numpy as np
import pytest

from stickycouple.bounds import (
    MomentBoundInputs,
    coalescence_tv_bound,
    theorem11_constants,
    theorem12_constants,
    w1_bound,
)
from stickycouple.coupling import coupled_batch
from stickycouple.experiments import run_experiment
from stickycouple.metrics import w1_empirical_1d
from stickycouple.model import TauMajorant, ar1_shift_model
from stickycouple.ode_bayes import (
    grad_log_posterior,
    logistic_exact,
    logistic_model,
    neg_log_posterior,
    solve_augmented_euler,
    synth_data,
)
from stickycouple.sticky_chain import StickyParams, estimate_stationary, sticky_from_draws
from stickycouple.streams import substream

# the linear shift pair: exact map (1 - gamma)y, perturbed map adds gamma*a,
# giving H1/H2 constants L = 0, m = 1, R1 = 0, c_inf = a
SHIFT_A = 0.5
SHIFT_INPUTS = MomentBoundInputs(
    L=0.0, m=1.0, R1=0.0, c_inf=SHIFT_A, sigma=1.0, gamma_bar=0.05, delta_bar=0.5
)


def test_kernel_identities_within_three_se():
    # every empirical one-step statistic on the 5x5 (gamma, w) grid matches
    # its closed form within 3 standard errors at 1e5 draws per cell
    start = time.perf_counter()
    table = run_experiment("validate-kernel", {}, seed=2, threads=4)
    assert len(table.rows) == 75
    worst = max(row[-1] for row in table.rows)
    assert worst < 3.0, f"worst |z| = {worst:.2f}"
    assert time.perf_counter() - start < 30.0


def test_pathwise_domination_and_monotonicity():
    start = time.perf_counter()
    gamma = 0.05
    for dim in (1, 5):
        model = ar1_shift_model(1.0, SHIFT_A, sigma=1.0, dim=dim, gamma_max=gamma)
        rng = substream(50, dim)
        x0 = 2.0 * rng.standard_normal((1000, dim))
        x0t = 2.0 * rng.standard_normal((1000, dim))
        dist, g, u, _, _ = coupled_batch(model, gamma, x0, x0t, 1000, rng)
        params = StickyParams(gamma, 1.0, model.consts.c_inf, model.majorant)
        w = sticky_from_draws(params, dist[0], g, u)
        # domination up to float round-off (observed violations ~3e-15)
        assert float((dist - w).max()) <= 1e-9
        # pathwise monotonicity of the dominating chain in its start
        w_hi = sticky_from_draws(params, dist[0] + 1.0, g, u)
        assert np.all(w <= w_hi + 1e-12)
    assert time.perf_counter() - start < 60.0


def test_bound_certificates_dominate_simulation():
    start = time.perf_counter()
    gamma = 0.05
    _, c1, c2 = theorem11_constants(SHIFT_INPUTS)
    t12 = theorem12_constants(SHIFT_INPUTS, a=0.5)
    assert gamma <= t12.gamma_bar_1

    # stationary functionals of the dominating chain against the certificates
    params = StickyParams(gamma, 1.0, SHIFT_A, TauMajorant(0.0, 1.0, 0.0))
    est = estimate_stationary(
        params, 200_000, substream(30), burn_in=5000, a_values=(0.5,)
    )
    se_mean = est.std_errors["first_moment"]
    se_atom = est.std_errors["atom_at_zero"]
    se_exp = est.std_errors[("exp_moment", 0.5)]
    assert est.first_moment <= SHIFT_A * c1 + 4 * se_mean
    assert (1.0 - est.atom_at_zero) <= SHIFT_A * c2 + 4 * se_atom
    assert est.exp_moments[0.5] <= SHIFT_A * t12.c3 + 4 * se_exp

    # per-step distance certificate: empirical W1 between the two marginal
    # laws (common-noise samples, so the estimate is noise-free) never
    # exceeds (1 - gamma*m)^k * d0 + [(L+m)R1 + c_inf]/m
    n = 5000
    rng = substream(51)
    x = np.full(n, 3.0)
    xt = np.full(n, 0.0)
    for k in range(1, 1001):
        z = rng.standard_normal(n)
        x = (1 - gamma) * x + math.sqrt(gamma) * z
        xt = (1 - gamma) * xt + gamma * SHIFT_A + math.sqrt(gamma) * z
        assert w1_empirical_1d(x, xt) <= w1_bound(SHIFT_INPUTS, gamma, k, 3.0) + 1e-9
    assert time.perf_counter() - start < 120.0


def test_stationary_gap_exactness():
    # the stationary laws of the shift pair differ by exactly a in W1;
    # kernel-density TV matches the same-variance Gaussian formula
    start = time.perf_counter()
    table = run_experiment("example14", {}, seed=0)
    (_, _, w1_emp, w1_exact, tv_emp, tv_exact) = table.rows[0]
    assert w1_exact == SHIFT_A
    assert w1_emp == pytest.approx(SHIFT_A, abs=0.01)
    assert tv_emp == pytest.approx(tv_exact, abs=0.02)
    assert time.perf_counter() - start < 30.0


def test_coalescence_rate_bound_dominates():
    # TV between k-step laws from two starts, estimated by non-coalescence
    # frequency under shared draws, stays below the certificate at
    # k = ceil(t0/gamma)
    start = time.perf_counter()
    inputs = MomentBoundInputs(
        L=0.1, m=0.5, R1=1.0, c_inf=0.2, sigma=1.0, gamma_bar=0.1, delta_bar=0.5
    )
    gamma = 0.05
    params = StickyParams(gamma, 1.0, 0.2, TauMajorant(0.1, 0.5, 1.0))
    n = 40_000
    rng = substream(40)
    kmax = math.ceil(2.0 / gamma)
    G = rng.standard_normal((kmax, n))
    U = rng.random((kmax, n))
    w_lo = sticky_from_draws(params, np.full(n, 1.0), G, U)
    w_hi = sticky_from_draws(params, np.full(n, 2.0), G, U)
    for t0 in (0.5, 1.0, 2.0):
        k = math.ceil(t0 / gamma)
        emp = float((w_lo[k] != w_hi[k]).mean())
        se = math.sqrt(emp * (1.0 - emp) / n)
        bound = coalescence_tv_bound(inputs, t0, 1.0, 2.0)
        assert emp <= bound + 3 * se, f"t0={t0}: emp {emp:.4f} > bound {bound:.4f}"
    assert time.perf_counter() - start < 60.0


def test_ode_bias_linear_in_h_van_der_pol():
    # posterior bias of the step-h sampler is first order in h: TV against
    # the fine-solver chain decreases in h, halving (ratio in [1.4, 2.8])
    # for at least two adjacent ladder pairs
    start = time.perf_counter()
    table = run_experiment(
        "ode-bias-sweep", {"model": {"name": "van_der_pol"}}, seed=0, threads=5
    )
    tvs = [row[2] for row in table.rows]  # h = 0.04, 0.02, 0.01, 0.005
    assert len(tvs) == 4
    assert all(a > b for a, b in zip(tvs, tvs[1:])), f"not decreasing: {tvs}"
    ratios = [a / b for a, b in zip(tvs, tvs[1:])]
    in_range = sum(1.4 <= r <= 2.8 for r in ratios)
    assert in_range >= 2, f"ratios {ratios}"
    assert time.perf_counter() - start < 600.0


def test_ode_bias_monotone_lotka_volterra():
    # reduced four-parameter run: bias decreases with h on both observed
    # components
    start = time.perf_counter()
    table = run_experiment(
        "ode-bias-sweep", {"model": {"name": "lotka_volterra"}}, seed=0, threads=4
    )
    for c in (0, 1):
        tvs = [row[2] for row in table.rows if row[1] == c]  # h = 0.08, 0.04, 0.02
        assert len(tvs) == 3
        assert all(a > b for a, b in zip(tvs, tvs[1:])), f"component {c}: {tvs}"
    assert time.perf_counter() - start < 900.0


def test_solver_order_properties():
    start = time.perf_counter()
    # Euler state error is first order against the closed-form solution
    model = logistic_model()
    r = 1.0 * 4.0 / 5.0
    exact = logistic_exact(r, 0.5, 3.0)
    errs = [
        abs(solve_augmented_euler(model, [2.0], h, 3.0).at(3.0)[0][0] - exact)
        for h in (0.05, 0.025, 0.0125)
    ]
    for a, b in zip(errs, errs[1:]):
        assert 1.8 <= a / b <= 2.2

    # gradient gap sup-norm over a 64-point low-discrepancy parameter set
    # halves with h (+-15%)
    problem = synth_data("logistic", [1.0], T=5.0, seed=3)
    golden_ratio = (math.sqrt(5.0) - 1.0) / 2.0
    sd = math.sqrt(0.5)
    pts = -2 * sd + 4 * sd * ((0.5 + golden_ratio * np.arange(64)) % 1.0)
    refs = {
        th: grad_log_posterior(problem, [th], solver="reference", h_ref=1e-3)[0]
        for th in pts
    }
    gaps = [
        max(
            abs(grad_log_posterior(problem, [th], solver=("euler", h))[0] - refs[th])
            for th in pts
        )
        for h in (0.04, 0.02, 0.01)
    ]
    for a, b in zip(gaps, gaps[1:]):
        assert 1.7 <= a / b <= 2.3, f"gap ratios from {gaps}"

    # analytic gradients pass central finite differences at 1e-4 relative
    for name, theta in (
        ("logistic", [1.0]),
        ("van_der_pol", [1.0]),
        ("lotka_volterra", [0.6, 0.025, 0.8, 0.025]),
    ):
        prob = synth_data(name, theta, T=5.0, seed=3)
        theta0 = np.asarray(theta, dtype=float) * 1.1
        g = grad_log_posterior(prob, theta0, solver="reference", h_ref=1e-3)
        eps = 1e-5
        for j in range(len(theta0)):
            tp, tm = theta0.copy(), theta0.copy()
            tp[j] += eps
            tm[j] -= eps
            fd = (
                neg_log_posterior(prob, tp, "reference", 1e-3)
                - neg_log_posterior(prob, tm, "reference", 1e-3)
            ) / (2 * eps)
            assert g[j] == pytest.approx(fd, rel=1e-4, abs=1e-6)
    assert time.perf_counter() - start < 60.0


def test_limit_cauchy_study():
    # refining the step halves the discretization gap of the marginal
    # functionals: successive gaps shrink (up to 3x the Monte-Carlo error of
    # the gap) and the finest gap is statistically indistinguishable from 0
    start = time.perf_counter()
    from stickycouple.limit_study import refinement_study

    levels = refinement_study(
        lambda w: -0.5 * np.asarray(w),
        1.0,
        [0.5, 1.0, 2.0],
        [0.1, 0.05, 0.025, 0.0125],
        10_000,
        sigma=1.0,
        c_inf=0.2,
        seed=0,
    )
    for field in ("mean_w", "p_zero"):
        for i in range(3):
            gaps, ses = [], []
            for a, b in zip(levels, levels[1:]):
                gaps.append(abs(float(getattr(a, field)[i] - getattr(b, field)[i])))
                ses.append(
                    float(
                        np.hypot(
                            getattr(a, "se_" + field)[i], getattr(b, "se_" + field)[i]
                        )
                    )
                )
            for g_prev, g_next, se_next in zip(gaps, gaps[1:], ses[1:]):
                assert g_next <= g_prev + 3 * se_next, (field, i, gaps, ses)
            assert gaps[-1] < 3 * ses[-1], (field, i, gaps, ses)
    assert time.perf_counter() - start < 180.0


def test_golden_constant_regression():
    # the frozen independently-derived constants, re-checked end to end
    import test_golden as tg

    start = time.perf_counter()
    tg.test_sup_t2_phi()
    tg.test_zeta()
    tg.test_first_moment_constants()
    tg.test_eta_at_radius_two()
    tg.test_exp_moment_constants()
    tg.test_rate_assembly()
    tg.test_alpha_beta_sequences()
    tg.test_drift_constants_from_origin_bound()
    assert time.perf_counter() - start < 1.0
