"""Named batch experiments behind the command-line harness.

Each experiment takes a validated configuration dictionary and a seed and
returns a ResultTable; everything is a pure function of (config, seed) so
rerunning writes byte-identical CSV. Replication-level parallelism uses one
RNG substream per unit and deterministic aggregation order, so the thread
count never changes the output.
"""

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from stickycouple import __version__
from stickycouple import ode_bayes
from stickycouple.bounds import MomentBoundInputs, build_bound_report
from stickycouple.coupling import coupled_batch
from stickycouple.limit_study import refinement_study
from stickycouple.metrics import ar1_stationary, gaussian_tv_same_var, tv_kde, w1_empirical_1d
from stickycouple.model import ar1_shift_model
from stickycouple.sticky_chain import (
    StickyParams,
    mass_at_zero,
    one_step_exp_moment,
    one_step_mean,
    sticky_from_draws,
    sticky_step,
)
from stickycouple.streams import substream

__all__ = ["ResultTable", "ConfigError", "EXPERIMENTS", "run_experiment", "config_hash"]


class ConfigError(ValueError):
    """Invalid configuration; carries the offending key."""

    def __init__(self, key, message):
        super().__init__(message)
        self.key = key


@dataclass
class ResultTable:
    name: str
    columns: List[str]
    rows: List[tuple]
    summary: List[str] = field(default_factory=list)
    exit_code: int = 0

    def provenance(self, cfg_hash: str, seed: int) -> List[str]:
        return [
            f"# experiment={self.name}",
            f"# config_hash={cfg_hash}",
            f"# seed={seed}",
            f"# version={__version__}",
        ]


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _get(config, section, key, default=None, required=False):
    sec = config.get(section, {})
    if key not in sec:
        if required:
            raise ConfigError(f"{section}.{key}", f"missing required key {section}.{key}")
        return default
    return sec[key]


_ALLOWED = {
    "validate-kernel": {
        "experiment": {"kind", "seed"},
        "majorant": {"L", "m", "R1"},
        "run": {"gamma_values", "w_values", "sigma", "c_inf", "n_draws", "a"},
    },
    "coupling-domination": {
        "experiment": {"kind", "seed"},
        "model": {"rho", "shift_a", "sigma", "dim"},
        "run": {"gamma", "n_steps", "n_paths", "x0_scale"},
    },
    "bounds-report": {
        "experiment": {"kind", "seed"},
        "bounds": {"L", "m", "R1", "c_inf", "sigma", "gamma_bar", "delta_bar", "gamma", "a", "t0"},
    },
    "example14": {
        "experiment": {"kind", "seed"},
        "model": {"rho", "shift_a", "sigma"},
        "run": {"gamma", "n_samples", "burn_in"},
    },
    "ode-bias-sweep": {
        "experiment": {"kind", "seed"},
        "model": {"name", "theta_true", "T", "N", "noise", "data_seed"},
        "run": {
            "gamma",
            "n_iter",
            "burn_in",
            "h_ladder",
            "h_reference",
            "n_replications",
            "grid_lo",
            "grid_hi",
            "grid_points",
            "wall_slope",
            "grad_cap",
            "components",
            "reference_rk4",
        },
    },
    "limit-study": {
        "experiment": {"kind", "seed"},
        "run": {
            "gamma_ladder",
            "kappa_slope",
            "c_inf",
            "sigma",
            "w0",
            "times",
            "n_paths",
            "common_randomness",
        },
    },
}


def validate_config(kind: str, config: dict):
    if kind not in _ALLOWED:
        raise ConfigError("experiment.kind", f"unknown experiment kind {kind!r}")
    allowed = _ALLOWED[kind]
    for section, content in config.items():
        if section not in allowed:
            raise ConfigError(section, f"unknown section {section!r} for {kind}")
        if not isinstance(content, dict):
            raise ConfigError(section, f"section {section!r} must be a table")
        for key in content:
            if key not in allowed[section]:
                raise ConfigError(f"{section}.{key}", f"unknown key {section}.{key} for {kind}")


# ---------------------------------------------------------------------------


def run_validate_kernel(config, seed, threads=1) -> ResultTable:
    from stickycouple.model import TauMajorant

    L = _get(config, "majorant", "L", 0.1)
    m = _get(config, "majorant", "m", 0.5)
    R1 = _get(config, "majorant", "R1", 1.0)
    gammas = _get(config, "run", "gamma_values", [0.02, 0.05, 0.1, 0.5, 1.0])
    ws = _get(config, "run", "w_values", [0.0, 0.5, 1.0, 2.0, 5.0])
    sigma = _get(config, "run", "sigma", 1.0)
    c_inf = _get(config, "run", "c_inf", 0.2)
    n = int(_get(config, "run", "n_draws", 100_000))
    a = _get(config, "run", "a", 0.5)
    maj = TauMajorant(L, m, R1)
    rows = []
    worst = 0.0

    def one_cell(idx):
        i, j = idx
        gamma, w = float(gammas[i]), float(ws[j])
        params = StickyParams(gamma, sigma, c_inf, maj)
        rng = substream(seed, 11, i, j)
        g = rng.standard_normal(n)
        u = rng.random(n)
        w_plus = sticky_step(params, np.full(n, w), g, u)
        out = []
        for stat, emp_vals, closed in (
            ("mass_at_zero", (w_plus == 0.0).astype(float), mass_at_zero(params, w)),
            ("one_step_mean", w_plus, one_step_mean(params, w)),
            ("exp_moment", np.expm1(a * w_plus), one_step_exp_moment(params, w, a)),
        ):
            emp = float(emp_vals.mean())
            se = float(emp_vals.std(ddof=1) / np.sqrt(n))
            z = abs(emp - closed) / se if se > 0 else 0.0
            out.append((gamma, w, stat, closed, emp, se, z))
        return out

    cells = [(i, j) for i in range(len(gammas)) for j in range(len(ws))]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as ex:
        for cell_rows in ex.map(one_cell, cells):
            rows.extend(cell_rows)
            worst = max(worst, max(r[-1] for r in cell_rows))
    table = ResultTable(
        "validate-kernel",
        ["gamma", "w", "statistic", "closed_form", "empirical", "stderr", "z_score"],
        rows,
        summary=[f"{len(rows)} closed-form checks, worst |z| = {worst:.2f} (limit 4)"],
    )
    if worst > 4.0:
        table.exit_code = 1
        table.summary.append("FAIL: at least one statistic beyond 4 standard errors")
    return table


def run_coupling_domination(config, seed, threads=1) -> ResultTable:
    rho = _get(config, "model", "rho", 1.0)
    shift_a = _get(config, "model", "shift_a", 0.5)
    sigma = _get(config, "model", "sigma", 1.0)
    dim = int(_get(config, "model", "dim", 1))
    gamma = _get(config, "run", "gamma", 0.05)
    n_steps = int(_get(config, "run", "n_steps", 200))
    n_paths = int(_get(config, "run", "n_paths", 500))
    x0_scale = _get(config, "run", "x0_scale", 2.0)
    model = ar1_shift_model(rho, shift_a, sigma=sigma, dim=dim, gamma_max=max(gamma, 0.1))
    rng = substream(seed, 12)
    x0 = x0_scale * rng.standard_normal((n_paths, dim))
    x0t = x0_scale * rng.standard_normal((n_paths, dim))
    dist, g, u, _, _ = coupled_batch(model, gamma, x0, x0t, n_steps, rng)
    params = StickyParams(gamma, sigma, model.consts.c_inf, model.majorant)
    w = sticky_from_draws(params, dist[0], g, u)
    viol = dist - w
    rows = []
    for k in range(n_steps + 1):
        rows.append(
            (
                k,
                float(dist[k].max()),
                float(w[k].max()),
                float(viol[k].max()),
                float((dist[k] == 0.0).mean()),
                float((w[k] == 0.0).mean()),
            )
        )
    worst = float(viol.max())
    table = ResultTable(
        "coupling-domination",
        ["k", "max_distance", "max_w", "max_violation", "merged_fraction", "w_atom_fraction"],
        rows,
        summary=[
            f"{n_paths} coupled paths x {n_steps} steps in dimension {dim}",
            f"max pathwise violation of distance <= W: {worst:.3e} (must be <= 0)",
        ],
    )
    if worst > 1e-9:
        table.exit_code = 1
        table.summary.append("FAIL: domination violated")
    return table


def run_bounds_report(config, seed, threads=1) -> ResultTable:
    sec = config.get("bounds", {})
    try:
        inputs = MomentBoundInputs(
            L=sec.get("L", 0.1),
            m=sec.get("m", 0.5),
            R1=sec.get("R1", 1.0),
            c_inf=sec.get("c_inf", 0.1),
            sigma=sec.get("sigma", 1.0),
            gamma_bar=sec.get("gamma_bar", 0.1),
            delta_bar=sec.get("delta_bar"),
        )
    except ValueError as exc:
        raise ConfigError("bounds", str(exc))
    report = build_bound_report(
        inputs, gamma=sec.get("gamma"), a=sec.get("a", 0.5), t0=sec.get("t0")
    )
    rows = [(name, float(value)) for name, value in report.as_rows()]
    return ResultTable(
        "bounds-report", ["constant", "value"], rows, summary=list(report.as_lines())
    )


def run_example14(config, seed, threads=1) -> ResultTable:
    rho = _get(config, "model", "rho", 1.0)
    shift_a = _get(config, "model", "shift_a", 0.5)
    sigma = _get(config, "model", "sigma", 1.0)
    gamma = _get(config, "run", "gamma", 0.05)
    n = int(_get(config, "run", "n_samples", 100_000))
    burn = int(_get(config, "run", "burn_in", 1000))
    (mu0, v), (mu1, _) = ar1_stationary(rho, gamma, sigma, shift_a)
    rng = substream(seed, 13)
    # both stationary laws are Gaussian; sample the chains long enough to
    # forget the start, then read one value per independent replica
    rho_fac = 1.0 - rho * gamma
    x = np.zeros(n)
    y = np.zeros(n)
    for _ in range(burn):
        z = rng.standard_normal(n)
        x = rho_fac * x + sigma * np.sqrt(gamma) * z
        z2 = rng.standard_normal(n)
        y = rho_fac * y + gamma * rho * shift_a + sigma * np.sqrt(gamma) * z2
    w1_emp = w1_empirical_1d(x, y)
    tv_emp = tv_kde(x, y)
    tv_exact = gaussian_tv_same_var(abs(mu1 - mu0), float(np.sqrt(v)))
    rows = [(n, gamma, w1_emp, abs(shift_a), tv_emp, tv_exact)]
    return ResultTable(
        "example14",
        ["n_samples", "gamma", "w1_empirical", "w1_exact", "tv_empirical", "tv_exact"],
        rows,
        summary=[
            f"stationary W1: empirical {w1_emp:.4f} vs exact {abs(shift_a)} ",
            f"stationary TV: empirical {tv_emp:.4f} vs exact {tv_exact:.4f}",
        ],
    )


def _vdp_sweep(config, seed, threads) -> ResultTable:
    theta_true = _get(config, "model", "theta_true", [1.0])
    T = _get(config, "model", "T", 10.0)
    N = _get(config, "model", "N", None)
    noise = _get(config, "model", "noise", None)
    data_seed = int(_get(config, "model", "data_seed", 1))
    gamma = _get(config, "run", "gamma", 1e-2)
    n_iter = int(_get(config, "run", "n_iter", 200_000))
    burn_in = int(_get(config, "run", "burn_in", 10_000))
    h_ladder = [float(h) for h in _get(config, "run", "h_ladder", [0.04, 0.02, 0.01, 0.005])]
    h_ref = _get(config, "run", "h_reference", 1e-4)
    n_rep = int(_get(config, "run", "n_replications", 1))
    lo = _get(config, "run", "grid_lo", -1.0)
    hi = _get(config, "run", "grid_hi", 3.0)
    n_grid = int(_get(config, "run", "grid_points", 4096))
    wall_slope = _get(config, "run", "wall_slope", 50.0)
    cap = _get(config, "run", "grad_cap", 500.0)
    problem = ode_bayes.synth_data(
        "van_der_pol", theta_true, T=T, N=N, noise=noise, seed=data_seed
    )
    grid = np.linspace(lo, hi, n_grid)
    tables = {h: ode_bayes.tabulate_gradient_1d(problem, grid, h)[1] for h in [h_ref] + h_ladder}

    def chain(h, rep):
        return ode_bayes.tabulated_ula_chain(
            grid,
            tables[h],
            gamma,
            n_iter,
            burn_in,
            seed=seed + 1000 * rep,
            theta0=float(theta_true[0]),
            wall=(lo, hi, wall_slope),
            clip_cap=cap,
        )

    units = [(h, rep) for rep in range(n_rep) for h in [h_ref] + h_ladder]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as ex:
        samples = dict(zip(units, ex.map(lambda t: chain(*t), units)))
    rows = []
    for rep in range(n_rep):
        ref = samples[(h_ref, rep)]
        for h in h_ladder:
            rows.append((h, 0, tv_kde(samples[(h, rep)], ref), rep))
    table = ResultTable(
        "ode-bias-sweep",
        ["h", "component", "tv_vs_reference", "replication"],
        rows,
        summary=[f"van_der_pol: gamma={gamma}, {n_iter} iterations, reference h={h_ref}"],
    )
    for h, _, tv, rep in rows:
        table.summary.append(f"  rep {rep}: TV(pi_gamma, pi_gamma_h) at h={h}: {tv:.4f}")
    return table


def _lv_sweep(config, seed, threads) -> ResultTable:
    theta_true = _get(config, "model", "theta_true", [0.6, 0.025, 0.8, 0.025])
    T = _get(config, "model", "T", 10.0)
    N = _get(config, "model", "N", None)
    data_seed = int(_get(config, "model", "data_seed", 2))
    gamma = _get(config, "run", "gamma", 1e-6)
    n_iter = int(_get(config, "run", "n_iter", 200_000))
    burn_in = int(_get(config, "run", "burn_in", 20_000))
    h_ladder = [float(h) for h in _get(config, "run", "h_ladder", [0.08, 0.04, 0.02])]
    h_ref = _get(config, "run", "h_reference", 0.02)
    components = [int(c) for c in _get(config, "run", "components", [0, 1])]
    problem = ode_bayes.synth_data("lotka_volterra", theta_true, T=T, N=N, seed=data_seed)
    th0 = np.asarray(theta_true, dtype=float)

    def chain(h, rk4):
        return ode_bayes.lv_ula_chain(
            problem, th0, gamma, n_iter, burn_in, h, seed=seed, use_rk4=rk4
        )

    units = [(h_ref, True)] + [(h, False) for h in h_ladder]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as ex:
        results = dict(zip(units, ex.map(lambda t: chain(*t), units)))
    ref = results[(h_ref, True)]
    rows = []
    for h in h_ladder:
        out = results[(h, False)]
        for c in components:
            rows.append((h, c, tv_kde(out[:, c], ref[:, c]), 0))
    table = ResultTable(
        "ode-bias-sweep",
        ["h", "component", "tv_vs_reference", "replication"],
        rows,
        summary=[
            f"lotka_volterra: gamma={gamma}, {n_iter} iterations, "
            f"reference RK4 at h={h_ref}"
        ],
    )
    for h, c, tv, _ in rows:
        table.summary.append(f"  component {c}, h={h}: TV {tv:.4f}")
    return table


def run_ode_bias_sweep(config, seed, threads=1) -> ResultTable:
    name = _get(config, "model", "name", "van_der_pol")
    if name == "van_der_pol":
        return _vdp_sweep(config, seed, threads)
    if name == "lotka_volterra":
        return _lv_sweep(config, seed, threads)
    raise ConfigError("model.name", f"ode-bias-sweep supports van_der_pol or lotka_volterra, got {name!r}")


def run_limit_study(config, seed, threads=1) -> ResultTable:
    ladder = [float(g) for g in _get(config, "run", "gamma_ladder", [0.1, 0.05, 0.025, 0.0125])]
    slope = _get(config, "run", "kappa_slope", -0.5)
    c_inf = _get(config, "run", "c_inf", 0.2)
    sigma = _get(config, "run", "sigma", 1.0)
    w0 = _get(config, "run", "w0", 1.0)
    times = [float(t) for t in _get(config, "run", "times", [0.5, 1.0, 2.0])]
    n_paths = int(_get(config, "run", "n_paths", 10_000))
    crn = bool(_get(config, "run", "common_randomness", True))
    if slope > 0:
        raise ConfigError("run.kappa_slope", "kappa_slope must be <= 0 for a contractive drift")
    levels = refinement_study(
        lambda w: slope * np.asarray(w),
        w0,
        times,
        ladder,
        n_paths,
        sigma=sigma,
        c_inf=c_inf,
        seed=seed,
        common_randomness=crn,
    )
    rows = []
    for lf in levels:
        for i, t in enumerate(lf.times):
            rows.append((lf.gamma, float(t), "p_zero", float(lf.p_zero[i]), float(lf.se_p_zero[i])))
            rows.append((lf.gamma, float(t), "mean_w", float(lf.mean_w[i]), float(lf.se_mean_w[i])))
            rows.append((lf.gamma, float(t), "mean_w2", float(lf.mean_w2[i]), float(lf.se_mean_w2[i])))
    summary = [f"{len(ladder)} ladder levels, {n_paths} paths each, kappa(w) = {slope}*w"]
    for a, b in zip(levels, levels[1:]):
        gap = float(np.max(np.abs(a.mean_w - b.mean_w)))
        summary.append(f"  max |E W_t| gap {a.gamma} -> {b.gamma}: {gap:.4f}")
    return ResultTable(
        "limit-study", ["gamma", "t", "functional", "estimate", "stderr"], rows, summary=summary
    )


EXPERIMENTS = {
    "validate-kernel": run_validate_kernel,
    "coupling-domination": run_coupling_domination,
    "bounds-report": run_bounds_report,
    "example14": run_example14,
    "ode-bias-sweep": run_ode_bias_sweep,
    "limit-study": run_limit_study,
}


def run_experiment(kind: str, config: dict, seed: int, threads: int = 1) -> ResultTable:
    validate_config(kind, config)
    return EXPERIMENTS[kind](config, seed, threads)
