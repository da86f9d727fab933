"""FAR models, their perturbations, and the contraction majorant.

A FAR (functional autoregressive) chain moves by Y+ = T_gamma(Y) +
sigma*sqrt(gamma)*Z. A model bundles the exact map T_gamma, the perturbed map
T~_gamma, and the declared contraction constants (L, m, R1, c_inf): outside
radius R1 the map contracts distances by 1 - m*gamma, inside it may expand by
at most 1 + L*gamma, and the two maps differ by at most gamma*c_inf
everywhere. The constants are user-declared and only spot-validated; the
library never infers them.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = [
    "AssumptionConstants",
    "TauMajorant",
    "FarModel",
    "ValidationReport",
    "tau_eval",
    "validate_h1h2",
    "ar1_shift_model",
    "euler_model",
]


@dataclass(frozen=True)
class AssumptionConstants:
    """Declared contraction/perturbation constants.

    lip_L: local expansion rate L >= 0 inside the ball of radius R1.
    contraction_m: contraction rate m > 0 outside radius R1.
    radius_R1: crossover radius R1 >= 0.
    c_inf: uniform drift-gap level, sup_x ||T_gamma(x) - T~_gamma(x)|| <= gamma*c_inf.
    T_inf: optional declared bound on sup_gamma gamma^{-1}||T_gamma(0)||,
        consumed by the origin-drift constant calculator.
    """

    lip_L: float
    contraction_m: float
    radius_R1: float
    c_inf: float
    T_inf: Optional[float] = None

    def __post_init__(self):
        if self.contraction_m <= 0:
            raise ValueError("contraction_m must be > 0")
        for name in ("lip_L", "radius_R1", "c_inf"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.T_inf is not None and self.T_inf < 0:
            raise ValueError("T_inf must be >= 0")


@dataclass(frozen=True)
class TauMajorant:
    """Piecewise-affine majorant of the one-step contraction profile.

    tau(gamma, r) = (1 + L*gamma)*r for r <= R1 and
    (1 + L*gamma)*R1 + (1 - m*gamma)*(r - R1) beyond; it is non-decreasing,
    vanishes at 0, and contracts by at least 1 - m*gamma/2 past
    R2 = 2*R1*(L + m)/m.

    kappa, when given, declares the drift form tau(gamma, w) = w +
    gamma*kappa(w) used by the continuous-limit study (kappa(0) = 0,
    Lipschitz); evaluation then uses kappa instead of the affine profile.
    """

    lip_L: float
    contraction_m: float
    radius_R1: float
    kappa: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if self.contraction_m <= 0:
            raise ValueError("contraction_m must be > 0")
        if self.lip_L < 0 or self.radius_R1 < 0:
            raise ValueError("lip_L and radius_R1 must be >= 0")
        if self.kappa is not None:
            k0 = float(np.asarray(self.kappa(np.asarray(0.0))))
            if abs(k0) > 1e-12:
                raise ValueError("kappa(0) must be 0")
            # reject non-monotone tau on a coarse probe grid at the largest
            # admissible step 1/m
            w = np.linspace(0.0, 100.0, 4001)
            t = w + (1.0 / self.contraction_m) * np.asarray(self.kappa(w), dtype=float)
            if np.any(np.diff(t) < -1e-9):
                raise ValueError("w + gamma*kappa(w) must be non-decreasing")

    @property
    def radius_R2(self) -> float:
        return 2.0 * self.radius_R1 * (self.lip_L + self.contraction_m) / self.contraction_m

    def evaluate(self, gamma, r):
        """tau(gamma, r), vectorized in r."""
        if self.kappa is not None:
            r = np.asarray(r, dtype=float)
            return r + gamma * np.asarray(self.kappa(r), dtype=float)
        return _tau_affine(self.lip_L, self.contraction_m, self.radius_R1, gamma, r)


def _tau_affine(L, m, R1, gamma, r):
    r = np.asarray(r, dtype=float)
    inner = (1.0 + L * gamma) * np.minimum(r, R1)
    outer = (1.0 - m * gamma) * np.maximum(r - R1, 0.0)
    return inner + outer


def tau_eval(maj: TauMajorant, gamma: float, r):
    """Evaluate the affine majorant at step gamma and distance r >= 0."""
    if not 0.0 < gamma <= 1.0 / maj.contraction_m:
        raise ValueError(f"gamma must lie in (0, 1/m]; got {gamma}")
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise ValueError("r must be >= 0")
    out = _tau_affine(maj.lip_L, maj.contraction_m, maj.radius_R1, gamma, r_arr)
    return float(out) if np.isscalar(r) or r_arr.ndim == 0 else out


@dataclass(frozen=True)
class FarModel:
    """Exact/perturbed FAR map pair with noise scale and step range.

    drift_map and perturbed_map take (gamma, x) with x of shape (d,) or
    (batch, d) and must be vectorized over the leading batch dimension.
    """

    dim: int
    sigma: float
    gamma_max: float
    drift_map: Callable[[float, np.ndarray], np.ndarray]
    perturbed_map: Callable[[float, np.ndarray], np.ndarray]
    consts: Optional[AssumptionConstants] = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.sigma <= 0 or self.gamma_max <= 0:
            raise ValueError("sigma and gamma_max must be > 0")
        if self.consts is not None and self.gamma_max > 1.0 / self.consts.contraction_m + 1e-12:
            raise ValueError("gamma_max must be <= 1/m when constants are attached")

    @property
    def majorant(self) -> TauMajorant:
        if self.consts is None:
            raise ValueError("model has no attached constants")
        return TauMajorant(
            self.consts.lip_L, self.consts.contraction_m, self.consts.radius_R1
        )


@dataclass
class ValidationReport:
    """Outcome of the empirical contraction/perturbation spot-check."""

    n_pairs: int
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def validate_h1h2(
    model: FarModel,
    consts: AssumptionConstants,
    n_samples: int = 200,
    seed: int = 0,
    rtol: float = 1e-9,
) -> ValidationReport:
    """Spot-check the declared constants on random pairs at several scales.

    Draws pairs (x, x~) at radii {0.1, 1, 10, 100}*max(1, R1) (probing both
    sides of the crossover) and several gamma values, and records every
    violation of the contraction majorant, of the drift-gap level, and — when
    declared — of T_inf. Violations are report contents, not errors.
    """
    if n_samples < 0:
        raise ValueError("n_samples must be >= 0")
    report = ValidationReport(n_pairs=0)
    if n_samples == 0:
        return report
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    maj = TauMajorant(consts.lip_L, consts.contraction_m, consts.radius_R1)
    gammas = model.gamma_max * np.array([1.0, 0.5, 0.1, 0.01])
    scales = np.array([0.1, 1.0, 10.0, 100.0]) * max(1.0, consts.radius_R1)
    per_cell = max(1, n_samples // (len(gammas) * len(scales)))
    for gamma in gammas:
        for scale in scales:
            for _ in range(per_cell):
                x = scale * _unit(rng, model.dim) * rng.uniform(0.5, 1.5)
                x_t = x + scale * _unit(rng, model.dim) * rng.uniform(0.0, 1.0)
                report.n_pairs += 1
                lhs = float(
                    np.linalg.norm(model.drift_map(gamma, x) - model.drift_map(gamma, x_t))
                )
                rhs = tau_eval(maj, gamma, float(np.linalg.norm(x - x_t)))
                if lhs > rhs * (1 + rtol) + 1e-12:
                    report.violations.append(
                        ("contraction", float(gamma), x, x_t, lhs, rhs)
                    )
                gap = float(
                    np.linalg.norm(model.drift_map(gamma, x) - model.perturbed_map(gamma, x))
                )
                if gap > gamma * consts.c_inf * (1 + rtol) + 1e-12:
                    report.violations.append(
                        ("drift-gap", float(gamma), x, None, gap, gamma * consts.c_inf)
                    )
        if consts.T_inf is not None:
            origin = np.zeros(model.dim)
            t0 = float(np.linalg.norm(model.drift_map(gamma, origin))) / gamma
            if t0 > consts.T_inf * (1 + rtol) + 1e-12:
                report.violations.append(
                    ("origin-bound", float(gamma), origin, None, t0, consts.T_inf)
                )
    return report


def _unit(rng, dim):
    v = rng.standard_normal(dim)
    n = np.linalg.norm(v)
    return v / n if n > 0 else np.eye(dim)[0]


def ar1_shift_model(
    rho_: float, shift_a: float, sigma: float = 1.0, dim: int = 1, gamma_max: float = 0.1
) -> FarModel:
    """Linear autoregressive pair T(y) = (1 - rho*gamma)*y and its shift.

    The perturbed map adds gamma*rho*a along the first coordinate, so the
    constants are L = 0, m = rho, R1 = 0, c_inf = rho*a, and both stationary
    laws are Gaussian with the same covariance (see metrics.ar1_stationary).
    """
    if rho_ <= 0:
        raise ValueError("rho_ must be > 0")
    shift = np.zeros(dim)
    shift[0] = shift_a

    def drift(gamma, x):
        return (1.0 - rho_ * gamma) * np.asarray(x, dtype=float)

    def drift_pert(gamma, x):
        return (1.0 - rho_ * gamma) * np.asarray(x, dtype=float) + gamma * rho_ * shift

    consts = AssumptionConstants(
        lip_L=0.0, contraction_m=rho_, radius_R1=0.0, c_inf=rho_ * abs(shift_a), T_inf=0.0
    )
    return FarModel(dim, sigma, gamma_max, drift, drift_pert, consts)


def euler_model(
    b: Callable[[np.ndarray], np.ndarray],
    b_tilde: Callable[[np.ndarray], np.ndarray],
    dim: int,
    sigma: float,
    gamma_max: float,
    consts: Optional[AssumptionConstants] = None,
) -> FarModel:
    """Euler-type pair T_gamma(x) = x + gamma*b(x) from two drift fields.

    A Lipschitz, dissipative b yields valid constants L = L_b, m = m_b/2,
    R1 = R_b for gamma < m_b/L_b^2.
    """

    def drift(gamma, x):
        x = np.asarray(x, dtype=float)
        return x + gamma * np.asarray(b(x), dtype=float)

    def drift_pert(gamma, x):
        x = np.asarray(x, dtype=float)
        return x + gamma * np.asarray(b_tilde(x), dtype=float)

    return FarModel(dim, sigma, gamma_max, drift, drift_pert, consts)
