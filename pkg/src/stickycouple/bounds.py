"""Deterministic calculators for the explicit perturbation-bound constants.

Every function here is pure arithmetic on the declared model constants
(L, m, R1, c_inf, sigma, gamma_bar): stationary moment bounds for the
dominating chain (first moment via c1, atom complement via c2, exponential
moment via c3), the coupled-distance bound, convergence-rate assemblies from
a Doeblin-set argument, coalescence TV bounds, and the drift constants for
the original d-dimensional chain. Free analysis parameters (delta_bar, t0)
are exposed with grid-minimizing defaults.
"""

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import ndtr

__all__ = [
    "MomentBoundInputs",
    "AlphaBetaSequence",
    "BoundReport",
    "zeta_const",
    "eta_R",
    "theorem11_constants",
    "theorem12_constants",
    "w1_bound",
    "sticky_convergence_rate",
    "theorem4_bound",
    "appendixA_constants",
    "tv_contraction_R",
    "coalescence_tv_bound",
    "finite_step_tv_bound",
    "default_delta_bar",
    "build_bound_report",
]

_LOG_MAX = 709.0  # overflow threshold for exp in double precision


@lru_cache(maxsize=1)
def sup_t2_phi() -> float:
    """sup_{t>=0} t^2 * Phi(-t), by bracketed maximization to ~1e-12 in t."""
    res = minimize_scalar(
        lambda t: -(t * t) * ndtr(-t),
        bounds=(0.25, 4.0),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return float(-res.fun)


def zeta_const(L: float, sigma: float, gamma_bar: float) -> float:
    """Gaussian smoothing constant 2(1+gamma_bar*L)^2 sigma^2 (2 sqrt(2 pi))^-1 [sup + 1/8]."""
    return (
        2.0
        * (1.0 + gamma_bar * L) ** 2
        * sigma**2
        / (2.0 * math.sqrt(2.0 * math.pi))
        * (sup_t2_phi() + 0.125)
    )


@dataclass(frozen=True)
class MomentBoundInputs:
    """Model constants plus the free tail-analysis parameter delta_bar.

    delta_bar must lie in (0, min(1/L, (sigma/(e*c_inf))^2)] with the
    convention 1/0 = +inf; pass delta_bar=None to have it chosen by
    minimizing c2 over a log-grid (default_delta_bar).
    """

    L: float
    m: float
    R1: float
    c_inf: float
    sigma: float
    gamma_bar: float
    delta_bar: Optional[float] = None

    def __post_init__(self):
        if self.m <= 0 or self.sigma <= 0 or self.gamma_bar <= 0:
            raise ValueError("need m > 0, sigma > 0, gamma_bar > 0")
        if min(self.L, self.R1, self.c_inf) < 0:
            raise ValueError("L, R1, c_inf must be >= 0")
        if self.delta_bar is not None and not (
            0.0 < self.delta_bar <= self.delta_bar_max()
        ):
            raise ValueError(
                f"delta_bar must lie in (0, {self.delta_bar_max()}]; got {self.delta_bar}"
            )

    def delta_bar_max(self) -> float:
        lim_L = 1.0 / self.L if self.L > 0 else math.inf
        lim_c = (self.sigma / (math.e * self.c_inf)) ** 2 if self.c_inf > 0 else math.inf
        return min(lim_L, lim_c)

    def resolved(self) -> "MomentBoundInputs":
        """Return self with delta_bar pinned (auto-selected when absent)."""
        if self.delta_bar is not None:
            return self
        return replace(self, delta_bar=default_delta_bar(self))


def default_delta_bar(inputs: MomentBoundInputs, n_grid: int = 50) -> float:
    """Pick delta_bar minimizing c2 over a log-grid of admissible values."""
    hi = inputs.delta_bar_max()
    if not math.isfinite(hi):
        hi = 100.0 / inputs.m
    grid = np.minimum(
        np.exp(np.linspace(math.log(hi) - 4.0 * math.log(10.0), math.log(hi), n_grid)), hi
    )
    best, best_c2 = grid[-1], math.inf
    for d in grid:
        cand = replace(inputs, delta_bar=float(d))
        _, _, c2 = theorem11_constants(cand)
        if c2 < best_c2:
            best, best_c2 = float(d), c2
    return best


def eta_R(inputs: MomentBoundInputs, R: float) -> float:
    """Near-zero occupation constant: stationary mass of (0, R) is <= eta_R * c_inf."""
    if R < 0:
        raise ValueError("R must be >= 0")
    inp = inputs.resolved()
    L, sigma, c_inf = inp.L, inp.sigma, inp.c_inf
    s = inp.delta_bar + inp.gamma_bar
    z = zeta_const(L, sigma, inp.gamma_bar)
    num = math.sqrt(s) * (
        2.0 * z * math.exp(3.0 * s * L) / sigma**3
        + math.exp(s * L) / (2.0 * math.sqrt(2.0 * math.pi) * sigma)
    )
    den = float(
        ndtr(
            -((1.0 + inp.gamma_bar * L) * R + s * c_inf)
            / (2.0 * math.sqrt(inp.delta_bar) * sigma * math.exp(-s * L))
        )
    )
    return num / den if den > 0.0 else math.inf


def theorem11_constants(inputs: MomentBoundInputs):
    """Stationary bounds for the dominating chain: returns (eta_1, c1, c2).

    The stationary first moment is <= c_inf*c1 and the stationary mass of
    (0, inf) is <= c_inf*c2.
    """
    inp = inputs.resolved()
    L, m, sigma = inp.L, inp.m, inp.sigma
    s = inp.delta_bar + inp.gamma_bar
    z = zeta_const(L, sigma, inp.gamma_bar)
    eta1 = eta_R(inp, inp.R1)
    c1 = eta1 * inp.R1 * (1.0 + L / m) + 1.0 / m
    c2 = math.exp(s * L) * (
        c1 * (1.0 + inp.gamma_bar * L) / math.sqrt(inp.delta_bar) + math.sqrt(s)
    ) / (math.sqrt(2.0 * math.pi) * sigma) + 2.0 * z * math.sqrt(s) * math.exp(
        3.0 * s * L
    ) / sigma**3
    return eta1, c1, c2


class Theorem12Constants(NamedTuple):
    gamma_bar_1: float
    lambda_a: float
    R_tilde_a: float
    R_a: float
    C_a: float
    B_a: float
    D_a: float
    A_a: float
    alpha_a: float
    c3: float


def theorem12_constants(inputs: MomentBoundInputs, a: float) -> Theorem12Constants:
    """Exponential-moment machinery: the stationary value of e^{aw}-1 is
    <= c_inf*c3 for steps gamma <= gamma_bar_1. Exponents are assembled in
    log-space; c3 becomes +inf when they exceed double range."""
    if a <= 0:
        raise ValueError("a must be > 0")
    inp = inputs.resolved()
    L, m, c_inf, sigma, gb = inp.L, inp.m, inp.c_inf, inp.sigma, inp.gamma_bar
    R_tilde = max(1.0, inp.R1, (4.0 * a * sigma**2 + 2.0 * c_inf) / m, 16.0 * sigma**2 * a / m)
    log_lam = -a * m * R_tilde / 8.0
    lam = math.exp(log_lam)
    tail_term = (
        2.0
        * sigma**2
        * a
        / math.sqrt(2.0 * math.pi)
        * math.exp((a + 2.0 * sigma * math.sqrt(gb) * a) ** 2 / 2.0)
    )
    C_a = a * (c_inf + 2.0 * a * sigma**2) * math.exp(
        a * gb * (c_inf + 2.0 * a * sigma**2)
    ) + tail_term
    R_a = max(R_tilde, math.log1p(C_a / (-log_lam * math.exp(2.0 * gb * log_lam))) / a)
    gamma_bar_1 = min(gb, 1.0 / (-log_lam), 1.0 / (4.0 * sigma**2))
    log_B = a * (c_inf + 2.0 * a * sigma**2 + L * R_a)
    B_a = math.exp(log_B) if log_B < _LOG_MAX else math.inf
    log_wstar_Ra = _log_expm1(a * R_a)
    D_a = (
        a
        * (c_inf + 2.0 * a * sigma**2 + L * R_a)
        * math.exp(min(a * gb * (c_inf + 2.0 * a * sigma**2 + L * R_a), _LOG_MAX))
        + tail_term
        + 2.0 * sigma**2 * a**2 * math.exp(min(2.0 * gb * log_lam + log_wstar_Ra, _LOG_MAX))
    )
    alpha_a = (log_B - log_lam) * math.exp(
        min(a * R_a + gb * log_B, _LOG_MAX)
    ) - log_lam + D_a
    eta_Ra = eta_R(inp, R_a)
    # c3 = (B/lam)^gb * a*(L R_a + 2 sigma^2 a + c_inf + m R_tilde/8) * eta_{R_a}
    #      * (e^{a R_a}-1)/|log lam|  +  [D_a eta_{R_a} + A_a]/|log lam|
    log_first = (
        gb * (log_B - log_lam)
        + math.log(a * (L * R_a + 2.0 * sigma**2 * a + c_inf + m * R_tilde / 8.0))
        + (math.log(eta_Ra) if math.isfinite(eta_Ra) else math.inf)
        + log_wstar_Ra
        - math.log(-log_lam)
    )
    A_a = (
        4.0
        * math.exp(a * gb * (c_inf + 2.0 * a * sigma**2))
        * (gb * (2.0 * a * sigma**2 + c_inf / 2.0) ** 2 + sigma**2)
        / (2.0 * sigma**2)
    )
    if log_first > _LOG_MAX or not math.isfinite(D_a) or not math.isfinite(eta_Ra):
        c3 = math.inf
    else:
        c3 = math.exp(log_first) + (D_a * eta_Ra + A_a) / (-log_lam)
    return Theorem12Constants(
        gamma_bar_1, lam, R_tilde, R_a, C_a, B_a, D_a, A_a, alpha_a, c3
    )


def _log_expm1(t: float) -> float:
    """log(e^t - 1) without overflow."""
    if t <= 0:
        raise ValueError("t must be > 0")
    if t > 36.0:
        return t
    return math.log(math.expm1(t))


@dataclass(frozen=True)
class AlphaBetaSequence:
    """Accumulated drift-gap and noise scales of the k-step transition.

    alpha_k = gamma*c_inf*sum_{i<k}(1+gamma*L)^{-i},
    beta_k^2 = gamma*sigma^2*sum_{i<k}(1+gamma*L)^{-2i}, in closed form.
    """

    gamma: float
    c_inf: float
    sigma: float
    L: float

    def alpha(self, k: int) -> float:
        if k < 1:
            raise ValueError("k must be >= 1")
        r = 1.0 / (1.0 + self.gamma * self.L)
        if r == 1.0:
            return k * self.gamma * self.c_inf
        return self.gamma * self.c_inf * (1.0 - r**k) / (1.0 - r)

    def beta(self, k: int) -> float:
        if k < 1:
            raise ValueError("k must be >= 1")
        r2 = 1.0 / (1.0 + self.gamma * self.L) ** 2
        if r2 == 1.0:
            return math.sqrt(k * self.gamma) * self.sigma
        return math.sqrt(self.gamma * self.sigma**2 * (1.0 - r2**k) / (1.0 - r2))


def w1_bound(inputs: MomentBoundInputs, gamma: float, k: int, dist0: float) -> float:
    """Coupled-distance bound (1-gamma*m)^k*dist0 + [(L+m)*R1 + c_inf]/m."""
    if not 0.0 < gamma <= inputs.gamma_bar:
        raise ValueError("gamma must lie in (0, gamma_bar]")
    if k < 0 or dist0 < 0:
        raise ValueError("k and dist0 must be >= 0")
    return (1.0 - gamma * inputs.m) ** k * dist0 + (
        (inputs.L + inputs.m) * inputs.R1 + inputs.c_inf
    ) / inputs.m


def _coalescence_overlap(inputs: MomentBoundInputs, t0: float, top: float) -> float:
    """Gaussian-overlap level of the k = ceil(t0/gamma)-step transitions,
    uniform over gamma in (0, gamma_bar].

    Obtained from the exact k-step bound by relaxing its accumulated
    constants: tau(top) <= (1+gb*L)*top, alpha_k <= (t0+gb)*c_inf, and
    beta_k^2 >= sigma^2*(1-e^{-2*t0*L/(1+gb*L)})/(L*(2+gb*L)), giving

        2*Phi(-sqrt(L*(2+gb*L))*((1+gb*L)*top + (t0+gb)*c_inf)
              / (2*sigma*sqrt(1-e^{-2*t0*L/(1+gb*L)}))),

    with the L -> 0 limit (top + (t0+gb)*c_inf)/(2*sigma*sqrt(t0)).
    """
    if t0 <= 0:
        raise ValueError("t0 must be > 0")
    L, gb = inputs.L, inputs.gamma_bar
    num = (1.0 + gb * L) * top + (t0 + gb) * inputs.c_inf
    if L > 0:
        beta_low = inputs.sigma * math.sqrt(
            -math.expm1(-2.0 * t0 * L / (1.0 + gb * L)) / (L * (2.0 + gb * L))
        )
    else:
        beta_low = inputs.sigma * math.sqrt(t0)
    return 2.0 * float(ndtr(-num / (2.0 * beta_low)))


def coalescence_tv_bound(inputs: MomentBoundInputs, t0: float, w: float, w_tilde: float) -> float:
    """TV bound between ceil(t0/gamma)-step laws started from w and w_tilde:
    one minus the Gaussian overlap of the worse starting point."""
    return 1.0 - _coalescence_overlap(inputs, t0, max(w, w_tilde))


def finite_step_tv_bound(
    inputs: MomentBoundInputs, gamma: float, k: int, w: float, w_tilde: float
) -> float:
    """Exact finite-k coalescence bound 1 - 2*Phi(-(tau(w v w~)+alpha_k)/(2*beta_k))."""
    if k < 1:
        raise ValueError("k must be >= 1")
    seq = AlphaBetaSequence(gamma, inputs.c_inf, inputs.sigma, inputs.L)
    top = max(w, w_tilde)
    tau_top = (1.0 + inputs.L * gamma) * min(top, inputs.R1) + (1.0 - inputs.m * gamma) * max(
        top - inputs.R1, 0.0
    )
    return 1.0 - 2.0 * float(ndtr(-(tau_top + seq.alpha(k)) / (2.0 * seq.beta(k))))


class RateResult(NamedTuple):
    rho: float
    C_tilde: float
    eps1: float
    delta1: float
    M1: float
    lambda_v: float
    beta_v: float
    log_rho: float
    t0: float


def sticky_convergence_rate(
    inputs: MomentBoundInputs,
    gamma: float,
    t0: Optional[float] = None,
    mode: str = "linear",
    a: Optional[float] = None,
) -> RateResult:
    """Geometric V-norm convergence rate of the dominating chain.

    Assembles a Doeblin-set rate: delta = 4*beta/(1-lambda) - 1, the set's
    radius M, the minorization level eps via coalescence_tv_bound at
    M + t0*c_inf, then log(rho) = (t0+gamma_bar)^{-1} * log(1-eps)*
    log(lam_bar)/(log(1-eps)+log(lam_bar)-log(beta_bar)). mode "linear" uses
    V(w) = 1 + w; mode "exponential" uses V(w) = e^{aw}. t0 defaults to the
    grid argmin of rho over {2^-4..2^4}/m.
    """
    inp = inputs.resolved()
    if mode not in ("linear", "exponential"):
        raise ValueError("mode must be 'linear' or 'exponential'")
    if mode == "exponential" and (a is None or a <= 0):
        raise ValueError("exponential mode needs a > 0")
    if t0 is None:
        best = None
        for i in range(-4, 5):
            cand_t0 = 2.0**i / inp.m
            try:
                cand = _rate_at(inp, gamma, cand_t0, mode, a)
            except ValueError:
                continue
            if best is None or cand.rho < best.rho:
                best = cand
        if best is None:
            raise ValueError("no admissible t0 in the default grid")
        return best
    return _rate_at(inp, gamma, t0, mode, a)


def _rate_at(inp, gamma, t0, mode, a):
    if t0 <= 0:
        raise ValueError("t0 must be > 0")
    if mode == "linear":
        lam = math.exp(-inp.m)
        beta = (inp.R1 * (inp.m + inp.L) + inp.c_inf + inp.m) / inp.m
        delta = 4.0 * beta / (1.0 - lam) - 1.0
        M = delta - 1.0  # sup{w : 1 + w <= delta}
    else:
        t12 = theorem12_constants(inp, a)
        if gamma > t12.gamma_bar_1:
            raise ValueError("gamma exceeds gamma_bar_1 for exponential mode")
        lam = t12.lambda_a
        beta = (t0 + inp.gamma_bar) * t12.alpha_a * lam ** (-inp.gamma_bar)
        delta = 4.0 * beta / (1.0 - lam) - 1.0
        if delta < 1.0:
            raise ValueError("Doeblin level below 1 in exponential mode")
        M = math.log(delta) / a  # sup{w : e^{aw} <= delta}
    if M < 0:
        raise ValueError("empty Doeblin set (delta too small)")
    eps = _coalescence_overlap(inp, t0, M)  # minorization level of the t0-block
    lam_bar = lam**t0 + 2.0 * beta / (1.0 + delta)
    beta_bar = lam**t0 * beta + delta
    if not (0.0 < lam_bar < 1.0):
        raise ValueError(f"lam_bar = {lam_bar} not in (0,1); increase t0")
    if beta_bar <= lam_bar:
        raise ValueError("beta_bar mis-ordered against lam_bar")
    log1m_eps = math.log1p(-eps)
    log_rho = (
        log1m_eps
        * math.log(lam_bar)
        / (log1m_eps + math.log(lam_bar) - math.log(beta_bar))
        / (t0 + inp.gamma_bar)
    )
    rho = math.exp(log_rho)
    C_tilde = (lam**t0 + beta) / rho / (1.0 + beta_bar / ((1.0 - eps) * (1.0 - lam_bar)))
    return RateResult(rho, C_tilde, eps, delta, M, lam, beta, log_rho, t0)


def theorem4_bound(
    inputs: MomentBoundInputs,
    cost: str,
    gamma: float,
    k: int,
    dist0: float,
    a: Optional[float] = None,
    t0: Optional[float] = None,
) -> float:
    """Coupling-cost bound C*rho^(gamma*k)*V(dist0) + c*c_inf.

    cost selects the (cost function, Lyapunov V) pair: "indicator"
    (1{x != x~}, V = 1 + w, c = c2), "linear" (distance, V = 1 + w, c = c1),
    or "exponential" (e^{a w}-1, V = e^{aw}, c = c3, requires gamma <=
    gamma_bar_1). At dist0 = 0 the stationary-gap bound c*c_inf alone
    applies and is returned when smaller.
    """
    inp = inputs.resolved()
    if k < 0 or dist0 < 0:
        raise ValueError("k and dist0 must be >= 0")
    if cost in ("indicator", "linear"):
        _, c1, c2 = theorem11_constants(inp)
        c = c2 if cost == "indicator" else c1
        rate = sticky_convergence_rate(inp, gamma, t0=t0, mode="linear")
        v0 = 1.0 + dist0
        mu_v = 1.0 + inp.c_inf * c1
    elif cost == "exponential":
        if a is None or a <= 0:
            raise ValueError("exponential cost needs a > 0")
        t12 = theorem12_constants(inp, a)
        if gamma > t12.gamma_bar_1:
            raise ValueError("gamma exceeds gamma_bar_1 for exponential cost")
        c = t12.c3
        rate = sticky_convergence_rate(inp, gamma, t0=t0, mode="exponential", a=a)
        v0 = math.exp(a * dist0)
        mu_v = 1.0 + inp.c_inf * t12.c3
    else:
        raise ValueError("cost must be 'indicator', 'linear' or 'exponential'")
    transient = rate.C_tilde * rate.rho ** (gamma * k) * (v0 + mu_v)
    full = transient + c * inp.c_inf
    if dist0 == 0.0:
        return min(full, c * inp.c_inf)
    return full


class AppendixAConstants(NamedTuple):
    c: float
    lambda_: float
    M: float
    A: float


def appendixA_constants(
    T_inf: float, L: float, m: float, R1: float, sigma: float, gamma_bar: float, d: int
) -> AppendixAConstants:
    """Exponential-drift constants for the original d-dimensional chain:
    R_gamma V_c <= lambda^gamma V_c + gamma*A with V_c(x) = e^{c||x||^2}."""
    if T_inf < 0 or d < 1:
        raise ValueError("need T_inf >= 0 and d >= 1")
    c = m / (32.0 * sigma**2)
    M = max(
        R1,
        math.sqrt(16.0 * d * sigma**2 / m),
        (4.0 * T_inf + 2.0 * gamma_bar * T_inf**2) / m,
    )
    lam = math.exp(-m * M**2 / 8.0)
    C2 = max(2.0 * L + L**2 * gamma_bar, 8.0 * c * sigma**2)
    C1 = max(C2, C2**2 * gamma_bar)
    B1 = 4.0 * C1 + 2.0 * (1.0 + 8.0 * c * sigma**2 * gamma_bar) * (1.0 + gamma_bar * L) * T_inf
    B2 = (
        2.0 * d * c * sigma**2
        + 2.0 * (1.0 + 8.0 * c * sigma**2 * gamma_bar) * (1.0 + gamma_bar * L) * T_inf
        + c * (1.0 + 8.0 * c * sigma**2 * gamma_bar) * gamma_bar * T_inf**2
    )
    core = c * B1 * M**2 + B2 + m * M**2 / 8.0
    A = math.exp(c * M**2 + gamma_bar * core) * core
    return AppendixAConstants(c, lam, M, A)


def tv_contraction_R(L: float, sigma: float, gamma: float, t0: float, dist0: float) -> float:
    """TV contraction for the d-dimensional exact chain over a t0-horizon:
    1 - 2*Phi(-dist0/(2*sigma^2*t0*e^{-2(t0+gamma)L}))."""
    if t0 <= 0:
        raise ValueError("t0 must be > 0")
    if dist0 < 0:
        raise ValueError("dist0 must be >= 0")
    return 1.0 - 2.0 * float(
        ndtr(-dist0 / (2.0 * sigma**2 * t0 * math.exp(-2.0 * (t0 + gamma) * L)))
    )


@dataclass(frozen=True)
class BoundReport:
    """Every explicit constant, with the inputs that produced it."""

    inputs: MomentBoundInputs
    zeta: float
    eta_1: float
    c1: float
    c2: float
    a: Optional[float]
    t12: Optional[Theorem12Constants]
    rate_linear: RateResult
    rate_exponential: Optional[RateResult]

    def w1_bound(self, gamma, k, dist0):
        return w1_bound(self.inputs, gamma, k, dist0)

    def eta_R(self, R):
        return eta_R(self.inputs, R)

    def as_rows(self):
        """(name, value) pairs of every computed constant, for tabular output."""
        inp = self.inputs
        rows = [
            ("zeta", self.zeta),
            ("eta_1", self.eta_1),
            ("c1", self.c1),
            ("c2", self.c2),
            ("stationary_first_moment_bound", inp.c_inf * self.c1),
            ("stationary_atom_complement_bound", inp.c_inf * self.c2),
            ("rho_linear", self.rate_linear.rho),
            ("C_tilde_linear", self.rate_linear.C_tilde),
            ("t0_linear", self.rate_linear.t0),
        ]
        if self.t12 is not None:
            rows += [
                ("gamma_bar_1", self.t12.gamma_bar_1),
                ("lambda_a", self.t12.lambda_a),
                ("R_a", self.t12.R_a),
                ("c3", self.t12.c3),
                ("stationary_exp_moment_bound", inp.c_inf * self.t12.c3),
            ]
        if self.rate_exponential is not None:
            rows += [
                ("rho_exponential", self.rate_exponential.rho),
                ("C_tilde_exponential", self.rate_exponential.C_tilde),
            ]
        return rows

    def as_lines(self):
        inp = self.inputs
        lines = [
            f"L = {inp.L}",
            f"m = {inp.m}",
            f"R1 = {inp.R1}",
            f"c_inf = {inp.c_inf}",
            f"sigma = {inp.sigma}",
            f"gamma_bar = {inp.gamma_bar}",
            f"delta_bar = {inp.delta_bar}",
            f"zeta = {self.zeta!r}",
            f"eta_1 = {self.eta_1!r}",
            f"c1 = {self.c1!r}",
            f"c2 = {self.c2!r}",
            f"stationary_first_moment_bound = {inp.c_inf * self.c1!r}",
            f"stationary_atom_complement_bound = {inp.c_inf * self.c2!r}",
            f"rho_linear = {self.rate_linear.rho!r}",
            f"C_tilde_linear = {self.rate_linear.C_tilde!r}",
            f"t0_linear = {self.rate_linear.t0!r}",
        ]
        if self.t12 is not None:
            lines += [
                f"a = {self.a}",
                f"gamma_bar_1 = {self.t12.gamma_bar_1!r}",
                f"lambda_a = {self.t12.lambda_a!r}",
                f"R_a = {self.t12.R_a!r}",
                f"c3 = {self.t12.c3!r}",
                f"stationary_exp_moment_bound = {inp.c_inf * self.t12.c3!r}",
            ]
        if self.rate_exponential is not None:
            lines += [
                f"rho_exponential = {self.rate_exponential.rho!r}",
                f"C_tilde_exponential = {self.rate_exponential.C_tilde!r}",
            ]
        return lines


def build_bound_report(
    inputs: MomentBoundInputs,
    gamma: Optional[float] = None,
    a: Optional[float] = None,
    t0: Optional[float] = None,
) -> BoundReport:
    """Assemble the full constant report for a model's declared constants."""
    inp = inputs.resolved()
    gamma = gamma if gamma is not None else inp.gamma_bar
    eta1, c1, c2 = theorem11_constants(inp)
    t12 = theorem12_constants(inp, a) if a is not None else None
    rate_lin = sticky_convergence_rate(inp, gamma, t0=t0, mode="linear")
    rate_exp = None
    if a is not None and gamma <= t12.gamma_bar_1:
        try:
            rate_exp = sticky_convergence_rate(inp, gamma, t0=t0, mode="exponential", a=a)
        except ValueError:
            rate_exp = None
    return BoundReport(
        inputs=inp,
        zeta=zeta_const(inp.L, inp.sigma, inp.gamma_bar),
        eta_1=eta1,
        c1=c1,
        c2=c2,
        a=a,
        t12=t12,
        rate_linear=rate_lin,
        rate_exponential=rate_exp,
    )
