"""Step-size refinement study of the dominating chain's continuous-time limit.

As gamma -> 0 the linearly interpolated sticky chain converges weakly to the
one-dimensional diffusion dW = (kappa(W) + c_inf) dt + 2 sigma 1{W > 0} dB,
whose diffusion switches off at the origin. No strong scheme for that SDE is
simulated directly; instead, marginal functionals P(W_t = 0), E[W_t], E[W_t^2]
are estimated across a gamma-ladder and certified by Cauchy behavior of the
successive-level gaps.
"""

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from stickycouple.model import TauMajorant
from stickycouple.sticky_chain import StickyParams, sticky_batch, sticky_from_draws
from stickycouple.streams import substream

__all__ = [
    "InterpolatedPath",
    "LimitFunctionals",
    "interpolate",
    "refinement_study",
]


def interpolate(nodes, gamma: float, t: float) -> float:
    """Linear interpolation of chain nodes: W_t between floor(t/gamma) and the next node.

    t must lie in [0, gamma * (len(nodes) - 1)]; node times are exact.
    """
    nodes = np.asarray(nodes, dtype=float)
    horizon = gamma * (nodes.shape[0] - 1)
    if t < 0 or t > horizon + 1e-12 * max(1.0, horizon):
        raise ValueError(f"t = {t} outside simulated horizon [0, {horizon}]")
    k = min(int(t / gamma), nodes.shape[0] - 2)
    frac = t / gamma - k
    return float(nodes[k] + frac * (nodes[k + 1] - nodes[k]))


@dataclass(frozen=True)
class InterpolatedPath:
    """One sticky-chain path with continuous piecewise-linear evaluation."""

    gamma: float
    nodes: np.ndarray

    def __call__(self, t: float) -> float:
        return interpolate(self.nodes, self.gamma, t)

    def nearest_node(self, t: float) -> float:
        """Node value at round(t/gamma); the atom at 0 lives on nodes only."""
        k = int(round(t / self.gamma))
        if not 0 <= k < self.nodes.shape[0]:
            raise ValueError(f"t = {t} outside simulated horizon")
        return float(self.nodes[k])


@dataclass(frozen=True)
class LimitFunctionals:
    """Marginal functionals of one ladder level with batch standard errors.

    p_zero reads the nearest node (interpolation never produces exact zeros
    between unequal nodes); the moments use the interpolated value.
    """

    gamma: float
    times: np.ndarray
    p_zero: np.ndarray
    mean_w: np.ndarray
    mean_w2: np.ndarray
    se_p_zero: np.ndarray
    se_mean_w: np.ndarray
    se_mean_w2: np.ndarray
    sup_fourth_moment: float
    n_paths: int

    def __post_init__(self):
        if np.any(self.p_zero < 0) or np.any(self.p_zero > 1):
            raise AssertionError("probabilities must lie in [0, 1]")
        if np.any(self.mean_w < 0) or np.any(self.mean_w2 < 0):
            raise AssertionError("moments of a nonnegative chain must be >= 0")


def _functionals_from_traj(traj, gamma, times, n_paths) -> LimitFunctionals:
    n_steps = traj.shape[0] - 1
    times = np.asarray(times, dtype=float)
    p0 = np.empty(times.shape)
    m1 = np.empty(times.shape)
    m2 = np.empty(times.shape)
    se0 = np.empty(times.shape)
    se1 = np.empty(times.shape)
    se2 = np.empty(times.shape)
    for i, t in enumerate(times):
        k_near = min(int(round(t / gamma)), n_steps)
        zero = (traj[k_near] == 0.0).astype(float)
        k = min(int(t / gamma), n_steps - 1)
        frac = t / gamma - k
        w_t = traj[k] + frac * (traj[k + 1] - traj[k])
        p0[i] = zero.mean()
        m1[i] = w_t.mean()
        m2[i] = (w_t**2).mean()
        se0[i] = zero.std(ddof=1) / math.sqrt(n_paths)
        se1[i] = w_t.std(ddof=1) / math.sqrt(n_paths)
        se2[i] = (w_t**2).std(ddof=1) / math.sqrt(n_paths)
    sup4 = float((traj.max(axis=0) ** 4).mean())
    return LimitFunctionals(gamma, times, p0, m1, m2, se0, se1, se2, sup4, n_paths)


def refinement_study(
    kappa: Callable,
    w0: float,
    times: Sequence[float],
    gamma_ladder: Sequence[float],
    n_paths: int,
    sigma: float = 1.0,
    c_inf: float = 0.0,
    seed: int = 0,
    contraction_m: float = 1.0,
    common_randomness: bool = True,
):
    """Estimate the limit functionals on every level of a decreasing gamma-ladder.

    The chain's drift profile is tau(gamma, w) = w + gamma*kappa(w). With
    common_randomness (requires every gamma to be an integer multiple of the
    finest), all levels are driven by one fine-resolution draw array: a coarse
    step aggregates its block of Gaussians (exact N(0,1) after rescaling) and
    reads the block's first uniform. Marginals per level are untouched while
    successive-level gaps lose most of their Monte-Carlo variance. Otherwise
    each level runs on its own substream.
    """
    ladder = [float(g) for g in gamma_ladder]
    if any(b >= a for a, b in zip(ladder, ladder[1:])) or not ladder:
        raise ValueError("gamma_ladder must be strictly decreasing and nonempty")
    if w0 < 0:
        raise ValueError("w0 must be >= 0")
    maj = TauMajorant(0.0, contraction_m, 0.0, kappa=kappa)
    times = np.asarray(times, dtype=float)
    T = float(np.max(times))
    out = []
    if common_randomness:
        g_fine = ladder[-1]
        strides = []
        for g in ladder:
            s = g / g_fine
            if abs(s - round(s)) > 1e-9:
                raise ValueError(
                    "common_randomness requires each gamma to be an integer "
                    "multiple of the finest"
                )
            strides.append(int(round(s)))
        n_fine = int(math.ceil(T / g_fine - 1e-12))
        rng = substream(seed, 3)
        G = rng.standard_normal((n_fine, n_paths))
        U = rng.random((n_fine, n_paths))
        for gamma, s in zip(ladder, strides):
            n_k = n_fine // s
            g_lvl = G[: n_k * s].reshape(n_k, s, n_paths).sum(axis=1) / math.sqrt(s)
            u_lvl = U[::s][:n_k]
            params = StickyParams(gamma, sigma, c_inf, maj)
            traj = sticky_from_draws(params, np.full(n_paths, float(w0)), g_lvl, u_lvl)
            out.append(_functionals_from_traj(traj, gamma, times, n_paths))
        return out
    for level, gamma in enumerate(ladder):
        params = StickyParams(gamma, sigma, c_inf, maj)
        rng = substream(seed, 3, level)
        n_steps = int(math.ceil(T / gamma - 1e-12))
        traj = sticky_batch(params, np.full(n_paths, float(w0)), n_steps, rng)
        out.append(_functionals_from_traj(traj, gamma, times, n_paths))
    return out
