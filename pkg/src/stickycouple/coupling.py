"""Discrete sticky reflection coupling of two FAR chains.

Each step draws one d-dimensional standard Gaussian z and one uniform u.
The exact chain moves to X+ = T_gamma(x) + sqrt(sigma^2 gamma) z. With the
maximal Gaussian-overlap probability the perturbed chain merges onto X+
(bitwise), otherwise it moves with the Householder reflection of z along the
inter-mean direction e = E/||E||, E = T~_gamma(x~) - T_gamma(x). Merged
chains can separate again when the two maps differ, which is what makes the
coupling "sticky" rather than absorbing.
"""

from dataclasses import dataclass

import numpy as np

from stickycouple.model import FarModel

__all__ = [
    "CoupledState",
    "CouplingStepRecord",
    "coupling_direction",
    "merge_probability",
    "coupling_step",
    "coupled_trajectory",
    "coupled_batch",
]


@dataclass(frozen=True)
class CoupledState:
    x: np.ndarray
    x_tilde: np.ndarray
    merged: bool

    @staticmethod
    def make(x, x_tilde):
        x = np.asarray(x, dtype=float)
        x_tilde = np.asarray(x_tilde, dtype=float)
        merged = bool(np.array_equal(x, x_tilde))
        if merged:
            x_tilde = x  # share storage so equality stays bitwise
        return CoupledState(x, x_tilde, merged)

    @property
    def distance(self) -> float:
        if self.merged:
            return 0.0
        return float(np.linalg.norm(self.x - self.x_tilde))


@dataclass(frozen=True)
class CouplingStepRecord:
    gaussian_z: np.ndarray
    uniform_u: float
    scalar_g: float
    accepted_merge: bool
    distance_after: float


def coupling_direction(model: FarModel, gamma: float, x, x_tilde):
    """Inter-mean vector E = T~_gamma(x~) - T_gamma(x) and its unit direction.

    When E = 0 the direction defaults to the first canonical basis vector.
    """
    x = np.asarray(x, dtype=float)
    x_tilde = np.asarray(x_tilde, dtype=float)
    E = model.perturbed_map(gamma, x_tilde) - model.drift_map(gamma, x)
    norm_E = float(np.linalg.norm(E))
    if norm_E > 0.0:
        e = E / norm_E
    else:
        e = np.zeros(model.dim)
        e[0] = 1.0
    return E, e


def merge_probability(norm_E: float, g: float, sigma2_gamma: float) -> float:
    """Maximal-overlap merge probability for mean gap a = ||E||.

    Equals min(1, phi_{s}(a - sqrt(s) g)/phi_{s}(sqrt(s) g)) with s =
    sigma^2 gamma, computed through the simplified log-space exponent
    a(2 sqrt(s) g - a)/(2s) to avoid density under/overflow.
    """
    if sigma2_gamma <= 0:
        raise ValueError("sigma2_gamma must be > 0")
    a = np.asarray(norm_E, dtype=float)
    if np.any(a < 0):
        raise ValueError("norm_E must be >= 0")
    g = np.asarray(g, dtype=float)
    expo = a * (2.0 * np.sqrt(sigma2_gamma) * g - a) / (2.0 * sigma2_gamma)
    p = np.exp(np.minimum(expo, 0.0))
    return float(p) if p.ndim == 0 else p


def coupling_step(model: FarModel, gamma: float, state: CoupledState, rng):
    """One sticky-coupling transition; consumes one Gaussian(d) then one uniform."""
    z = rng.standard_normal(model.dim)
    u = float(rng.random())
    root = model.sigma * np.sqrt(gamma)
    Tx = model.drift_map(gamma, state.x)
    Ttx = model.perturbed_map(gamma, state.x_tilde)
    E = Ttx - Tx
    norm_E = float(np.linalg.norm(E))
    if norm_E > 0.0:
        e = E / norm_E
    else:
        e = np.zeros(model.dim)
        e[0] = 1.0
    g = float(e @ z)
    x_plus = Tx + root * z
    p = merge_probability(norm_E, g, model.sigma**2 * gamma)
    if u < p:
        new = CoupledState(x_plus, x_plus, True)
        accepted = True
    else:
        x_tilde_plus = Ttx + root * (z - 2.0 * g * e)
        new = CoupledState.make(x_plus, x_tilde_plus)
        accepted = False
    rec = CouplingStepRecord(z, u, g, accepted, new.distance)
    return new, rec


def coupled_trajectory(model: FarModel, gamma: float, x0, x0_tilde, n_steps: int, rng):
    """Iterate coupling_step; returns (states, records) with len n_steps + 1 / n_steps."""
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    state = CoupledState.make(x0, x0_tilde)
    states = [state]
    records = []
    for _ in range(n_steps):
        state, rec = coupling_step(model, gamma, state, rng)
        states.append(state)
        records.append(rec)
    return states, records


def coupled_batch(model: FarModel, gamma: float, x0, x0_tilde, n_steps: int, rng):
    """Evolve a batch of independent coupled trajectories in lockstep.

    x0 and x0_tilde have shape (B, d). Returns (dist, g, u, x, x_tilde) where
    dist has shape (n_steps+1, B) and g, u have shape (n_steps, B) — the
    scalar projections and uniforms actually consumed, reusable by a
    dominating chain replay. The draw order per replica matches
    coupling_step (z first, then u).
    """
    x = np.array(x0, dtype=float, copy=True)
    xt = np.array(x0_tilde, dtype=float, copy=True)
    if x.ndim != 2 or x.shape != xt.shape:
        raise ValueError("x0 and x0_tilde must both have shape (B, d)")
    B, d = x.shape
    root = model.sigma * np.sqrt(gamma)
    s2g = model.sigma**2 * gamma
    dist = np.empty((n_steps + 1, B))
    g_out = np.empty((n_steps, B))
    u_out = np.empty((n_steps, B))
    dist[0] = np.linalg.norm(x - xt, axis=1)
    merged = np.all(x == xt, axis=1)
    dist[0, merged] = 0.0
    for k in range(n_steps):
        z = rng.standard_normal((B, d))
        u = rng.random(B)
        Tx = model.drift_map(gamma, x)
        Ttx = model.perturbed_map(gamma, xt)
        E = Ttx - Tx
        a = np.linalg.norm(E, axis=1)
        e = np.zeros_like(E)
        nz = a > 0.0
        e[nz] = E[nz] / a[nz, None]
        e[~nz, 0] = 1.0
        g = np.einsum("ij,ij->i", e, z)
        expo = a * (2.0 * np.sqrt(s2g) * g - a) / (2.0 * s2g)
        p = np.exp(np.minimum(expo, 0.0))
        merge = u < p
        x = Tx + root * z
        xt = np.where(
            merge[:, None], x, Ttx + root * (z - 2.0 * g[:, None] * e)
        )
        xt[merge] = x[merge]  # bitwise merge
        dist[k + 1] = np.where(merge, 0.0, np.linalg.norm(x - xt, axis=1))
        g_out[k] = g
        u_out[k] = u
    return dist, g_out, u_out, x, xt
