"""Sticky couplings of perturbed functional autoregressive (FAR) chains.

Simulation of the discrete sticky reflection coupling of an exact chain
Y_{k+1} = T_gamma(Y_k) + sigma*sqrt(gamma)*Z_{k+1} and its perturbed
counterpart, the one-dimensional dominating sticky chain with closed-form
kernel identities, deterministic calculators for every explicit
perturbation-bound constant, empirical Wasserstein/TV estimation, a
continuous-time-limit refinement study, and the Bayesian ODE-parameter
application with its step-size bias experiments.
"""

from stickycouple.model import (
    AssumptionConstants,
    FarModel,
    TauMajorant,
    ar1_shift_model,
    tau_eval,
    validate_h1h2,
)
from stickycouple.coupling import (
    CoupledState,
    CouplingStepRecord,
    coupled_trajectory,
    coupling_direction,
    coupling_step,
    merge_probability,
)
from stickycouple.sticky_chain import (
    StickyParams,
    StickyStationaryEstimate,
    estimate_stationary,
    mass_at_zero,
    one_step_exp_moment,
    one_step_mean,
    sticky_step,
    sticky_trajectory,
)
from stickycouple.bounds import (
    AlphaBetaSequence,
    BoundReport,
    MomentBoundInputs,
    appendixA_constants,
    build_bound_report,
    coalescence_tv_bound,
    eta_R,
    sticky_convergence_rate,
    theorem4_bound,
    theorem11_constants,
    theorem12_constants,
    tv_contraction_R,
    w1_bound,
    zeta_const,
)
from stickycouple.metrics import (
    ar1_stationary,
    gaussian_tv_same_var,
    tv_kde,
    w1_empirical_1d,
)
from stickycouple.streams import substream

__version__ = "0.1.0"

from stickycouple.limit_study import (  # noqa: E402
    InterpolatedPath,
    LimitFunctionals,
    interpolate,
    refinement_study,
)
from stickycouple.ode_bayes import (  # noqa: E402
    DivergenceError,
    OdeModel,
    PosteriorProblem,
    UlaConfig,
    builtin_models,
    grad_log_posterior,
    solve_augmented_euler,
    solve_reference,
    synth_data,
    ula_sample,
)
