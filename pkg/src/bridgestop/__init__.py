"""Optimal double stopping of a Brownian bridge.

Solve, evaluate, simulate and verify the three threshold-type
double-stopping problems of a Brownian bridge pinned at zero: the plain
spread, the sign-split spread of odd powers, and the spread of absolute
powers.
"""

from .exceptions import (
    BridgestopError,
    ConfigurationError,
    ConvergenceError,
    DomainError,
    SolverError,
)
from .problems import ProblemSpec, SpacePoint, ThresholdSet, ValueBreakdown
from .special_functions import (
    DEFAULT_SETTINGS,
    QuadratureSettings,
    SpecialValue,
    big_f,
    big_f_prime,
    big_g,
    big_g_prime,
    erfcx,
    fg_sum,
    fg_sum_prime,
    phi_cdf,
)
from .thresholds import (
    solve_a_star,
    solve_b_star,
    solve_c_star,
    solve_d_star,
    solve_thresholds,
)
from .value_functions import (
    candidate_value,
    j_scalar,
    j_star,
    payoff_f,
    payoff_g,
    payoff_h,
    payoff_value,
    u_bar_value,
    u_scalar,
    u_value,
    v_scalar,
    v_star,
    w_prime,
    w_scalar,
    w_star,
)
from .simulation import (
    BridgePath,
    CrossingRule,
    MCReport,
    StoppingOutcome,
    TimeGrid,
    bridge_step,
    first_crossing,
    mc_estimate,
    mc_estimate_refined,
    path_rng,
    run_strategy,
    simulate_path,
)
from .verification import (
    CheckReport,
    check_dominance,
    check_dp_agreement,
    check_scan_agreement,
    check_smooth_fit,
    dp_single_stopping_value,
    dp_value_oracle,
    generator_reports,
    pde_residual,
    scan_maximizer,
    verify_problem,
)
from .figures import write_figures

__version__ = "0.1.0"
