"""Independent numerical checks of the closed-form solution.

Five families of checks, each reported as a CheckReport:

  * smooth fit: one-sided x-derivatives of the candidate agree across
    every free boundary (for Problem 3 with A* = 0 the candidate must
    instead have a strict concave kink at x = 0);
  * generator sign: the bridge generator applied to the candidate is
    ~0 in continuation regions and <= 0 in stopping regions, measured
    by central finite differences;
  * dominance: candidate >= payoff on a dense (t, x) grid;
  * maximiser scans: brute-force grid argmax of the scalar functionals
    lands on the solved thresholds;
  * a dynamic-programming value oracle: backward induction on a
    time-space lattice with exact one-step bridge transitions, solving
    the inner and outer stopping stages from the raw payoffs alone.
    It never touches the closed forms, so agreement is evidence of
    correctness for both sides.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .exceptions import ConfigurationError, DomainError
from .problems import ProblemSpec, SpacePoint, ThresholdSet
from .value_functions import (
    candidate_value,
    j_scalar,
    payoff_value,
    v_scalar,
    w_scalar,
)

__all__ = [
    "CheckReport",
    "check_smooth_fit",
    "pde_residual",
    "generator_reports",
    "check_dominance",
    "scan_maximizer",
    "check_scan_agreement",
    "dp_value_oracle",
    "dp_single_stopping_value",
    "check_dp_agreement",
    "verify_problem",
    "SMOOTH_FIT_TOL",
    "KINK_TOL",
    "PDE_ZERO_TOL",
    "PDE_SIGN_TOL",
    "DOMINANCE_TOL",
    "SCAN_TOL",
    "DP_REL_TOL",
]

SMOOTH_FIT_TOL = 1e-5
KINK_TOL = -1e-3  # right minus left derivative must be at most this
PDE_ZERO_TOL = 1e-4
PDE_SIGN_TOL = 1e-6
DOMINANCE_TOL = 1e-9
SCAN_TOL = 1e-3
DP_REL_TOL = 0.02


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one numerical check: passed iff max_violation <= tolerance."""

    name: str
    max_violation: float
    tolerance: float
    passed: bool
    grid: str

    @staticmethod
    def build(name: str, max_violation: float, tolerance: float, grid: str) -> "CheckReport":
        return CheckReport(name, max_violation, tolerance, max_violation <= tolerance, grid)


def _candidate_fn(problem: ProblemSpec, thresholds: ThresholdSet) -> Callable[[float, float], float]:
    def fn(t: float, x: float) -> float:
        return candidate_value(problem, SpacePoint(t, x), thresholds).value

    return fn


# ---------------------------------------------------------------------------
# Smooth fit.
# ---------------------------------------------------------------------------

def _one_sided_derivs(
    fn: Callable[[float, float], float], t: float, xb: float, h: float
) -> tuple[float, float]:
    # second-order one-sided stencils anchored at the boundary (the
    # Richardson combination of the two offset central differences);
    # a plain offset central difference carries an O(h) bias from the
    # second-derivative jump across the boundary, large enough to mask
    # the true gap at the tolerances used here
    mid = fn(t, xb)
    left = (3.0 * mid - 4.0 * fn(t, xb - h) + fn(t, xb - 2.0 * h)) / (2.0 * h)
    right = (-3.0 * mid + 4.0 * fn(t, xb + h) - fn(t, xb + 2.0 * h)) / (2.0 * h)
    return left, right


def check_smooth_fit(
    problem: ProblemSpec,
    thresholds: ThresholdSet,
    t_list: Sequence[float] = (0.0, 0.5, 0.9),
    h: float = 1e-6,
) -> CheckReport:
    """Derivative gap across every free boundary of the problem's candidate.

    For Problem 3 with A* = 0 there is no smooth fit; the check then
    asserts the strict kink at x = 0 (right derivative strictly below
    the left one) and reports their signed difference.
    """
    fn = _candidate_fn(problem, thresholds)
    grid = f"t in {tuple(t_list)}, h={h:g}"
    if problem.kind == 3 and thresholds.a_star == 0.0:
        worst = -math.inf
        for t in t_list:
            left, right = _one_sided_derivs(fn, t, 0.0, h)
            worst = max(worst, right - left)
        return CheckReport.build(f"kink_at_zero[{problem.describe()}]", worst, KINK_TOL, grid)

    worst = 0.0
    for t in t_list:
        root = math.sqrt(1.0 - t)
        if problem.kind == 1:
            boundaries = [thresholds.c_star * root]
        elif problem.kind == 2:
            boundaries = [thresholds.b_star * root, -thresholds.b_star * root]
        else:
            boundaries = [thresholds.a_star * root, -thresholds.a_star * root]
        for xb in boundaries:
            left, right = _one_sided_derivs(fn, t, xb, h)
            worst = max(worst, abs(right - left))
    return CheckReport.build(f"smooth_fit[{problem.describe()}]", worst, SMOOTH_FIT_TOL, grid)


# ---------------------------------------------------------------------------
# Generator sign conditions.
# ---------------------------------------------------------------------------

def pde_residual(
    value_fn: Callable[[float, float], float],
    points: Iterable[tuple[float, float]],
    h: float = 1e-4,
    sign_only: bool = False,
    tolerance: float | None = None,
    name: str = "pde_residual",
    grid: str = "",
) -> CheckReport:
    """Apply the bridge generator d/dt - (x/(1-t)) d/dx + (1/2) d2/dx2
    to ``value_fn`` by central differences at the given points.

    With ``sign_only`` the violation is the (signed) residual itself,
    so the check passes when the generator is sufficiently negative;
    otherwise the violation is its absolute value.
    """
    if tolerance is None:
        tolerance = PDE_SIGN_TOL if sign_only else PDE_ZERO_TOL
    worst = -math.inf
    count = 0
    for t, x in points:
        f0 = value_fn(t, x)
        dt = (value_fn(t + h, x) - value_fn(t - h, x)) / (2.0 * h)
        dx = (value_fn(t, x + h) - value_fn(t, x - h)) / (2.0 * h)
        dxx = (value_fn(t, x + h) - 2.0 * f0 + value_fn(t, x - h)) / (h * h)
        residual = dt - x / (1.0 - t) * dx + 0.5 * dxx
        worst = max(worst, residual if sign_only else abs(residual))
        count += 1
    if count == 0:
        raise DomainError("pde_residual received no sample points")
    return CheckReport.build(name, worst, tolerance, grid or f"{count} points, h={h:g}")


def _region_points(
    problem: ProblemSpec,
    thresholds: ThresholdSet,
    region: str,
    t_list: Sequence[float],
    h: float,
    n_per_side: int = 40,
) -> list[tuple[float, float]]:
    """Sample (t, x) in the requested region, away from the boundaries.

    The exclusion band is 10h in x around every free boundary; for
    Problem 3 an extra band |y| >= 0.05 keeps clear of x = 0, where the
    candidate may kink (A* = 0) and where |x|^(q-2) blows up for q < 2.
    """
    pts: list[tuple[float, float]] = []
    for t in t_list:
        root = math.sqrt(1.0 - t)
        band_y = 10.0 * h / root

        def segment(y_lo: float, y_hi: float) -> None:
            if y_hi <= y_lo:
                return
            for y in np.linspace(y_lo, y_hi, n_per_side):
                pts.append((t, float(y * root)))

        if problem.kind == 1:
            c = thresholds.c_star
            if region == "continuation":
                segment(c + band_y, 5.0)
            else:
                segment(-5.0, c - band_y)
        elif problem.kind == 2:
            b = thresholds.b_star
            if region == "continuation":
                segment(-b + band_y, b - band_y)
            else:
                segment(b + band_y, 5.0)
                segment(-5.0, -b - band_y)
        else:
            a = thresholds.a_star
            inner_clear = max(0.05, band_y)
            if region == "continuation":
                segment(max(a + band_y, inner_clear), 5.0)
                segment(-5.0, min(-a - band_y, -inner_clear))
            else:
                if a > 0.0:
                    segment(inner_clear, a - band_y)
                    segment(-(a - band_y), -inner_clear)
    if region == "stopping" and not pts and problem.kind == 3 and thresholds.a_star == 0.0:
        return pts  # the stopping region is the single point x = 0
    boundaries = []
    for t in t_list:
        root = math.sqrt(1.0 - t)
        if problem.kind == 1:
            boundaries.append((t, thresholds.c_star * root))
        elif problem.kind == 2:
            boundaries.extend([(t, thresholds.b_star * root), (t, -thresholds.b_star * root)])
        else:
            boundaries.extend([(t, thresholds.a_star * root), (t, -thresholds.a_star * root)])
    for t, x in pts:
        for tb, xb in boundaries:
            if tb == t:
                assert abs(x - xb) >= 10.0 * h - 1e-15, (
                    f"sample ({t}, {x}) lies within 10h of boundary {xb}"
                )
    return pts


def generator_reports(
    problem: ProblemSpec,
    thresholds: ThresholdSet,
    t_list: Sequence[float] = (0.05, 0.25, 0.5, 0.9),
    h: float = 1e-4,
) -> list[CheckReport]:
    """Generator-sign checks in both regions of the problem's candidate."""
    fn = _candidate_fn(problem, thresholds)
    label = problem.describe()
    reports = [
        pde_residual(
            fn,
            _region_points(problem, thresholds, "continuation", t_list, h),
            h=h,
            sign_only=False,
            name=f"generator_zero[{label}]",
            grid=f"continuation, t in {tuple(t_list)}",
        )
    ]
    stopping = _region_points(problem, thresholds, "stopping", t_list, h)
    if stopping:
        reports.append(
            pde_residual(
                fn,
                stopping,
                h=h,
                sign_only=True,
                name=f"generator_sign[{label}]",
                grid=f"stopping, t in {tuple(t_list)}",
            )
        )
    return reports


# ---------------------------------------------------------------------------
# Dominance.
# ---------------------------------------------------------------------------

def check_dominance(
    problem: ProblemSpec,
    thresholds: ThresholdSet,
    t_list: Sequence[float] = (0.0, 0.25, 0.5, 0.9),
    y_lo: float = -5.0,
    y_hi: float = 5.0,
    y_step: float = 0.01,
) -> CheckReport:
    """Max of payoff - candidate over the grid (must be <= 1e-9)."""
    worst = -math.inf
    ys = np.arange(y_lo, y_hi + 0.5 * y_step, y_step)
    for t in t_list:
        root = math.sqrt(1.0 - t)
        for y in ys:
            point = SpacePoint(t, float(y * root))
            gap = payoff_value(problem, point, thresholds) - candidate_value(
                problem, point, thresholds
            ).value
            worst = max(worst, gap)
    grid = f"t in {tuple(t_list)}, y in [{y_lo:g}, {y_hi:g}] step {y_step:g}"
    return CheckReport.build(f"dominance[{problem.describe()}]", worst, DOMINANCE_TOL, grid)


# ---------------------------------------------------------------------------
# Brute-force maximiser scans.
# ---------------------------------------------------------------------------

def scan_maximizer(
    scalar_fn: Callable[[float], float],
    interval: tuple[float, float],
    resolution: float,
) -> tuple[float, float]:
    """Grid argmax of a scalar function; the brute-force oracle for the
    threshold solvers."""
    lo, hi = interval
    if not (hi > lo and resolution > 0.0):
        raise DomainError(f"bad scan interval {interval!r} or resolution {resolution!r}")
    n = int(math.ceil((hi - lo) / resolution))
    xs = np.minimum(lo + resolution * np.arange(n + 1), hi)
    best_x, best_v = lo, -math.inf
    for x in xs:
        v = scalar_fn(float(x))
        if v > best_v:
            best_x, best_v = float(x), v
    return best_x, best_v


def check_scan_agreement(
    problem: ProblemSpec,
    thresholds: ThresholdSet,
    resolution: float = 1e-4,
) -> CheckReport:
    """Distance between the grid argmax of the problem's scalar functional
    and the solved threshold."""
    if problem.kind == 1:
        b, c = thresholds.b_star, thresholds.c_star
        argmax, _ = scan_maximizer(lambda x: v_scalar(x, b), (-5.0, b), resolution)
        target, label = c, "v vs c_star"
    elif problem.kind == 2:
        b = thresholds.b_star
        argmax, _ = scan_maximizer(
            lambda d: j_scalar(problem.n, d, b), (0.0, 3.0 * b), resolution
        )
        target, label = b, "j vs b_star"
    else:
        a, d = thresholds.a_star, thresholds.d_star
        argmax, _ = scan_maximizer(lambda x: w_scalar(problem.q, x, d), (0.0, d), resolution)
        target, label = a, "w vs a_star"
    return CheckReport.build(
        f"scan[{label}, {problem.describe()}]",
        abs(argmax - target),
        SCAN_TOL,
        f"resolution {resolution:g}",
    )


# ---------------------------------------------------------------------------
# Dynamic-programming value oracle.
# ---------------------------------------------------------------------------

_DP_CUTOFF = 1e-6  # lattice ends at 1 - t = cutoff * (1 - t0)
_DP_QUAD_NODES = 24


def _dp_backward(
    payoff: Callable[[int, np.ndarray], np.ndarray],
    y: np.ndarray,
    n_slices: int,
    rho: float,
    sd: float,
    keep_all: bool,
):
    """Backward induction V_j = max(payoff_j, E[V_{j+1}]) on the y-lattice.

    The expectation integrates the exact Gaussian transition (mean
    rho*y, sd) against a piecewise-linear interpolant of the next
    slice by Gauss-Hermite quadrature; targets outside the lattice get
    the next slice's payoff.
    """
    nodes, weights = np.polynomial.hermite.hermgauss(_DP_QUAD_NODES)
    shocks = math.sqrt(2.0) * sd * nodes
    weights = weights / math.sqrt(math.pi)
    targets = rho * y[:, None] + shocks[None, :]
    outside = (targets < y[0]) | (targets > y[-1])
    flat = targets.ravel()

    current = payoff(n_slices - 1, y)
    slices = [None] * n_slices
    if keep_all:
        slices[n_slices - 1] = current
    for j in range(n_slices - 2, -1, -1):
        interp = np.interp(flat, y, current).reshape(targets.shape)
        if outside.any():
            interp[outside] = payoff(j + 1, targets[outside])
        cont = interp @ weights
        current = np.maximum(payoff(j, y), cont)
        if keep_all:
            slices[j] = current
    return (current, slices) if keep_all else (current, None)


def dp_value_oracle(
    problem: ProblemSpec,
    start: SpacePoint,
    time_steps: int = 400,
    space_nodes: int = 600,
    y_max: float = 8.0,
) -> float:
    """Double-stopping value by pure backward induction on a lattice.

    Solves the inner single-stopping stage from the raw terminal payoff
    (x^(2n+1) or |x|^q), assembles the outer payoff from the inner
    value table, and solves the outer stage the same way.  Returns the
    outer value at ``start``.  Independent of the threshold solvers and
    closed forms by construction.

    The payoffs kink at x = 0 (sharply so for exponents near 1), so the
    space grid always carries a node at 0: an even ``space_nodes`` is
    bumped by one.
    """
    if time_steps < 50:
        raise ConfigurationError(f"time_steps must be at least 50, got {time_steps}")
    if space_nodes < 100:
        raise ConfigurationError(f"space_nodes must be at least 100, got {space_nodes}")
    y0 = start.scaled
    if abs(y0) > y_max:
        raise ConfigurationError(f"start point scaled coordinate {y0:g} outside [-{y_max:g}, {y_max:g}]")

    n_slices = time_steps + 1
    span = 1.0 - start.t
    ratio = _DP_CUTOFF ** (1.0 / time_steps)
    one_minus_t = span * ratio ** np.arange(n_slices)
    rho = math.sqrt(ratio)
    sd = math.sqrt(1.0 - ratio)
    y = np.linspace(-y_max, y_max, space_nodes + 1 - space_nodes % 2)

    if problem.kind == 3:
        q = problem.q
        scale = one_minus_t ** (q / 2.0)

        def inner_payoff(j: int, ys: np.ndarray) -> np.ndarray:
            return np.abs(ys) ** q * scale[j]

    else:
        p = 2 * problem.n + 1 if problem.kind == 2 else 1
        scale = one_minus_t ** (p / 2.0)

        def inner_payoff(j: int, ys: np.ndarray) -> np.ndarray:
            return ys ** p * scale[j]

    _, inner_slices = _dp_backward(inner_payoff, y, n_slices, rho, sd, keep_all=True)

    def inner_at(j: int, ys: np.ndarray) -> np.ndarray:
        vals = np.interp(ys, y, inner_slices[j])
        outside = (ys < y[0]) | (ys > y[-1])
        if outside.any():
            vals = np.where(outside, inner_payoff(j, ys), vals)
        return vals

    if problem.kind == 1:

        def outer_payoff(j: int, ys: np.ndarray) -> np.ndarray:
            return inner_at(j, ys) - ys * scale[j]

    elif problem.kind == 2:

        def outer_payoff(j: int, ys: np.ndarray) -> np.ndarray:
            power = ys ** (2 * problem.n + 1) * scale[j]
            return np.where(ys <= 0.0, inner_at(j, ys) - power, inner_at(j, -ys) + power)

    else:

        def outer_payoff(j: int, ys: np.ndarray) -> np.ndarray:
            return np.maximum(inner_at(j, ys) - np.abs(ys) ** problem.q * scale[j], 0.0)

    outer, _ = _dp_backward(outer_payoff, y, n_slices, rho, sd, keep_all=False)
    return float(np.interp(y0, y, outer))


def dp_single_stopping_value(
    problem: ProblemSpec,
    start: SpacePoint,
    time_steps: int = 400,
    space_nodes: int = 600,
    y_max: float = 8.0,
) -> float:
    """The inner (single-stopping) stage of the DP oracle on its own.

    Solves sup E[X^(2n+1)] (Problems 1 and 2) or sup E[|X|^q]
    (Problem 3) by backward induction; a sanity anchor for the oracle
    against the single-stopping closed forms.
    """
    if time_steps < 50:
        raise ConfigurationError(f"time_steps must be at least 50, got {time_steps}")
    if space_nodes < 100:
        raise ConfigurationError(f"space_nodes must be at least 100, got {space_nodes}")
    n_slices = time_steps + 1
    ratio = _DP_CUTOFF ** (1.0 / time_steps)
    one_minus_t = (1.0 - start.t) * ratio ** np.arange(n_slices)
    y = np.linspace(-y_max, y_max, space_nodes + 1 - space_nodes % 2)
    if problem.kind == 3:
        q = problem.q
        scale = one_minus_t ** (q / 2.0)
        payoff = lambda j, ys: np.abs(ys) ** q * scale[j]
    else:
        p = 2 * problem.n + 1 if problem.kind == 2 else 1
        scale = one_minus_t ** (p / 2.0)
        payoff = lambda j, ys: ys ** p * scale[j]
    value, _ = _dp_backward(payoff, y, n_slices, math.sqrt(ratio), math.sqrt(1.0 - ratio), False)
    return float(np.interp(start.scaled, y, value))


def check_dp_agreement(
    problem: ProblemSpec,
    thresholds: ThresholdSet,
    start: SpacePoint = SpacePoint(0.0, 0.0),
    time_steps: int = 400,
    space_nodes: int = 600,
) -> CheckReport:
    """Relative gap between the DP oracle and the closed-form candidate."""
    dp = dp_value_oracle(problem, start, time_steps, space_nodes)
    closed = candidate_value(problem, start, thresholds).value
    rel = abs(dp - closed) / abs(closed)
    return CheckReport.build(
        f"dp_oracle[{problem.describe()}]",
        rel,
        DP_REL_TOL,
        f"{time_steps}x{space_nodes} lattice at ({start.t:g}, {start.x:g})",
    )


# ---------------------------------------------------------------------------
# Aggregate runner (used by the CLI).
# ---------------------------------------------------------------------------

def verify_problem(problem: ProblemSpec, thresholds: ThresholdSet) -> list[CheckReport]:
    """Run the full check battery for one problem."""
    reports = [check_smooth_fit(problem, thresholds)]
    reports.extend(generator_reports(problem, thresholds))
    reports.append(check_dominance(problem, thresholds))
    reports.append(check_scan_agreement(problem, thresholds))
    reports.append(check_dp_agreement(problem, thresholds))
    return reports
