"""Closed-form value functions, payoffs and scalar boundary functionals.

Every function here is a closed form in the scaled coordinate
y = x / sqrt(1 - t), built from F_q, G_q and the normal distribution
function:

  single stopping
    u_value      best expected odd power X^(2n+1), threshold B*
    u_bar_value  best expected absolute power |X|^q, threshold D*
  double stopping candidates
    v_star   Problem 1: buy at C*, sell at B*
    j_star   Problem 2: open at +-B*, close at the opposite side
    w_star   Problem 3: enter at +-A*, exit at +-D*
  payoffs seen by the outer stopping stage
    payoff_f = u_value - x,  payoff_g (even, sign-split),  payoff_h (band)
  scalar functionals whose maximisers define the boundaries
    v_scalar / u_scalar (C), j_scalar (D), w_scalar / w_prime (A)

Products of the form exp(y^2/2) * Phi(-y), which overflow factor by
factor for large y, are evaluated through the scaled complementary
error function and stay bounded.
"""

from __future__ import annotations

import math

from .exceptions import DomainError
from .problems import SpacePoint, ThresholdSet, ValueBreakdown
from .special_functions import SQRT_2PI, big_f, erfcx, phi_cdf

__all__ = [
    "u_value",
    "u_bar_value",
    "payoff_f",
    "payoff_g",
    "payoff_h",
    "v_scalar",
    "u_scalar",
    "v_star",
    "j_scalar",
    "j_star",
    "w_scalar",
    "w_prime",
    "w_star",
    "candidate_value",
    "payoff_value",
]

_SQRT_HALF_PI = math.sqrt(0.5 * math.pi)
_SQRT1_2 = math.sqrt(0.5)


def _f1(y: float) -> float:
    # F_1(y) = sqrt(2*pi) * exp(y^2/2) * Phi(y), overflow-safe
    return _SQRT_HALF_PI * erfcx(-y * _SQRT1_2)


def _sf(q: float, y: float) -> float:
    """F_q(y); the q = 1 case goes through the bounded closed form."""
    if q == 1.0:
        return _f1(y)
    return big_f(q, y).value


def _sg(q: float, y: float) -> float:
    return _sf(q, -y)


def _sfg(q: float, y: float) -> float:
    return _sf(q, y) + _sf(q, -y)


def _check_positive(name: str, value: float) -> float:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0.0):
        raise DomainError(f"{name} must be a positive real, got {value!r}")
    return float(value)


def _check_n(n: int) -> int:
    if not (isinstance(n, int) and n >= 0):
        raise DomainError(f"n must be a nonnegative integer, got {n!r}")
    return n


# ---------------------------------------------------------------------------
# Single-stopping values.
# ---------------------------------------------------------------------------

def u_value(n: int, point: SpacePoint, b_star: float) -> ValueBreakdown:
    """Best expected value of X^(2n+1), stopped at the upper boundary B*.

    Equals x^(2n+1) on and above x = B* sqrt(1-t); below, the value is
    (1-t)^(n+1/2) (B*)^(2n+1) F_{2n+1}(y) / F_{2n+1}(B*).
    """
    _check_n(n)
    _check_positive("b_star", b_star)
    q = 2 * n + 1
    y = point.scaled
    if y >= b_star:
        return ValueBreakdown(point.x ** q, "stopping", b_star)
    one_mt = 1.0 - point.t
    value = one_mt ** (n + 0.5) * b_star ** q * _sf(q, y) / _sf(q, b_star)
    return ValueBreakdown(value, "continuation", b_star)


def u_bar_value(q: float, point: SpacePoint, d_star: float) -> ValueBreakdown:
    """Best expected value of |X|^q, stopped at the two-sided boundary D*."""
    _check_positive("q", q)
    _check_positive("d_star", d_star)
    y = abs(point.scaled)
    if y >= d_star:
        return ValueBreakdown(abs(point.x) ** q, "stopping", d_star)
    one_mt = 1.0 - point.t
    value = one_mt ** (q / 2.0) * d_star ** q * _sfg(q, y) / _sfg(q, d_star)
    return ValueBreakdown(value, "continuation", d_star)


# ---------------------------------------------------------------------------
# Problem 1: spread of levels.
# ---------------------------------------------------------------------------

def payoff_f(point: SpacePoint, b_star: float) -> float:
    """Outer-stage payoff of Problem 1: u_value(0, .) - x."""
    return u_value(0, point, b_star).value - point.x


def v_scalar(c: float, b_star: float) -> float:
    """Expected Problem-1 spread per unit of the scaled profile, as a
    function of the lower threshold C <= B*."""
    if not c <= b_star:
        raise DomainError(f"C must not exceed b_star, got C={c!r}")
    gauss = math.exp(-0.5 * c * c) / SQRT_2PI
    return ((1.0 - b_star * b_star) * phi_cdf(c) - c * gauss) / phi_cdf(-c)


def u_scalar(c: float, b_star: float) -> float:
    """Sign function of v_scalar': positive below C*, negative above."""
    if not c <= b_star:
        raise DomainError(f"C must not exceed b_star, got C={c!r}")
    gauss = math.exp(-0.5 * c * c) / SQRT_2PI
    return 1.0 - b_star * b_star - (1.0 - c * c) * phi_cdf(-c) - c * gauss


def v_star(point: SpacePoint, thresholds: ThresholdSet) -> ValueBreakdown:
    """Problem 1 candidate value: stop below C* sqrt(1-t), then sell at B*."""
    b, c = thresholds.b_star, thresholds.c_star
    if b is None or c is None:
        raise DomainError("v_star needs thresholds with b_star and c_star")
    y = point.scaled
    if y <= c:
        return ValueBreakdown(payoff_f(point, b), "stopping", c)
    # sqrt(2*pi) * Phi(-y) * exp(y^2/2) == sqrt(pi/2) * erfcx(y/sqrt(2))
    profile = _SQRT_HALF_PI * erfcx(y * _SQRT1_2)
    value = math.sqrt(1.0 - point.t) * profile * v_scalar(c, b)
    return ValueBreakdown(value, "continuation", c)


# ---------------------------------------------------------------------------
# Problem 2: sign-split spread of odd powers.
# ---------------------------------------------------------------------------

def payoff_g(n: int, point: SpacePoint, b_star: float) -> float:
    """Outer-stage payoff of Problem 2; even in x and nonnegative."""
    x = point.x
    q = 2 * _check_n(n) + 1
    if x <= 0.0:
        return u_value(n, point, b_star).value - x ** q
    mirrored = SpacePoint(point.t, -x)
    return u_value(n, mirrored, b_star).value + x ** q


def j_scalar(n: int, d: float, b_star: float) -> float:
    """Expected Problem-2 spread per unit of the scaled even profile, as
    a function of the first (two-sided) threshold D >= 0."""
    _check_n(n)
    if not (math.isfinite(d) and d >= 0.0):
        raise DomainError(f"D must be a nonnegative real, got {d!r}")
    q = 2 * n + 1
    return (d ** q + b_star ** q * _sg(q, d) / _sf(q, b_star)) / _sfg(q, d)


def j_star(n: int, point: SpacePoint, thresholds: ThresholdSet) -> ValueBreakdown:
    """Problem 2 candidate value: open at |x| = B* sqrt(1-t), close at the
    opposite boundary."""
    b = thresholds.b_star
    if b is None:
        raise DomainError("j_star needs thresholds with b_star")
    q = 2 * _check_n(n) + 1
    y = abs(point.scaled)
    if y >= b:
        return ValueBreakdown(payoff_g(n, point, b), "stopping", b)
    # j at its maximiser B* collapses to (B*)^(2n+1) / F_{2n+1}(B*)
    j_max = b ** q / _sf(q, b)
    value = (1.0 - point.t) ** (n + 0.5) * _sfg(q, y) * j_max
    return ValueBreakdown(value, "continuation", b)


# ---------------------------------------------------------------------------
# Problem 3: spread of absolute powers.
# ---------------------------------------------------------------------------

def payoff_h(q: float, point: SpacePoint, d_star: float) -> float:
    """Outer-stage payoff of Problem 3: the single-stopping premium
    u_bar_value - |x|^q inside the band |x| < D* sqrt(1-t), zero outside."""
    _check_positive("q", q)
    _check_positive("d_star", d_star)
    if abs(point.scaled) >= d_star:
        return 0.0
    return u_bar_value(q, point, d_star).value - abs(point.x) ** q


def w_scalar(q: float, a: float, d_star: float) -> float:
    """Expected Problem-3 spread per unit of the scaled outer profile, as
    a function of the inner threshold A in [0, D*]."""
    _check_positive("q", q)
    if not (math.isfinite(a) and 0.0 <= a <= d_star):
        raise DomainError(f"A must lie in [0, d_star], got {a!r}")
    ratio = d_star ** q / _sfg(q, d_star)
    return (ratio * _sfg(q, a) - a ** q) / _sg(q, a)


def w_prime(q: float, a: float, d_star: float) -> float:
    """Derivative of w_scalar in A (diverges to -inf at A = 0 for q < 1)."""
    _check_positive("q", q)
    if not (math.isfinite(a) and 0.0 <= a <= d_star):
        raise DomainError(f"A must lie in [0, d_star], got {a!r}")
    if a == 0.0 and q < 1.0:
        return -math.inf
    ratio = d_star ** q / _sfg(q, d_star)
    g = _sg(q, a)
    g_prime = -_sg(q + 1.0, a)
    fg_prime = _sf(q + 1.0, a) - _sg(q + 1.0, a)
    term1 = (ratio * fg_prime - q * a ** (q - 1.0)) / g
    term2 = (ratio * _sfg(q, a) - a ** q) * g_prime / (g * g)
    return term1 - term2


def w_star(q: float, point: SpacePoint, thresholds: ThresholdSet) -> ValueBreakdown:
    """Problem 3 candidate value: enter at |x| = A* sqrt(1-t), exit at D*."""
    a, d = thresholds.a_star, thresholds.d_star
    if a is None or d is None:
        raise DomainError("w_star needs thresholds with a_star and d_star")
    y = abs(point.scaled)
    if y <= a:
        return ValueBreakdown(payoff_h(q, point, d), "stopping", a)
    value = (1.0 - point.t) ** (q / 2.0) * _sg(q, y) * w_scalar(q, a, d)
    return ValueBreakdown(value, "continuation", a)


# ---------------------------------------------------------------------------
# Dispatch by problem.
# ---------------------------------------------------------------------------

def candidate_value(problem, point: SpacePoint, thresholds: ThresholdSet) -> ValueBreakdown:
    """The double-stopping candidate value of the given problem."""
    if problem.kind == 1:
        return v_star(point, thresholds)
    if problem.kind == 2:
        return j_star(problem.n, point, thresholds)
    return w_star(problem.q, point, thresholds)


def payoff_value(problem, point: SpacePoint, thresholds: ThresholdSet) -> float:
    """The outer-stage payoff of the given problem."""
    if problem.kind == 1:
        return payoff_f(point, thresholds.b_star)
    if problem.kind == 2:
        return payoff_g(problem.n, point, thresholds.b_star)
    return payoff_h(problem.q, point, thresholds.d_star)
