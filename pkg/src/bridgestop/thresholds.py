"""Solvers for the four boundary constants B*, C*, D*, A*.

Each constant is the unique root of a monotone sign function on a
bracket guaranteed by the theory:

  B*(n)  root of (2n+1) - B F_{2n+2}(B)/F_{2n+1}(B)      on [sqrt(n), sqrt(n)+10]
  D*(q)  root of q - D (F_q+G_q)'(D)/(F_q+G_q)(D)        on [sqrt((q-1)/2 v 0), +10]
  C*     root of u(C) (see value_functions.u_scalar)     on [-10, 0]
  A*(q)  root of w'(A), solved through the regularised
         ratio w'(A)/L(A) which stays finite at A = 0    on (0, sqrt((q-1)/2)]

A*(q) is exactly zero for q <= 1.  The upper bracket widths (+10) are
not part of the theory; a missing sign change raises SolverError with
the bracket diagnostics.
"""

from __future__ import annotations

import math

from scipy.optimize import brentq

from .exceptions import DomainError, SolverError
from .problems import ProblemSpec, ThresholdSet
from .special_functions import big_f
from .value_functions import u_scalar, w_prime

__all__ = [
    "b_star_equation",
    "d_star_equation",
    "solve_b_star",
    "solve_c_star",
    "solve_d_star",
    "solve_a_star",
    "solve_thresholds",
    "RESIDUAL_LIMIT",
]

RESIDUAL_LIMIT = 1e-10

_BRACKET_WIDTH = 10.0
_XTOL = 1e-13
_RTOL = 8.9e-16  # scipy's floor of 4 * machine epsilon


def _fv(q: float, y: float) -> float:
    return big_f(q, y).value


def _root(fn, lo: float, hi: float, name: str) -> float:
    f_lo, f_hi = fn(lo), fn(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo * f_hi > 0.0:
        raise SolverError(
            f"{name}: no sign change on [{lo:.6g}, {hi:.6g}] "
            f"(f(lo)={f_lo:.6g}, f(hi)={f_hi:.6g})"
        )
    return float(brentq(fn, lo, hi, xtol=_XTOL, rtol=_RTOL, maxiter=200))


def b_star_equation(n: int, b: float) -> float:
    """Sign function of the B* condition; decreasing, zero at B*."""
    q = 2 * n + 1
    return q - b * _fv(q + 1.0, b) / _fv(q, b)


def solve_b_star(n: int) -> float:
    """Solve the upper single-stopping threshold B*(n) >= sqrt(n)."""
    if not (isinstance(n, int) and n >= 0):
        raise DomainError(f"n must be a nonnegative integer, got {n!r}")
    lo = math.sqrt(n)
    root = _root(lambda b: b_star_equation(n, b), lo, lo + _BRACKET_WIDTH, f"b_star(n={n})")
    _check_residual(f"b_star(n={n})", b_star_equation(n, root))
    return root


def d_star_equation(q: float, d: float) -> float:
    """Sign function of the D* condition; zero at D*."""
    fg = _fv(q, d) + _fv(q, -d)
    fg_prime = _fv(q + 1.0, d) - _fv(q + 1.0, -d)
    return q - d * fg_prime / fg


def solve_d_star(q: float) -> float:
    """Solve the two-sided single-stopping threshold D*(q)."""
    if not (isinstance(q, (int, float)) and math.isfinite(q) and q > 0):
        raise DomainError(f"q must be a positive real, got {q!r}")
    q = float(q)
    lo = math.sqrt(max((q - 1.0) / 2.0, 0.0))
    root = _root(lambda d: d_star_equation(q, d), lo, lo + _BRACKET_WIDTH, f"d_star(q={q:g})")
    _check_residual(f"d_star(q={q:g})", d_star_equation(q, root))
    return root


def solve_c_star(b_star: float) -> float:
    """Solve the Problem-1 lower threshold C* < 0 given B* = solve_b_star(0)."""
    if not (0.0 < b_star < 1.0):
        raise DomainError(
            f"b_star must be the n=0 upper threshold in (0, 1), got {b_star!r}"
        )
    root = _root(lambda c: u_scalar(c, b_star), -_BRACKET_WIDTH, 0.0, "c_star")
    residual = u_scalar(root, b_star)
    if abs(residual) >= 1e-12:
        raise SolverError(f"c_star residual {residual:.3g} exceeds 1e-12")
    return root


def _a_star_sign(q: float, a: float, outer_ratio: float) -> float:
    """w'(A) divided by the positive factor L(A); finite at A -> 0+."""
    g = _fv(q, -a)
    g_next = _fv(q + 1.0, -a)
    f = _fv(q, a)
    f_next = _fv(q + 1.0, a)
    numer = -q * a ** (q - 1.0) * g - a ** q * g_next
    denom = f_next * g + f * g_next
    return numer / denom + outer_ratio


def solve_a_star(q: float, d_star: float) -> float:
    """Solve the Problem-3 inner threshold A*(q); exactly 0 for q <= 1."""
    if not (isinstance(q, (int, float)) and math.isfinite(q) and q > 0):
        raise DomainError(f"q must be a positive real, got {q!r}")
    q = float(q)
    if q <= 1.0:
        return 0.0
    hi = math.sqrt((q - 1.0) / 2.0)
    outer_ratio = d_star ** q / (_fv(q, d_star) + _fv(q, -d_star))
    sign = lambda a: _a_star_sign(q, a, outer_ratio)
    if sign(hi) >= 0.0:
        root = hi  # maximiser sits at the bound itself
    else:
        # the sign function is positive at 0+; walk the left end down to it
        lo = hi / 2.0
        for _ in range(200):
            if sign(lo) > 0.0:
                break
            lo /= 2.0
        else:
            raise SolverError(f"a_star(q={q:g}): no positive left bracket end found")
        root = _root(sign, lo, hi, f"a_star(q={q:g})")
    _check_residual(f"a_star(q={q:g})", w_prime(q, root, d_star))
    return root


def _check_residual(name: str, residual: float) -> None:
    if not abs(residual) < RESIDUAL_LIMIT:
        raise SolverError(f"{name} residual {residual:.3g} exceeds {RESIDUAL_LIMIT:g}")


def solve_thresholds(problem: ProblemSpec) -> ThresholdSet:
    """Solve every boundary constant the given problem needs."""
    if problem.kind == 1:
        b = solve_b_star(0)
        c = solve_c_star(b)
        return ThresholdSet(
            problem,
            b_star=b,
            c_star=c,
            residuals={
                "b_star": abs(b_star_equation(0, b)),
                "c_star": abs(u_scalar(c, b)),
            },
        )
    if problem.kind == 2:
        b = solve_b_star(problem.n)
        return ThresholdSet(
            problem,
            b_star=b,
            residuals={"b_star": abs(b_star_equation(problem.n, b))},
        )
    d = solve_d_star(problem.q)
    a = solve_a_star(problem.q, d)
    return ThresholdSet(
        problem,
        d_star=d,
        a_star=a,
        residuals={
            "d_star": abs(d_star_equation(problem.q, d)),
            "a_star": abs(w_prime(problem.q, a, d)) if a > 0.0 else 0.0,
        },
    )
