"""Domain types shared across the package.

The three spread-maximisation problems for a Brownian bridge pinned at
zero at time one:

    Problem 1   E[X_tau2 - X_tau1]
    Problem 2   E[(X_tau2^(2n+1) - X_tau1^(2n+1)) 1{X_tau1 <= 0}
                  + (X_tau1^(2n+1) - X_tau2^(2n+1)) 1{X_tau1 > 0}]
    Problem 3   E[|X_tau2|^q - |X_tau1|^q]

over pairs of stopping times t <= tau1 <= tau2 < 1.  All optimal rules
are threshold rules on the scaled coordinate y = x / sqrt(1 - t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .exceptions import DomainError

__all__ = ["ProblemSpec", "ThresholdSet", "SpacePoint", "ValueBreakdown"]


@dataclass(frozen=True)
class ProblemSpec:
    """Which problem is being solved, plus its parameter.

    ``n`` only matters for Problem 2 (spread of odd powers), ``q`` only
    for Problem 3 (spread of absolute powers).
    """

    kind: int
    n: int = 0
    q: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in (1, 2, 3):
            raise DomainError(f"kind must be 1, 2 or 3, got {self.kind!r}")
        if not (isinstance(self.n, int) and self.n >= 0):
            raise DomainError(f"n must be a nonnegative integer, got {self.n!r}")
        if not (isinstance(self.q, (int, float)) and math.isfinite(self.q) and self.q > 0):
            raise DomainError(f"q must be a positive real, got {self.q!r}")

    @staticmethod
    def problem1() -> "ProblemSpec":
        return ProblemSpec(kind=1)

    @staticmethod
    def problem2(n: int) -> "ProblemSpec":
        return ProblemSpec(kind=2, n=n)

    @staticmethod
    def problem3(q: float) -> "ProblemSpec":
        return ProblemSpec(kind=3, q=float(q))

    @property
    def scale_power(self) -> float:
        """Exponent p in value(t, x) = (1-t)^p * value(0, x/sqrt(1-t))."""
        if self.kind == 1:
            return 0.5
        if self.kind == 2:
            return self.n + 0.5
        return self.q / 2.0

    def describe(self) -> str:
        if self.kind == 1:
            return "problem 1"
        if self.kind == 2:
            return f"problem 2 (n={self.n})"
        return f"problem 3 (q={self.q:g})"


@dataclass(frozen=True)
class ThresholdSet:
    """Solved boundary constants for one problem, with solver residuals.

    Problems 1 and 2 use ``b_star``; Problem 1 additionally ``c_star``;
    Problem 3 uses ``d_star`` and ``a_star``.  Unused constants are None.
    ``residuals`` maps each solved constant to the absolute value of its
    defining equation at the root.
    """

    problem: ProblemSpec
    b_star: float | None = None
    c_star: float | None = None
    d_star: float | None = None
    a_star: float | None = None
    residuals: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class SpacePoint:
    """A state (t, x) of the bridge, with 0 <= t < 1."""

    t: float
    x: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.t < 1.0):
            raise DomainError(f"t must lie in [0, 1), got {self.t!r}")
        if not math.isfinite(self.x):
            raise DomainError(f"x must be finite, got {self.x!r}")

    @property
    def scaled(self) -> float:
        """The scaled coordinate y = x / sqrt(1 - t)."""
        return self.x / math.sqrt(1.0 - self.t)


@dataclass(frozen=True)
class ValueBreakdown:
    """A candidate-value evaluation with its region classification.

    ``boundary`` is the active threshold in scaled coordinates; the
    point is in the stopping region exactly when its scaled coordinate
    is beyond that threshold (boundary points count as stopping).
    """

    value: float
    region: str  # "continuation" | "stopping"
    boundary: float
