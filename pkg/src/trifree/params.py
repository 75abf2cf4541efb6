"""Rounding constants: the Goemans-Williamson pair and the hybrid tuple.

The hybrid scheme keeps every edge whose embedding angle is at least ``tau``
(the long band), keeps hyperplane-separated edges with angle in
``[pi - tau/2, tau)`` (the middle band), and otherwise falls back to a plain
hyperplane cut with probability ``p_case1``. The three inequalities checked
by :func:`verify_constraints` say that every band is included with
probability at least ``alpha (1 - cos angle) / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

__all__ = [
    "PUBLISHED_TAU",
    "PUBLISHED_ALPHA_FLOOR",
    "ADVERTISED_RATIO",
    "RoundingParams",
    "ConstraintReport",
    "gw_ratio_curve",
    "gw_constants",
    "x_of_tau",
    "bound_long",
    "bound_middle",
    "hybrid_params",
    "verify_constraints",
    "optimize_tau",
]

PUBLISHED_TAU = 2.18746
PUBLISHED_ALPHA_FLOOR = 0.88232
ADVERTISED_RATIO = 0.8823

_XTOL = 1e-12


@dataclass(frozen=True)
class RoundingParams:
    """``(alpha, tau, p_case1, q_case2)``: target ratio, long-edge threshold, coin bias."""

    alpha: float
    tau: float
    p_case1: float
    q_case2: float

    def __post_init__(self):
        if self.p_case1 < 0 or self.q_case2 < 0:
            raise ValueError("coin probabilities must be non-negative")
        if abs(self.p_case1 + self.q_case2 - 1.0) > 1e-12:
            raise ValueError("p_case1 + q_case2 must equal 1")
        tau_gw = gw_constants()[1]
        if not (2 * math.pi / 3 - 1e-12 <= self.tau <= tau_gw + 1e-12):
            raise ValueError(f"tau must lie in [2pi/3, tau_gw], got {self.tau}")

    @classmethod
    def with_p(cls, alpha: float, tau: float, p_case1: float) -> "RoundingParams":
        return cls(alpha, tau, p_case1, 1.0 - p_case1)

    @property
    def middle_threshold(self) -> float:
        """Lower end ``pi - tau/2`` of the middle band."""
        return math.pi - self.tau / 2

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "tau": self.tau,
            "p_case1": self.p_case1,
            "q_case2": self.q_case2,
        }


@dataclass(frozen=True)
class ConstraintReport:
    """Minimum slack of each band inequality on a uniform grid.

    Bands: ``long`` is ``[tau, pi]``, ``middle`` is ``[pi - tau/2, tau]``,
    ``short`` is ``[0, pi - tau/2]``. ``violations`` lists ``(band, angle,
    margin)`` for grid points with margin below ``-tolerance``.
    """

    margins: dict[str, float]
    grid_points: int
    tolerance: float
    violations: tuple[tuple[str, float, float], ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "margins": dict(self.margins),
            "grid_points": self.grid_points,
            "tolerance": self.tolerance,
            "ok": self.ok,
            "violations": [list(v) for v in self.violations[:20]],
            "n_violations": len(self.violations),
        }


def gw_ratio_curve(tau):
    """``(pi/2) (1 - cos tau) / tau``; its reciprocal maximum is ``alpha_gw``."""
    tau = np.asarray(tau, dtype=np.float64)
    return (math.pi / 2) * (1 - np.cos(tau)) / tau


_GW_CACHE: tuple[float, float] | None = None


def gw_constants() -> tuple[float, float]:
    """``(alpha_gw, tau_gw)`` by bounded scalar maximisation on ``(0, pi]``."""
    global _GW_CACHE
    if _GW_CACHE is None:
        res = minimize_scalar(
            lambda t: -float(gw_ratio_curve(t)),
            bounds=(1.0, math.pi),
            method="bounded",
            options={"xatol": _XTOL},
        )
        _GW_CACHE = (float(1.0 / -res.fun), float(res.x))
    return _GW_CACHE


def x_of_tau(tau: float) -> float:
    """``(1 - cos(pi - tau/2)) / (pi - tau/2)``."""
    if tau >= 2 * math.pi:
        raise ValueError("tau must be below 2 pi")
    s = math.pi - tau / 2
    return (1 - math.cos(s)) / s


def bound_long(tau: float) -> float:
    """Largest alpha the long band allows when ``p_case1`` is as small as possible."""
    x = x_of_tau(tau)
    a = math.asin(x)
    return 2.0 / (x * a + math.cos(a) + 1.0)


def bound_middle(tau: float) -> float:
    """Largest alpha the middle band allows: ``(2/pi) tau / (1 - cos tau)``."""
    return (2.0 / math.pi) * tau / (1.0 - math.cos(tau))


def _params_at(tau: float, alpha: float) -> RoundingParams:
    p = alpha * math.pi / 2 * x_of_tau(tau)
    return RoundingParams.with_p(alpha, tau, p)


def hybrid_params(tau: float = PUBLISHED_TAU) -> RoundingParams:
    """The hybrid tuple at ``tau``: alpha as large as both bounds permit, minimal ``p_case1``."""
    alpha = min(bound_long(tau), bound_middle(tau))
    return _params_at(tau, alpha)


def _bands(params: RoundingParams, grid_points: int):
    tau, s = params.tau, params.middle_threshold
    p, q = params.p_case1, params.q_case2
    return {
        "long": (np.linspace(tau, math.pi, grid_points), lambda th: p * th / math.pi + q),
        "middle": (np.linspace(s, tau, grid_points), lambda th: (p + q) * th / math.pi),
        "short": (np.linspace(0.0, s, grid_points), lambda th: p * th / math.pi),
    }


def verify_constraints(
    params: RoundingParams, grid_points: int = 10_000, tolerance: float = 1e-9
) -> ConstraintReport:
    """Evaluate the three band inequalities on uniform grids including both endpoints."""
    if grid_points < 2:
        raise ValueError("grid_points must be at least 2")
    margins = {}
    violations = []
    for band, (grid, inclusion) in _bands(params, grid_points).items():
        margin = inclusion(grid) - params.alpha * (1 - np.cos(grid)) / 2
        margins[band] = float(margin.min())
        for th, mg in zip(grid[margin < -tolerance], margin[margin < -tolerance]):
            violations.append((band, float(th), float(mg)))
    return ConstraintReport(margins, grid_points, tolerance, tuple(violations))


def optimize_tau(search_tolerance: float = 1e-6) -> tuple[float, float]:
    """Maximise ``min(bound_long, bound_middle)`` over ``tau`` in ``[2pi/3, tau_gw]``."""
    if not search_tolerance > 0:
        raise ValueError("search_tolerance must be positive")
    tau_gw = gw_constants()[1]
    res = minimize_scalar(
        lambda t: -min(bound_long(t), bound_middle(t)),
        bounds=(2 * math.pi / 3, tau_gw),
        method="bounded",
        options={"xatol": search_tolerance},
    )
    return float(res.x), float(-res.fun)
