"""Conditional-expectation derandomisation over a standard Gaussian vector.

The objective is a weighted count of conjunctions of strict half-spaces
``x . a > y``. Coordinates of ``a`` are fixed one at a time. For the current
coordinate ``t`` each term's conditional probability is a function of ``t``;
the remaining Gaussian coordinates enter only through at most ``d`` linear
forms, so they are replaced by a ``d``-dimensional factor and then by a
product grid of normalised binomials. On that grid every atom switches the
term on for one open interval of ``t``, which makes the summed estimate a
step function whose best plateau is found exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import _kernels

__all__ = [
    "MAX_ARITY",
    "DerandBudgetError",
    "DerandConfig",
    "HalfSpaceTerm",
    "HalfSpaceSystem",
    "StepFunction",
    "BinomialGrid",
    "berry_esseen_N",
    "berry_esseen_eps",
    "derandomisation_slack",
    "reduce_dimension",
    "grid_probability",
    "step_approximation",
    "derandomize",
]

MAX_ARITY = 6


class DerandBudgetError(ValueError):
    """A term's grid would exceed the configured atom budget."""


@dataclass(frozen=True)
class DerandConfig:
    grid_n: int = 16
    atom_budget: int = 100_000

    def __post_init__(self):
        if self.grid_n < 1:
            raise ValueError("grid_n must be positive")
        if self.atom_budget < 1:
            raise ValueError("atom_budget must be positive")


@dataclass(frozen=True)
class HalfSpaceTerm:
    """``weight * [normals[j] . a > thresholds[j] for every j]``."""

    weight: float
    normals: np.ndarray
    thresholds: np.ndarray

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.normals, dtype=np.float64))
        y = np.asarray(self.thresholds, dtype=np.float64).reshape(-1)
        if len(y) != X.shape[0]:
            raise ValueError("one threshold per normal required")
        if not 1 <= X.shape[0] <= MAX_ARITY:
            raise ValueError(f"term arity must be in [1, {MAX_ARITY}]")
        if self.weight < 0:
            raise ValueError("term weight must be non-negative")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "normals", X)
        object.__setattr__(self, "thresholds", y)

    @classmethod
    def from_constraints(cls, weight: float, constraints: Iterable[tuple[Sequence[float], float]]):
        cons = list(constraints)
        return cls(weight, np.array([c[0] for c in cons], dtype=np.float64), [c[1] for c in cons])

    @property
    def arity(self) -> int:
        return self.normals.shape[0]

    @property
    def dimension(self) -> int:
        return self.normals.shape[1]

    def holds(self, a: np.ndarray) -> bool:
        return bool(np.all(self.normals @ a > self.thresholds))


@dataclass(frozen=True)
class HalfSpaceSystem:
    terms: tuple[HalfSpaceTerm, ...]
    dimension: int

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        for t in self.terms:
            if t.dimension != self.dimension:
                raise ValueError("all normals must share the system dimension")

    @property
    def max_arity(self) -> int:
        return max((t.arity for t in self.terms), default=0)

    @property
    def total_weight(self) -> float:
        return float(sum(t.weight for t in self.terms))

    def indicator_sum(self, a) -> float:
        """Exact weighted count of terms satisfied at the point ``a``."""
        a = np.asarray(a, dtype=np.float64)
        return float(sum(t.weight for t in self.terms if t.holds(a)))

    def grid_expectation(self, grid_n: int, atom_budget: int = 10**6) -> float:
        """Binomial-grid estimate of the expected weighted count."""
        return float(sum(t.weight * grid_probability(t, grid_n, atom_budget) for t in self.terms))


class StepFunction:
    """Piecewise-constant function of one real variable.

    ``values[0]`` holds left of ``breakpoints[0]``, ``values[i]`` between
    ``breakpoints[i-1]`` and ``breakpoints[i]``, ``values[-1]`` right of the
    last breakpoint. At a breakpoint the right-hand value is returned.
    """

    def __init__(self, breakpoints, values):
        b = np.asarray(breakpoints, dtype=np.float64)
        v = np.asarray(values, dtype=np.float64)
        if len(v) != len(b) + 1:
            raise ValueError("need exactly one more value than breakpoints")
        if len(b) > 1 and not np.all(np.diff(b) > 0):
            raise ValueError("breakpoints must be strictly increasing")
        self.breakpoints = b
        self.values = v

    @classmethod
    def from_intervals(cls, lo, hi, w) -> "StepFunction":
        """Sum of ``w_k * [lo_k < t < hi_k]``."""
        lo, hi, w = (np.asarray(x, dtype=np.float64) for x in (lo, hi, w))
        base = float(w[np.isneginf(lo)].sum())
        fl, fh = np.isfinite(lo), np.isfinite(hi)
        pos = np.concatenate([lo[fl], hi[fh]])
        delta = np.concatenate([w[fl], -w[fh]])
        if len(pos) == 0:
            return cls([], [base])
        uniq, inv = np.unique(pos, return_inverse=True)
        jumps = np.bincount(inv.ravel(), weights=delta, minlength=len(uniq))
        return cls(uniq, base + np.concatenate([[0.0], np.cumsum(jumps)]))

    @classmethod
    def constant(cls, value: float) -> "StepFunction":
        return cls([], [value])

    def __call__(self, t):
        return self.values[np.searchsorted(self.breakpoints, t, side="right")]

    def __add__(self, other: "StepFunction") -> "StepFunction":
        b = np.union1d(self.breakpoints, other.breakpoints)
        probes = _plateau_probes(b)
        return StepFunction(b, self(probes) + other(probes))

    def best_plateau(self, rtol: float = 1e-12) -> tuple[float, float]:
        """A point in the interior of a maximising plateau, and the maximum.

        Among plateaus within ``rtol`` of the maximum the widest wins
        (unbounded ones count as infinitely wide); the point is its midpoint,
        or one unit beyond the finite end of an unbounded plateau.
        """
        b, v = self.breakpoints, self.values
        if len(b) == 0:
            return 0.0, float(v[0])
        top = float(v.max())
        cands = np.flatnonzero(v >= top - rtol * max(1.0, abs(top)))
        widths = np.full(len(v), np.inf)
        widths[1:-1] = np.diff(b)
        i = int(cands[np.argmax(widths[cands])])
        if i == 0:
            t = b[0] - 1.0
        elif i == len(b):
            t = b[-1] + 1.0
        else:
            t = 0.5 * (b[i - 1] + b[i])
        return float(t), float(v[i])


def _plateau_probes(b: np.ndarray) -> np.ndarray:
    if len(b) == 0:
        return np.zeros(1)
    mids = 0.5 * (b[:-1] + b[1:])
    return np.concatenate([[b[0] - 1.0], mids, [b[-1] + 1.0]])


class BinomialGrid:
    """``NBin(N)``: sum of ``N`` fair ``+-1/sqrt(N)`` steps.

    Atoms ``(2k - N)/sqrt(N)`` with masses ``C(N, k) / 2**N`` for ``0 <= k <= N``.
    """

    def __init__(self, N: int):
        if N < 1:
            raise ValueError("N must be positive")
        self.N = N

    @cached_property
    def points(self) -> np.ndarray:
        k = np.arange(self.N + 1, dtype=np.float64)
        return (2 * k - self.N) / math.sqrt(self.N)

    @cached_property
    def masses(self) -> np.ndarray:
        N = self.N
        if N <= 1000:
            return np.array([math.comb(N, k) / 2**N for k in range(N + 1)])
        # avoids huge integers; total mass stays within a few ulp of one
        from scipy.stats import binom

        return binom.pmf(np.arange(N + 1), N, 0.5)

    def exact_moments(self) -> tuple[Fraction, Fraction, Fraction]:
        """Total mass, mean and variance in exact rational arithmetic.

        The mean is carried in units of ``1/sqrt(N)`` (zero is zero either way);
        the variance ``sum mass * (2k - N)**2 / N`` is rational.
        """
        N = self.N
        denom = 2**N
        total = Fraction(sum(math.comb(N, k) for k in range(N + 1)), denom)
        mean = Fraction(sum(math.comb(N, k) * (2 * k - N) for k in range(N + 1)), denom)
        var = Fraction(sum(math.comb(N, k) * (2 * k - N) ** 2 for k in range(N + 1)), denom * N)
        return total, mean, var


def berry_esseen_N(d: int, eps: float) -> int:
    """Grid size making the ``d``-dimensional binomial grid ``eps``-close on convex sets."""
    if d < 1:
        raise ValueError("d must be at least 1")
    if not 0 < eps < 1 and eps != 1:
        raise ValueError("eps must lie in (0, 1]")
    c = 42 * d**1.75 + 16 * d**1.5
    # round first: d**1.75 carries float noise that would bump exact squares
    return math.ceil(round((c / eps) ** 2, 9))


def berry_esseen_eps(d: int, N: int) -> float:
    """Inverse of :func:`berry_esseen_N`: guaranteed accuracy of an ``N``-grid in ``d`` dims."""
    return (42 * d**1.75 + 16 * d**1.5) / math.sqrt(N)


def derandomisation_slack(system: "HalfSpaceSystem", N: int) -> float:
    """Worst-case shortfall of :func:`derandomize` below the expected weight.

    Each coordinate step can lose twice the grid error per term, and there
    are ``dimension`` steps.
    """
    d = max(system.max_arity, 1)
    return 2.0 * system.dimension * berry_esseen_eps(d, N) * system.total_weight


def _pivoted_cholesky(G: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    d = G.shape[0]
    L = np.zeros((d, d))
    diag = np.diag(G).astype(np.float64).copy()
    scale = max(float(diag.max(initial=0.0)), 0.0)
    remaining = list(range(d))
    for col in range(d):
        p = max(remaining, key=lambda i: diag[i])
        if diag[p] <= rtol * scale or diag[p] <= 0.0:
            break
        piv = math.sqrt(diag[p])
        L[p, col] = piv
        remaining.remove(p)
        for i in remaining:
            L[i, col] = (G[i, p] - L[i, :col] @ L[p, :col]) / piv
            diag[i] -= L[i, col] ** 2
    return L


def reduce_dimension(normals) -> np.ndarray:
    """A ``d x d`` factor ``F`` with ``F F^T = X X^T`` for the ``d`` given normals.

    Rows of ``F`` are normals in ``R^d`` whose dot products with a standard
    Gaussian have the same joint law as the originals'. Rank-deficient Gram
    matrices give trailing zero columns.
    """
    X = np.atleast_2d(np.asarray(normals, dtype=np.float64))
    if X.shape[1] == 0:
        return np.zeros((X.shape[0], X.shape[0]))
    return _pivoted_cholesky(X @ X.T)


def _factor(R: np.ndarray) -> np.ndarray:
    """Reduced factor with zero columns dropped (``d x rank``)."""
    F = reduce_dimension(R) if R.shape[1] else np.zeros((R.shape[0], 0))
    keep = np.any(F != 0.0, axis=0)
    return np.ascontiguousarray(F[:, keep])


def _check_budget(N: int, r: int, budget: int) -> None:
    if (N + 1) ** r > budget:
        raise DerandBudgetError(
            f"grid of {(N + 1) ** r} atoms (N={N}, rank {r}) exceeds the atom budget {budget}"
        )


def grid_probability(term: HalfSpaceTerm, N: int, atom_budget: int = 10**6) -> float:
    """Grid estimate of ``Pr[term holds]`` with every coordinate random."""
    grid = BinomialGrid(N)
    L = _factor(term.normals)
    _check_budget(N, L.shape[1], atom_budget)
    z = np.zeros(term.arity)
    _, _, w = _kernels.atom_intervals(L, np.ascontiguousarray(term.thresholds), z, grid.points, grid.masses)
    return float(w.sum())


def step_approximation(
    system: HalfSpaceSystem,
    coord: int,
    prefix,
    N: int,
    atom_budget: int = 100_000,
) -> StepFunction:
    """Grid estimate of the conditional expected weight as a function of ``a[coord]``.

    ``prefix`` fixes ``a[:coord]``; coordinates after ``coord`` stay random.
    """
    prefix = np.asarray(prefix, dtype=np.float64)
    if len(prefix) != coord:
        raise ValueError("prefix length must equal coord")
    grid = BinomialGrid(N)
    los, his, ws = [], [], []
    for term in system.terms:
        if term.weight == 0:
            continue
        X = term.normals
        y = np.ascontiguousarray(term.thresholds - X[:, :coord] @ prefix)
        z = np.ascontiguousarray(X[:, coord])
        L = _factor(X[:, coord + 1 :])
        _check_budget(N, L.shape[1], atom_budget)
        lo, hi, w = _kernels.atom_intervals(L, y, z, grid.points, grid.masses)
        los.append(lo)
        his.append(hi)
        ws.append(w * term.weight)
    if not ws:
        return StepFunction.constant(0.0)
    return StepFunction.from_intervals(np.concatenate(los), np.concatenate(his), np.concatenate(ws))


def derandomize(
    system: HalfSpaceSystem,
    N: int = 16,
    atom_budget: int = 100_000,
    *,
    trace: list | None = None,
) -> tuple[np.ndarray, float]:
    """Fix ``a`` coordinate by coordinate at a best plateau of the estimated conditional expectation.

    Returns ``(a_star, achieved)`` where ``achieved`` is the exact weighted
    indicator count at ``a_star``. If ``trace`` is a list, the plateau value
    chosen at each coordinate is appended to it.
    """
    n = system.dimension
    a = np.zeros(n)
    for j in range(n):
        sf = step_approximation(system, j, a[:j], N, atom_budget)
        t, val = sf.best_plateau()
        a[j] = t
        if trace is not None:
            trace.append(val)
    return a, system.indicator_sum(a)
