"""Max-Cut SDP relaxation solved by low-rank coordinate ascent (mixing method).

Each vertex carries a unit vector of rank ``k = min(n, ceil(sqrt(2n)) + 1)``.
A sweep replaces every vector by the negated, normalised, multiplicity
weighted sum of its neighbours' vectors, which is the exact maximiser of
the objective in that vector, so the objective never decreases.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .graph import Multigraph

__all__ = [
    "Embedding",
    "SdpReport",
    "SdpConvergenceError",
    "default_rank",
    "solve_maxcut_sdp",
    "sdp_objective",
    "pairwise_angle",
    "edge_angles",
]

log = logging.getLogger(__name__)

NORM_TOL = 1e-9
MAX_SWEEPS = 100_000
MAX_RESTARTS = 5


@dataclass(frozen=True)
class Embedding:
    """One unit row vector per vertex."""

    vectors: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.vectors, dtype=np.float64)
        if v.ndim != 2 or v.shape[1] < 1:
            raise ValueError("embedding must be an (n, k) matrix with k >= 1")
        if v.shape[0] and np.max(np.abs(np.linalg.norm(v, axis=1) - 1.0)) > NORM_TOL:
            raise ValueError("embedding rows must have unit norm")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def rank(self) -> int:
        return self.vectors.shape[1]

    @classmethod
    def normalised(cls, rows) -> "Embedding":
        v = np.asarray(rows, dtype=np.float64)
        v = v.reshape(len(v), -1)
        return cls(v / np.linalg.norm(v, axis=1, keepdims=True))

    def to_text(self) -> str:
        return "\n".join(" ".join(repr(float(x)) for x in row) for row in self.vectors) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Embedding":
        rows = [[float(t) for t in line.split()] for line in text.splitlines() if line.strip()]
        if len({len(r) for r in rows}) > 1:
            raise ValueError("embedding rows have differing lengths")
        v = np.array(rows, dtype=np.float64)
        # text round-trips lose the last ulp; renormalise rather than reject
        return cls(v / np.linalg.norm(v, axis=1, keepdims=True))


@dataclass(frozen=True)
class SdpReport:
    objective: float
    iterations: int
    converged: bool
    tolerance: float
    restarts: int = 0
    history: tuple[float, ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "objective": self.objective,
            "iterations": self.iterations,
            "converged": self.converged,
            "tolerance": self.tolerance,
            "restarts": self.restarts,
        }


class SdpConvergenceError(RuntimeError):
    """Raised when every restart hits the sweep cap; carries the best iterate."""

    def __init__(self, embedding: Embedding, report: SdpReport):
        self.embedding = embedding
        self.report = report
        super().__init__(
            f"SDP did not converge after {report.restarts} restarts "
            f"(best objective {report.objective:.9g})"
        )


def default_rank(n: int) -> int:
    return max(1, min(n, math.ceil(math.sqrt(2 * n)) + 1))


def sdp_objective(g: Multigraph, emb: Embedding) -> float:
    """``sum_e mult_e (1 - x_u . x_v) / 2``."""
    if emb.n != g.n:
        raise ValueError(f"embedding has {emb.n} rows, graph has {g.n} vertices")
    return _objective(g, emb.vectors)


def _objective(g: Multigraph, V: np.ndarray) -> float:
    eu, ev, ew = g.arrays
    if len(eu) == 0:
        return 0.0
    dots = np.einsum("ij,ij->i", V[eu], V[ev])
    return float(ew @ (1.0 - dots)) / 2.0


def pairwise_angle(emb: Embedding, u: int, v: int) -> float:
    x = emb.vectors
    return float(np.arccos(np.clip(x[u] @ x[v], -1.0, 1.0)))


def edge_angles(g: Multigraph, emb: Embedding) -> np.ndarray:
    """Angle between endpoint vectors for every support edge, canonical order."""
    eu, ev, _ = g.arrays
    V = emb.vectors
    return np.arccos(np.clip(np.einsum("ij,ij->i", V[eu], V[ev]), -1.0, 1.0))


def _ascend(g, V, eps, tol, max_sweeps, keep_history):
    indptr, indices, weights = g.csr
    obj = _objective(g, V)
    history = [obj] if keep_history else []
    gain_prev = math.inf
    for sweep in range(1, max_sweeps + 1):
        _kernels.mixing_sweep(V, indptr, indices, weights)
        V /= np.linalg.norm(V, axis=1, keepdims=True)
        new = _objective(g, V)
        if keep_history:
            history.append(new)
        gain = new - obj
        obj = new
        if gain <= 0.0:
            return obj, sweep, True, history
        if gain / max(new, 1.0) < tol:
            # linear convergence: the remaining gap is about gain * r / (1 - r)
            r = gain / gain_prev
            if r < 1.0 and gain * r / (1.0 - r) < eps / 10.0:
                return obj, sweep, True, history
        gain_prev = gain
    return obj, max_sweeps, False, history


def solve_maxcut_sdp(
    g: Multigraph,
    eps: float = 1e-6,
    seed: int = 0,
    *,
    rank: int | None = None,
    max_sweeps: int = MAX_SWEEPS,
    max_restarts: int = MAX_RESTARTS,
    keep_history: bool = False,
) -> tuple[Embedding, SdpReport]:
    """Solve the Max-Cut SDP to additive accuracy ``eps``.

    Sweeps stop once the relative objective gain of a full sweep drops below
    ``eps / (10 W)``, ``W`` the total weight, and the geometric tail implied
    by the last two gains is below ``eps / 10``. A run that hits ``max_sweeps``
    is retried with a fresh seed; if all restarts fail,
    :class:`SdpConvergenceError` is raised with the best iterate attached.
    """
    if g.m == 0:
        raise ValueError("graph has no edges")
    if not eps > 0:
        raise ValueError("eps must be positive")
    k = rank or default_rank(g.n)
    if not 1 <= k <= g.n:
        raise ValueError(f"rank must be in [1, {g.n}]")
    tol = eps / (10.0 * g.total_weight)
    best = None
    for attempt in range(max_restarts):
        rng = np.random.default_rng(np.random.SeedSequence([seed & (2**64 - 1), attempt]))
        V = rng.standard_normal((g.n, k))
        V /= np.linalg.norm(V, axis=1, keepdims=True)
        obj, sweeps, ok, hist = _ascend(g, V, eps, tol, max_sweeps, keep_history)
        report = SdpReport(obj, sweeps, ok, eps, attempt, tuple(hist))
        if best is None or obj > best[1].objective:
            best = (V, report)
        if ok:
            return Embedding(V), report
        log.warning("SDP restart %d hit the sweep cap at objective %.9g", attempt, obj)
    V, report = best
    raise SdpConvergenceError(Embedding(V), report)
