"""Exact MaxPCSP(K2, K3): a 3-colouring satisfying as many edges as the best cut.

Each vertex takes the colour of the Gaussian vector it correlates with most.
Two unit vectors at inner product ``alpha`` receive the same colour with
probability ``3 P(alpha)``, and ``1 - 3 P(alpha) >= (1 - alpha) / 2``, so the
expected bichromatic weight is at least the SDP objective. Since the weight is
an integer, a colouring reaching ``floor(SDP)`` exists among the samples and
can be found by restarts or by conditional expectations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .derand import DerandConfig, HalfSpaceSystem, HalfSpaceTerm, derandomize
from .graph import Multigraph
from .sdp import Embedding, solve_maxcut_sdp

__all__ = [
    "ThreeColouring",
    "GaussianTriple",
    "ThreeColourResult",
    "cheng_orthant",
    "p_alpha",
    "f_margin",
    "sample_gaussian_triple",
    "round_three",
    "edge_event_halfspaces",
    "edge_system",
    "solve_k2_k3",
]

MODES = ("restarts", "derand")


@dataclass(frozen=True)
class ThreeColouring:
    """Colour in ``{1, 2, 3}`` for every vertex."""

    colour: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "colour", tuple(int(c) for c in self.colour))
        if any(c not in (1, 2, 3) for c in self.colour):
            raise ValueError("colours must be 1, 2 or 3")

    def satisfied_weight(self, g: Multigraph) -> int:
        c = self.colour
        if len(c) != g.n:
            raise ValueError("colouring does not cover the graph")
        return sum(w for u, v, w in g.edges if c[u] != c[v])


@dataclass(frozen=True)
class GaussianTriple:
    """Three vectors stacked as rows of a ``(3, k)`` array."""

    vectors: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.vectors, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != 3:
            raise ValueError("a Gaussian triple is a (3, k) array")
        a.setflags(write=False)
        object.__setattr__(self, "vectors", a)

    @property
    def rank(self) -> int:
        return self.vectors.shape[1]

    @classmethod
    def from_flat(cls, a) -> "GaussianTriple":
        a = np.asarray(a, dtype=np.float64)
        return cls(a.reshape(3, -1))


@dataclass(frozen=True)
class ThreeColourResult:
    colouring: ThreeColouring
    satisfied_weight: int
    sdp_bound: float
    target: int
    certified: bool
    samples: int
    mode: str

    def to_dict(self) -> dict:
        return {
            "colours": list(self.colouring.colour),
            "satisfied_weight": self.satisfied_weight,
            "sdp_bound": self.sdp_bound,
            "target": self.target,
            "certified": self.certified,
            "samples": self.samples,
            "mode": self.mode,
        }


def _clip(a):
    return np.clip(np.asarray(a, dtype=np.float64), -1.0, 1.0)


def cheng_orthant(a, b):
    """``Pr[u >= 0]`` for the zero-mean quadrivariate normal with correlations ``a``, ``b``.

    The correlation matrix is ``[[1, a, b, ab], [a, 1, ab, b], [b, ab, 1, a],
    [ab, b, a, 1]]``.
    """
    a, b = _clip(a), _clip(b)
    sa, sb, sab = np.arcsin(a), np.arcsin(b), np.arcsin(a * b)
    val = (
        1 / 16
        + (sa + sb + sab) / (4 * math.pi)
        + (sa**2 + sb**2 - sab**2) / (4 * math.pi**2)
    )
    return float(val) if np.ndim(val) == 0 else val


def p_alpha(alpha):
    """Probability that two unit vectors at inner product ``alpha`` both pick colour 1."""
    al = _clip(alpha)
    s1, s2 = np.arcsin(al), np.arcsin(al / 2)
    val = 1 / 9 + (s1 + s2) / (4 * math.pi) + (s1**2 - s2**2) / (4 * math.pi**2)
    return float(val) if np.ndim(val) == 0 else val


def f_margin(alpha):
    """``1 - 3 P(alpha) - (1 - alpha) / 2``: bichromatic probability minus the cut share."""
    al = _clip(alpha)
    val = 1 - 3 * np.asarray(p_alpha(al)) - (1 - al) / 2
    return float(val) if np.ndim(val) == 0 else val


def sample_gaussian_triple(rank: int, seed=None) -> GaussianTriple:
    if rank < 1:
        raise ValueError("rank must be at least 1")
    return GaussianTriple(np.random.default_rng(seed).standard_normal((3, rank)))


def round_three(emb: Embedding, gt: GaussianTriple) -> ThreeColouring:
    """Colour ``1 + argmax_i x_u . a_i``; ties go to the smallest index."""
    if emb.rank != gt.rank:
        raise ValueError("triple and embedding ranks differ")
    scores = emb.vectors @ gt.vectors.T
    return ThreeColouring(tuple(np.argmax(scores, axis=1) + 1))


def _padded(x: np.ndarray, block: int) -> np.ndarray:
    k = len(x)
    out = np.zeros(3 * k)
    out[block * k : (block + 1) * k] = x
    return out


def edge_event_halfspaces(
    emb: Embedding, edge: tuple[int, int], c: int, c2: int, weight: float = 1.0
) -> HalfSpaceTerm:
    """``u`` strictly prefers colour ``c`` and ``v`` strictly prefers ``c2``.

    Four strict constraints on the stacked vector ``(a_1, a_2, a_3)`` of
    dimension ``3k``.
    """
    if c not in (1, 2, 3) or c2 not in (1, 2, 3) or c == c2:
        raise ValueError("colours must be distinct members of {1, 2, 3}")
    u, v = edge
    V = emb.vectors
    rows = []
    for vert, col in ((u, c), (v, c2)):
        own = _padded(V[vert], col - 1)
        for other in (1, 2, 3):
            if other != col:
                rows.append(own - _padded(V[vert], other - 1))
    return HalfSpaceTerm(weight, np.array(rows), np.zeros(4))


def edge_system(g: Multigraph, emb: Embedding) -> HalfSpaceSystem:
    """Six terms per edge, one per ordered pair of distinct colours."""
    terms = []
    for u, v, w in g.edges:
        for c in (1, 2, 3):
            for c2 in (1, 2, 3):
                if c != c2:
                    terms.append(edge_event_halfspaces(emb, (u, v), c, c2, float(w)))
    return HalfSpaceSystem(tuple(terms), 3 * emb.rank)


def _batch_weights(g: Multigraph, emb: Embedding, A: np.ndarray):
    """Bichromatic weights and colourings for a batch of triples ``A`` of shape ``(b, 3, k)``."""
    scores = np.einsum("nk,bck->bnc", emb.vectors, A)
    col = np.argmax(scores, axis=2)
    eu, ev, ew = g.arrays
    return (col[:, eu] != col[:, ev]).astype(np.int64) @ ew, col


def solve_k2_k3(
    g: Multigraph,
    mode: str = "restarts",
    budget: int | None = None,
    seed: int = 0,
    *,
    eps: float = 1e-4,
    derand_cfg: DerandConfig | None = None,
    emb: Embedding | None = None,
) -> ThreeColourResult:
    """3-colouring whose bichromatic weight reaches ``floor(SDP)``, hence every cut.

    ``restarts`` samples up to ``budget`` triples (default ``200 W``) and stops
    at the first one reaching the target; ``derand`` fixes the triple by
    conditional expectations. ``certified`` is false when the target was not
    reached, in which case the best colouring seen is returned.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if g.m == 0:
        raise ValueError("graph has no edges")
    W = g.total_weight
    if emb is None:
        emb, report = solve_maxcut_sdp(g, eps, seed)
        bound = report.objective
    else:
        from .sdp import sdp_objective

        bound = sdp_objective(g, emb)
    # the computed objective is within eps of the relaxation, which bounds every cut
    target = min(W, math.floor(bound + eps + 1e-9))

    if mode == "derand":
        cfg = derand_cfg or DerandConfig()
        a, _ = derandomize(edge_system(g, emb), cfg.grid_n, cfg.atom_budget)
        colouring = round_three(emb, GaussianTriple.from_flat(a))
        got = colouring.satisfied_weight(g)
        return ThreeColourResult(colouring, got, bound, target, got >= target, 1, mode)

    budget = 200 * W if budget is None else budget
    if budget < 1:
        raise ValueError("budget must be positive")
    rng = np.random.default_rng(np.random.SeedSequence([seed & (2**64 - 1), 1]))
    best_w, best_col, used = -1, None, 0
    while used < budget:
        b = min(256, budget - used)
        A = rng.standard_normal((b, 3, emb.rank))
        weights, cols = _batch_weights(g, emb, A)
        hit = np.flatnonzero(weights >= target)
        if len(hit):
            i = int(hit[0])
            used += i + 1
            best_w, best_col = int(weights[i]), cols[i]
            break
        i = int(np.argmax(weights))
        used += b
        if weights[i] > best_w:
            best_w, best_col = int(weights[i]), cols[i]
    colouring = ThreeColouring(tuple(best_col + 1))
    return ThreeColourResult(colouring, best_w, bound, target, best_w >= target, used, mode)
