"""Hyperplane rounding and the hybrid triangle-free rounding.

Angles between endpoint vectors split edges into three bands for a tuple
``(alpha, tau, P, Q)``: long (``>= tau``), middle (``>= pi - tau/2``) and
short. With probability ``P`` a plain hyperplane cut is returned; otherwise
every long edge is kept, together with the middle edges the hyperplane
separates. Any three such edges have angles summing to at least ``2 pi``, so
they never close a triangle of unit vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .derand import DerandConfig, HalfSpaceSystem, HalfSpaceTerm, derandomize
from .graph import EdgeSelection, Multigraph, is_triangle_free, selection_weight
from .params import RoundingParams
from .sdp import Embedding, edge_angles

__all__ = [
    "CASE_GW",
    "CASE_LONG",
    "CASE_DERAND",
    "TriangleFreeViolation",
    "Hyperplane",
    "RoundingOutcome",
    "sample_hyperplane",
    "round_gw",
    "round_hybrid_case_b",
    "round_hybrid",
    "inclusion_probability",
    "expected_weight",
    "band_masks",
    "gw_system",
    "derandomised_round",
    "simulate_inclusion",
]

CASE_GW = "gw-cut"
CASE_LONG = "long-edge"
CASE_DERAND = "derandomised"


class TriangleFreeViolation(AssertionError):
    """A rounding branch produced a selection containing a triangle."""


@dataclass(frozen=True)
class Hyperplane:
    normal: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.normal, dtype=np.float64).reshape(-1)
        if len(h) == 0 or not np.any(h):
            raise ValueError("hyperplane normal must be nonzero")
        h.setflags(write=False)
        object.__setattr__(self, "normal", h)

    def sides(self, emb: Embedding) -> np.ndarray:
        """``True`` for vertices on the non-negative side (ties go positive)."""
        if emb.rank != len(self.normal):
            raise ValueError("hyperplane and embedding ranks differ")
        return emb.vectors @ self.normal >= 0.0


@dataclass(frozen=True)
class RoundingOutcome:
    graph: Multigraph = field(repr=False)
    selection: EdgeSelection
    case_used: str
    weight: int = field(init=False)

    def __post_init__(self):
        if not is_triangle_free(self.graph, self.selection):
            raise TriangleFreeViolation(f"{self.case_used} branch returned a triangle")
        object.__setattr__(self, "weight", selection_weight(self.graph, self.selection))

    def to_dict(self) -> dict:
        return {
            "weight": self.weight,
            "case": self.case_used,
            "selection": [list(e) for e in self.selection.pairs(self.graph)],
        }


def _check(g: Multigraph, emb: Embedding) -> None:
    if emb.n != g.n:
        raise ValueError(f"embedding has {emb.n} rows, graph has {g.n} vertices")


def sample_hyperplane(rank: int, seed=None) -> Hyperplane:
    """Normal with i.i.d. standard Gaussian coordinates."""
    if rank < 1:
        raise ValueError("rank must be at least 1")
    rng = np.random.default_rng(seed)
    while True:
        h = rng.standard_normal(rank)
        if np.any(h):
            return Hyperplane(h)


def _separated(g: Multigraph, emb: Embedding, h: Hyperplane) -> np.ndarray:
    side = h.sides(emb)
    eu, ev, _ = g.arrays
    return side[eu] != side[ev]


def round_gw(g: Multigraph, emb: Embedding, h: Hyperplane) -> RoundingOutcome:
    """Edges whose endpoints fall on opposite sides of ``h``."""
    _check(g, emb)
    return RoundingOutcome(g, EdgeSelection.from_bool(g, _separated(g, emb, h)), CASE_GW)


def band_masks(g: Multigraph, emb: Embedding, params: RoundingParams) -> tuple[np.ndarray, np.ndarray]:
    """Boolean masks ``(long, middle)`` over the support edges."""
    _check(g, emb)
    ang = edge_angles(g, emb)
    long_ = ang >= params.tau
    middle = (ang >= params.middle_threshold) & ~long_
    return long_, middle


def round_hybrid_case_b(
    g: Multigraph, emb: Embedding, params: RoundingParams, h: Hyperplane
) -> RoundingOutcome:
    """All long edges plus the middle-band edges separated by ``h``."""
    long_, middle = band_masks(g, emb, params)
    keep = long_ | (middle & _separated(g, emb, h))
    return RoundingOutcome(g, EdgeSelection.from_bool(g, keep), CASE_LONG)


def round_hybrid(g: Multigraph, emb: Embedding, params: RoundingParams, seed=None) -> RoundingOutcome:
    """Coin with bias ``p_case1`` picks the cut branch, else the long-edge branch."""
    _check(g, emb)
    rng = np.random.default_rng(seed)
    use_cut = rng.random() < params.p_case1
    h = sample_hyperplane(emb.rank, rng)
    if use_cut:
        return round_gw(g, emb, h)
    return round_hybrid_case_b(g, emb, params, h)


def inclusion_probability(angle, params: RoundingParams):
    """Probability that :func:`round_hybrid` keeps an edge at the given angle."""
    th = np.asarray(angle, dtype=np.float64)
    if np.any((th < 0) | (th > math.pi)):
        raise ValueError("angle must lie in [0, pi]")
    base = th / math.pi
    out = np.where(
        th >= params.tau,
        params.p_case1 * base + params.q_case2,
        np.where(th >= params.middle_threshold, base, params.p_case1 * base),
    )
    return float(out) if out.ndim == 0 else out


def expected_weight(g: Multigraph, emb: Embedding, params: RoundingParams) -> float:
    _check(g, emb)
    if g.m == 0:
        return 0.0
    _, _, ew = g.arrays
    return float(ew @ inclusion_probability(edge_angles(g, emb), params))


def gw_system(g: Multigraph, emb: Embedding, edges=None) -> HalfSpaceSystem:
    """Two terms per edge: ``x_u . a > 0 > x_v . a`` and the mirror image.

    Strictness means an endpoint exactly on the hyperplane counts as not
    separated here, a measure-zero difference from :meth:`Hyperplane.sides`.
    """
    _check(g, emb)
    V = emb.vectors
    idx = range(g.m) if edges is None else edges
    terms = []
    for i in idx:
        u, v, w = g.edges[i]
        terms.append(HalfSpaceTerm(float(w), np.stack([V[u], -V[v]]), np.zeros(2)))
        terms.append(HalfSpaceTerm(float(w), np.stack([-V[u], V[v]]), np.zeros(2)))
    return HalfSpaceSystem(tuple(terms), emb.rank)


def _derand_hyperplane(system: HalfSpaceSystem, cfg: DerandConfig) -> Hyperplane:
    a, _ = derandomize(system, cfg.grid_n, cfg.atom_budget)
    if not np.any(a):
        # only when every coordinate's estimate was flat; any direction is as good
        a[0] = 1.0
    return Hyperplane(a)


def derandomised_round(
    g: Multigraph,
    emb: Embedding,
    params: RoundingParams,
    derand_cfg: DerandConfig | None = None,
) -> RoundingOutcome:
    """Deterministic hybrid rounding: derandomise each branch, keep the heavier.

    Ties keep the cut branch.
    """
    _check(g, emb)
    cfg = derand_cfg or DerandConfig()
    if g.m == 0:
        return RoundingOutcome(g, EdgeSelection.empty(g), CASE_DERAND)
    h_cut = _derand_hyperplane(gw_system(g, emb), cfg)
    cut = round_gw(g, emb, h_cut).selection
    long_, middle = band_masks(g, emb, params)
    mid_idx = np.flatnonzero(middle)
    if len(mid_idx):
        h_mid = _derand_hyperplane(gw_system(g, emb, mid_idx), cfg)
        sep = _separated(g, emb, h_mid)
    else:
        sep = np.zeros(g.m, dtype=bool)
    other = EdgeSelection.from_bool(g, long_ | (middle & sep))
    best = cut if selection_weight(g, cut) >= selection_weight(g, other) else other
    return RoundingOutcome(g, best, CASE_DERAND)


def simulate_inclusion(
    g: Multigraph,
    emb: Embedding,
    params: RoundingParams,
    trials: int,
    seed=None,
) -> np.ndarray:
    """Empirical keep frequency of every support edge over ``trials`` runs of the hybrid scheme."""
    _check(g, emb)
    rng = np.random.default_rng(seed)
    long_, middle = band_masks(g, emb, params)
    eu, ev, _ = g.arrays
    counts = np.zeros(g.m)
    chunk = 4096
    done = 0
    while done < trials:
        b = min(chunk, trials - done)
        H = rng.standard_normal((b, emb.rank))
        side = emb.vectors @ H.T >= 0.0
        sep = side[eu] != side[ev]
        use_cut = rng.random(b) < params.p_case1
        keep = np.where(use_cut[None, :], sep, long_[:, None] | (middle[:, None] & sep))
        counts += keep.sum(axis=1)
        done += b
    return counts / trials
