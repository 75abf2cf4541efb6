"""Independent reference implementations used as test oracles.

Nothing here calls the package's kernels: cuts, triangle-free selections and
colourings are enumerated with itertools so the package's enumeration code
is checked against a second route.
"""

import math
from itertools import combinations, product

import numpy as np
from hypothesis import strategies as st

from trifree.graph import Multigraph
from trifree.sdp import Embedding


def random_multigraph(rng, n_lo=2, n_hi=7, p=0.6, max_mult=3, require_edge=True):
    while True:
        n = int(rng.integers(n_lo, n_hi + 1))
        edges = [
            (u, v, int(rng.integers(1, max_mult + 1)))
            for u in range(n)
            for v in range(u + 1, n)
            if rng.random() < p
        ]
        if edges or not require_edge:
            return Multigraph.from_edges(n, edges)


def random_bipartite(rng, n_lo=2, n_hi=8, p=0.6, max_mult=3):
    while True:
        n = int(rng.integers(n_lo, n_hi + 1))
        side = rng.integers(0, 2, n)
        edges = [
            (u, v, int(rng.integers(1, max_mult + 1)))
            for u in range(n)
            for v in range(u + 1, n)
            if side[u] != side[v] and rng.random() < p
        ]
        if edges:
            return Multigraph.from_edges(n, edges)


@st.composite
def multigraphs(draw, max_n=7, max_mult=3, min_edges=0):
    n = draw(st.integers(2, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    mults = draw(st.lists(st.integers(0, max_mult), min_size=len(pairs), max_size=len(pairs)))
    edges = [(u, v, w) for (u, v), w in zip(pairs, mults) if w]
    if len(edges) < min_edges:
        u, v = pairs[0]
        edges = [(u, v, 1)] + [e for e in edges if (e[0], e[1]) != (u, v)]
    return Multigraph.from_edges(n, edges)


def naive_max_cut(g):
    best = 0
    for side in product((0, 1), repeat=g.n):
        best = max(best, sum(w for u, v, w in g.edges if side[u] != side[v]))
    return best


def naive_has_triangle(edge_list):
    adj = {}
    for u, v in edge_list:
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    return any(adj[u] & adj[v] for u, v in edge_list)


def naive_triangle_free_weights(g):
    """Weight of every triangle-free selection, keyed by mask."""
    out = {}
    for mask in range(1 << g.m):
        chosen = [g.edges[i] for i in range(g.m) if mask >> i & 1]
        if not naive_has_triangle([(u, v) for u, v, _ in chosen]):
            out[mask] = sum(w for _, _, w in chosen)
    return out


def naive_best_3colouring(g):
    best = 0
    for col in product(range(3), repeat=g.n):
        best = max(best, sum(w for u, v, w in g.edges if col[u] != col[v]))
    return best


def triangle_embedding():
    """Three unit vectors at mutual 120 degrees."""
    ang = np.array([0.0, 2 * math.pi / 3, 4 * math.pi / 3])
    return Embedding(np.stack([np.cos(ang), np.sin(ang)], axis=1))


def antipodal_embedding(n=2):
    v = np.zeros((n, 2))
    v[::2, 0] = 1.0
    v[1::2, 0] = -1.0
    return Embedding(v)


def random_embedding(rng, n, k):
    return Embedding.normalised(rng.standard_normal((n, k)))


def mc_system(system, samples, rng):
    """Monte-Carlo mean and standard error of a half-space system's weighted count."""
    A = rng.standard_normal((samples, system.dimension))
    total = np.zeros(samples)
    for t in system.terms:
        total += t.weight * np.all(A @ t.normals.T > t.thresholds, axis=1)
    return float(total.mean()), float(total.std(ddof=1) / math.sqrt(samples))
