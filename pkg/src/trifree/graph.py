"""Multigraph model, edge-list file format and elementary predicates.

Parallel edges are stored as one support pair with an integer multiplicity.
Edge selections are bitsets over the support, so choosing a pair always
takes all of its parallel copies.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "GraphParseError",
    "HeaderError",
    "VertexRangeError",
    "MultiplicityError",
    "LoopError",
    "Multigraph",
    "EdgeSelection",
    "CutAssignment",
    "Bipartition",
    "parse_graph",
    "serialise_graph",
    "read_graph",
    "cut_weight",
    "cut_selection",
    "selection_weight",
    "is_triangle_free",
    "bipartition",
    "distances_from",
]


class GraphParseError(ValueError):
    """Malformed graph file; ``line`` is 1-based (0 when not line specific)."""

    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class HeaderError(GraphParseError):
    pass


class VertexRangeError(GraphParseError):
    pass


class MultiplicityError(GraphParseError):
    pass


class LoopError(GraphParseError):
    pass


@dataclass(frozen=True)
class Multigraph:
    """Undirected loopless multigraph on vertices ``0..n-1``.

    ``edges`` holds ``(u, v, mult)`` with ``u < v`` in lexicographic order,
    one entry per support pair. Build through :meth:`from_edges` to get
    validation and aggregation of repeated pairs.
    """

    n: int
    edges: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        prev = None
        for u, v, mult in self.edges:
            if not (0 <= u < v < self.n):
                raise ValueError(f"edge ({u}, {v}) is not canonical for n={self.n}")
            if mult <= 0:
                raise ValueError(f"edge ({u}, {v}) has non-positive multiplicity {mult}")
            if prev is not None and (u, v) <= prev:
                raise ValueError("edges must be strictly increasing in (u, v)")
            prev = (u, v)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Multigraph":
        """Aggregate ``(u, v)`` or ``(u, v, mult)`` items into canonical form."""
        agg: dict[tuple[int, int], int] = {}
        for e in edges:
            u, v = int(e[0]), int(e[1])
            mult = int(e[2]) if len(e) > 2 else 1
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if mult <= 0:
                raise ValueError(f"non-positive multiplicity {mult}")
            key = (u, v) if u < v else (v, u)
            agg[key] = agg.get(key, 0) + mult
        return cls(n, tuple((u, v, w) for (u, v), w in sorted(agg.items())))

    @property
    def m(self) -> int:
        """Number of support pairs."""
        return len(self.edges)

    @cached_property
    def total_weight(self) -> int:
        return sum(w for _, _, w in self.edges)

    @cached_property
    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(eu, ev, ew)`` as int64 arrays in canonical order."""
        if not self.edges:
            z = np.zeros(0, dtype=np.int64)
            return z, z.copy(), z.copy()
        a = np.array(self.edges, dtype=np.int64)
        return a[:, 0].copy(), a[:, 1].copy(), a[:, 2].copy()

    @cached_property
    def index(self) -> dict[tuple[int, int], int]:
        return {(u, v): i for i, (u, v, _) in enumerate(self.edges)}

    def edge_index(self, u: int, v: int) -> int:
        return self.index[(u, v) if u < v else (v, u)]

    def multiplicity(self, u: int, v: int) -> int:
        i = self.index.get((u, v) if u < v else (v, u))
        return 0 if i is None else self.edges[i][2]

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Symmetric adjacency ``(indptr, indices, weights)`` with float weights."""
        eu, ev, ew = self.arrays
        rows = np.concatenate([eu, ev])
        cols = np.concatenate([ev, eu])
        wts = np.concatenate([ew, ew]).astype(np.float64)
        order = np.lexsort((cols, rows))
        rows, cols, wts = rows[order], cols[order], wts[order]
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.add.at(indptr, rows + 1, 1)
        np.cumsum(indptr, out=indptr)
        return indptr, cols.astype(np.int64), wts

    @cached_property
    def triangles(self) -> tuple[tuple[int, int, int], ...]:
        """Support-edge index triples ``(i, j, k)``, ``i < j < k``, forming triangles."""
        adj: list[dict[int, int]] = [dict() for _ in range(self.n)]
        for i, (u, v, _) in enumerate(self.edges):
            adj[u][v] = i
            adj[v][u] = i
        out = set()
        for i, (u, v, _) in enumerate(self.edges):
            small, big = (adj[u], adj[v]) if len(adj[u]) <= len(adj[v]) else (adj[v], adj[u])
            for w, j in small.items():
                k = big.get(w)
                if k is not None:
                    out.add(tuple(sorted((i, j, k))))
        return tuple(sorted(out))

    def subgraph(self, sel: "EdgeSelection") -> "Multigraph":
        return Multigraph(self.n, tuple(e for i, e in enumerate(self.edges) if sel.mask >> i & 1))


@dataclass(frozen=True)
class EdgeSelection:
    """Bitset over the support pairs of a graph (bit ``i`` = ``g.edges[i]``)."""

    m: int
    mask: int = 0

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.m:
            raise ValueError("selection mask has bits outside the support")

    @classmethod
    def empty(cls, g: Multigraph) -> "EdgeSelection":
        return cls(g.m, 0)

    @classmethod
    def full(cls, g: Multigraph) -> "EdgeSelection":
        return cls(g.m, (1 << g.m) - 1)

    @classmethod
    def from_indices(cls, g: Multigraph, indices: Iterable[int]) -> "EdgeSelection":
        mask = 0
        for i in indices:
            mask |= 1 << int(i)
        return cls(g.m, mask)

    @classmethod
    def from_pairs(cls, g: Multigraph, pairs: Iterable[Sequence[int]]) -> "EdgeSelection":
        return cls.from_indices(g, (g.edge_index(p[0], p[1]) for p in pairs))

    @classmethod
    def from_bool(cls, g: Multigraph, flags: Sequence[bool]) -> "EdgeSelection":
        return cls.from_indices(g, (i for i, f in enumerate(flags) if f))

    def indices(self) -> list[int]:
        return [i for i in range(self.m) if self.mask >> i & 1]

    def __contains__(self, i: int) -> bool:
        return bool(self.mask >> i & 1)

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __or__(self, other: "EdgeSelection") -> "EdgeSelection":
        return EdgeSelection(self.m, self.mask | other.mask)

    def __and__(self, other: "EdgeSelection") -> "EdgeSelection":
        return EdgeSelection(self.m, self.mask & other.mask)

    def issubset(self, other: "EdgeSelection") -> bool:
        return self.mask & ~other.mask == 0

    def pairs(self, g: Multigraph) -> list[tuple[int, int, int]]:
        return [g.edges[i] for i in self.indices()]


@dataclass(frozen=True)
class CutAssignment:
    """Side ``0`` or ``1`` for every vertex."""

    side: tuple[int, ...]

    def __post_init__(self):
        if any(s not in (0, 1) for s in self.side):
            raise ValueError("cut sides must be 0 or 1")

    @classmethod
    def from_mask(cls, n: int, mask: int) -> "CutAssignment":
        return cls(tuple(mask >> v & 1 for v in range(n)))

    @classmethod
    def from_sets(cls, n: int, one_side: Iterable[int]) -> "CutAssignment":
        s = set(one_side)
        return cls(tuple(int(v in s) for v in range(n)))


@dataclass(frozen=True)
class Bipartition:
    """2-colouring of a selected subgraph, or an odd cycle proving there is none.

    ``component[v]`` labels connected components of the selected subgraph
    (isolated vertices form their own component). ``sides`` is a proper
    colouring with every component's smallest vertex on side 0.
    """

    component: tuple[int, ...]
    sides: CutAssignment | None
    odd_cycle: tuple[int, ...] | None = field(default=None)

    @property
    def is_bipartite(self) -> bool:
        return self.sides is not None


def _lines(text: str | bytes) -> Iterable[tuple[int, list[str]]]:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line.split()


def _int(tok: str, lineno: int, exc: type[GraphParseError]) -> int:
    try:
        return int(tok)
    except ValueError:
        raise exc(f"expected an integer, got {tok!r}", lineno) from None


def parse_graph(text: str | bytes) -> Multigraph:
    """Parse the ``p <n> <m>`` / ``e <u> <v> <mult>`` edge-list format.

    Repeated pairs are aggregated. ``m`` must equal the number of ``e`` lines.
    """
    n = None
    declared = 0
    header_line = 0
    count = 0
    agg: dict[tuple[int, int], int] = {}
    for lineno, tok in _lines(text):
        if tok[0] == "p":
            if n is not None:
                raise HeaderError("duplicate header", lineno)
            if len(tok) != 3:
                raise HeaderError("header must be 'p <n> <m>'", lineno)
            n = _int(tok[1], lineno, HeaderError)
            declared = _int(tok[2], lineno, HeaderError)
            if n < 0 or declared < 0:
                raise HeaderError("negative count in header", lineno)
            header_line = lineno
        elif tok[0] == "e":
            if n is None:
                raise HeaderError("edge line before header", lineno)
            if len(tok) != 4:
                raise GraphParseError("edge line must be 'e <u> <v> <mult>'", lineno)
            u = _int(tok[1], lineno, VertexRangeError)
            v = _int(tok[2], lineno, VertexRangeError)
            mult = _int(tok[3], lineno, MultiplicityError)
            if not (0 <= u < n and 0 <= v < n):
                raise VertexRangeError(f"vertex id out of range [0, {n})", lineno)
            if u == v:
                raise LoopError(f"loop at vertex {u}", lineno)
            if mult <= 0:
                raise MultiplicityError(f"multiplicity must be positive, got {mult}", lineno)
            key = (u, v) if u < v else (v, u)
            agg[key] = agg.get(key, 0) + mult
            count += 1
        else:
            raise GraphParseError(f"unknown line type {tok[0]!r}", lineno)
    if n is None:
        raise HeaderError("missing 'p <n> <m>' header")
    if count != declared:
        raise HeaderError(f"header declares {declared} edge lines, found {count}", header_line)
    return Multigraph(n, tuple((u, v, w) for (u, v), w in sorted(agg.items())))


def serialise_graph(g: Multigraph) -> str:
    lines = [f"p {g.n} {g.m}"]
    lines += [f"e {u} {v} {w}" for u, v, w in g.edges]
    return "\n".join(lines) + "\n"


def read_graph(path) -> Multigraph:
    with open(path, "rb") as fh:
        return parse_graph(fh.read())


def cut_selection(g: Multigraph, c: CutAssignment) -> EdgeSelection:
    """Support pairs whose endpoints lie on opposite sides."""
    side = c.side
    return EdgeSelection.from_indices(
        g, (i for i, (u, v, _) in enumerate(g.edges) if side[u] != side[v])
    )


def cut_weight(g: Multigraph, c: CutAssignment) -> int:
    side = c.side
    return sum(w for u, v, w in g.edges if side[u] != side[v])


def selection_weight(g: Multigraph, s: EdgeSelection) -> int:
    mask = s.mask
    return sum(w for i, (_, _, w) in enumerate(g.edges) if mask >> i & 1)


def _adjacency(g: Multigraph, s: EdgeSelection) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(g.n)]
    mask = s.mask
    for i, (u, v, _) in enumerate(g.edges):
        if mask >> i & 1:
            adj[u].append(v)
            adj[v].append(u)
    return adj


def is_triangle_free(g: Multigraph, s: EdgeSelection) -> bool:
    mask = s.mask
    return not any(
        mask >> i & 1 and mask >> j & 1 and mask >> k & 1 for i, j, k in g.triangles
    )


def bipartition(g: Multigraph, s: EdgeSelection) -> Bipartition:
    """BFS 2-colouring of the selected subgraph, with an odd-cycle witness on failure."""
    adj = _adjacency(g, s)
    comp = [-1] * g.n
    side = [0] * g.n
    parent = [-1] * g.n
    depth = [0] * g.n
    odd = None
    for root in range(g.n):
        if comp[root] >= 0:
            continue
        comp[root] = root
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if comp[v] < 0:
                    comp[v] = root
                    side[v] = 1 - side[u]
                    parent[v] = u
                    depth[v] = depth[u] + 1
                    queue.append(v)
                elif side[v] == side[u] and odd is None:
                    odd = _odd_cycle(u, v, parent, depth)
    if odd is not None:
        return Bipartition(tuple(comp), None, odd)
    return Bipartition(tuple(comp), CutAssignment(tuple(side)))


def _odd_cycle(u: int, v: int, parent: list[int], depth: list[int]) -> tuple[int, ...]:
    # u, v adjacent with equal BFS parity: tree paths to their common ancestor close an odd cycle
    left, right = [u], [v]
    a, b = u, v
    while depth[a] > depth[b]:
        a = parent[a]
        left.append(a)
    while depth[b] > depth[a]:
        b = parent[b]
        right.append(b)
    while a != b:
        a, b = parent[a], parent[b]
        left.append(a)
        right.append(b)
    return tuple(left + right[-2::-1])


def distances_from(g: Multigraph, s: EdgeSelection, source: int) -> list[int | None]:
    """BFS hop distances in the selected subgraph; ``None`` marks unreachable vertices."""
    if not 0 <= source < g.n:
        raise ValueError(f"source {source} out of range")
    adj = _adjacency(g, s)
    dist: list[int | None] = [None] * g.n
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if dist[v] is None:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist
