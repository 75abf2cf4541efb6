"""Gadget reduction from balanced MAX-E3LIN to max triangle-free subgraph.

Each equation ``x + y + z = p (mod 2)`` becomes a copy of a weighted gadget
whose terminals ``0, x, y, z`` are glued to a shared zero vertex and to the
variable vertices. In any near-optimal triangle-free subgraph of a gadget
the terminals sit in one bipartite component and their sides satisfy the
parity equation, so variable values are read off as distance parities from
the zero vertex.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

from . import _kernels
from .graph import (
    CutAssignment,
    EdgeSelection,
    Multigraph,
    bipartition,
    distances_from,
    is_triangle_free,
)

__all__ = [
    "E3LinParseError",
    "E3LinSystem",
    "parse_e3lin",
    "serialise_e3lin",
    "make_balanced",
    "Gadget",
    "gadget9",
    "gadget17",
    "weighted_complete_gadget",
    "triangle_free_selections",
    "VerificationReport",
    "verify_gadget",
    "bins_lower_bound",
    "Block",
    "ReducedInstance",
    "reduce_to_maxpcsp",
    "decode_solution",
    "assignment_cut",
    "hardness_ratio",
]

GADGET_SUPPORT_CAP = 16


class E3LinParseError(ValueError):
    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass(frozen=True)
class E3LinSystem:
    """Equations ``(x, y, z, p)`` meaning ``v_x + v_y + v_z = p (mod 2)``."""

    num_vars: int
    equations: tuple[tuple[int, int, int, int], ...] = ()

    def __post_init__(self):
        eqs = tuple(tuple(int(t) for t in e) for e in self.equations)
        if self.num_vars < 0:
            raise ValueError("variable count must be non-negative")
        for e in eqs:
            if len(e) != 4:
                raise ValueError("an equation is (x, y, z, parity)")
            if any(not 0 <= v < self.num_vars for v in e[:3]):
                raise ValueError(f"variable out of range in {e}")
            if e[3] not in (0, 1):
                raise ValueError("parity must be 0 or 1")
        object.__setattr__(self, "equations", eqs)

    @property
    def parity_counts(self) -> tuple[int, int]:
        ones = sum(e[3] for e in self.equations)
        return len(self.equations) - ones, ones

    @property
    def is_balanced(self) -> bool:
        c0, c1 = self.parity_counts
        return c0 == c1

    def satisfied(self, assignment: Sequence[int]) -> list[bool]:
        a = assignment
        return [(a[x] + a[y] + a[z]) % 2 == p for x, y, z, p in self.equations]

    def value(self, assignment: Sequence[int]) -> int:
        return sum(self.satisfied(assignment))

    def is_balanced_solution(self, assignment: Sequence[int]) -> bool:
        """Satisfies as many parity-0 equations as parity-1 equations."""
        sat = self.satisfied(assignment)
        s0 = sum(ok for ok, e in zip(sat, self.equations) if e[3] == 0)
        s1 = sum(ok for ok, e in zip(sat, self.equations) if e[3] == 1)
        return s0 == s1


def parse_e3lin(text: str) -> E3LinSystem:
    """Read ``l <num_vars> <num_eqs>`` then ``q <x> <y> <z> <p>`` lines; ``#`` starts a comment."""
    header = None
    eqs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        try:
            nums = [int(t) for t in toks[1:]]
        except ValueError:
            raise E3LinParseError(f"non-integer field in {raw.strip()!r}", lineno) from None
        if toks[0] == "l":
            if header is not None:
                raise E3LinParseError("duplicate header", lineno)
            if len(nums) != 2 or min(nums) < 0:
                raise E3LinParseError("header must be 'l <num_vars> <num_eqs>'", lineno)
            header = (nums[0], nums[1], lineno)
        elif toks[0] == "q":
            if header is None:
                raise E3LinParseError("equation before header", lineno)
            if len(nums) != 4:
                raise E3LinParseError("equation must be 'q <x> <y> <z> <p>'", lineno)
            if any(not 0 <= v < header[0] for v in nums[:3]):
                raise E3LinParseError("variable out of range", lineno)
            if nums[3] not in (0, 1):
                raise E3LinParseError("parity must be 0 or 1", lineno)
            eqs.append(tuple(nums))
        else:
            raise E3LinParseError(f"unknown record {toks[0]!r}", lineno)
    if header is None:
        raise E3LinParseError("missing header")
    if len(eqs) != header[1]:
        raise E3LinParseError(f"header declares {header[1]} equations, found {len(eqs)}", header[2])
    return E3LinSystem(header[0], tuple(eqs))


def serialise_e3lin(sys: E3LinSystem) -> str:
    lines = [f"l {sys.num_vars} {len(sys.equations)}"]
    lines += [f"q {x} {y} {z} {p}" for x, y, z, p in sys.equations]
    return "\n".join(lines) + "\n"


def make_balanced(sys: E3LinSystem) -> E3LinSystem:
    """Disjoint union with a primed copy whose parities are flipped.

    Variable ``i`` gets the primed copy ``i + num_vars``.
    """
    n = sys.num_vars
    primed = tuple((x + n, y + n, z + n, 1 - p) for x, y, z, p in sys.equations)
    return E3LinSystem(2 * n, sys.equations + primed)


@dataclass(frozen=True)
class Gadget:
    """Weighted graph with terminals ``(0, x, y, z)`` encoding one parity equation."""

    graph: Multigraph
    terminals: tuple[int, int, int, int]
    performance: int
    parity: int
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if len(set(self.terminals)) != 4:
            raise ValueError("terminals must be four distinct vertices")
        if any(not 0 <= t < self.graph.n for t in self.terminals):
            raise ValueError("terminal out of range")
        if self.performance < 1:
            raise ValueError("performance must be positive")
        if self.parity not in (0, 1):
            raise ValueError("parity must be 0 or 1")

    @property
    def internal(self) -> tuple[int, ...]:
        t = set(self.terminals)
        return tuple(v for v in range(self.graph.n) if v not in t)

    def to_dict(self) -> dict:
        return {
            "vertices": self.graph.n,
            "labels": list(self.labels),
            "terminals": list(self.terminals),
            "performance": self.performance,
            "parity": self.parity,
            "total_weight": self.graph.total_weight,
        }


def weighted_complete_gadget(
    vertex_weights: Sequence[int],
    bonus: dict[tuple[int, int], int] | None = None,
    *,
    terminals=(0, 1, 2, 3),
    performance: int,
    parity: int,
    labels: Sequence[str] = (),
) -> Gadget:
    """Complete graph with ``w(i, j) = w(i) w(j) + bonus(i, j)``."""
    bonus = bonus or {}
    n = len(vertex_weights)
    edges = []
    for i, j in combinations(range(n), 2):
        w = vertex_weights[i] * vertex_weights[j] + bonus.get((i, j), 0) + bonus.get((j, i), 0)
        if w:
            edges.append((i, j, w))
    return Gadget(Multigraph.from_edges(n, edges), tuple(terminals), performance, parity, tuple(labels))


def gadget9() -> Gadget:
    """``K5`` on ``0, x, y, z, a`` with ``w(a) = 2``; performance 9, parity 1."""
    return weighted_complete_gadget(
        [1, 1, 1, 1, 2], performance=9, parity=1, labels=("0", "x", "y", "z", "a")
    )


def gadget17() -> Gadget:
    """``K6`` on ``0, x, y, z, a, 1`` with ``w(a) = w(1) = 2`` and one extra unit on ``0-1``.

    Performance 17, parity 0; the vertex named ``1`` is internal.
    """
    return weighted_complete_gadget(
        [1, 1, 1, 1, 2, 2],
        {(0, 5): 1},
        performance=17,
        parity=0,
        labels=("0", "x", "y", "z", "a", "1"),
    )


def triangle_free_selections(g: Multigraph) -> list[EdgeSelection]:
    """Every triangle-free selection of the support."""
    if g.m > 63:
        raise ValueError("too many support edges to enumerate")
    ptr, a, b = _kernels.conflict_arrays(g.m, g.triangles)
    full = (1 << g.m) - 1
    return [EdgeSelection(g.m, s) for s in _kernels.triangle_free_masks(g.m, ptr, a, b, 0, full)]


def _compatible(g: Multigraph, sel: EdgeSelection, terminals, colours) -> bool:
    """Some proper 2-colouring of ``sel`` takes the given values on the terminals."""
    bp = bipartition(g, sel)
    if not bp.is_bipartite:
        return False
    comp, side = bp.component, bp.sides.side
    flip: dict[int, int] = {}
    for t, c in zip(terminals, colours):
        want = side[t] ^ c
        if flip.setdefault(comp[t], want) != want:
            return False
    return True


@dataclass(frozen=True)
class VerificationReport:
    performance: int
    parity: int
    selections: int
    max_triangle_free: int
    realisable: bool
    bounded: bool
    near_optima_encode_parity: bool
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return self.realisable and self.bounded and self.near_optima_encode_parity

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "performance": self.performance,
            "parity": self.parity,
            "selections": self.selections,
            "max_triangle_free": self.max_triangle_free,
            "realisable": self.realisable,
            "bounded": self.bounded,
            "near_optima_encode_parity": self.near_optima_encode_parity,
            "failures": list(self.failures),
        }


def _weights(g: Multigraph, masks: list[EdgeSelection]) -> list[int]:
    w = [e[2] for e in g.edges]
    return [sum(w[i] for i in range(g.m) if s.mask >> i & 1) for s in masks]


def verify_gadget(gad: Gadget) -> VerificationReport:
    """Exhaustively check the three gadget properties over all triangle-free selections.

    1. every terminal assignment of the right parity is compatible with some
       bipartite selection of weight at least the performance;
    2. no triangle-free selection outweighs the performance;
    3. every triangle-free selection heavier than ``performance - 1`` puts the
       terminals in one bipartite component, within distance 2 of terminal
       ``0``, with terminal sides of the right parity.
    """
    g = gad.graph
    if g.m > GADGET_SUPPORT_CAP:
        raise ValueError(f"gadget support {g.m} exceeds the enumeration cap {GADGET_SUPPORT_CAP}")
    sels = triangle_free_selections(g)
    weights = _weights(g, sels)
    perf, par, T = gad.performance, gad.parity, gad.terminals
    failures: list[str] = []

    heavy = [s for s, w in zip(sels, weights) if w >= perf]
    realisable = True
    for c in product((0, 1), repeat=4):
        if sum(c) % 2 != par:
            continue
        if not any(_compatible(g, s, T, c) for s in heavy):
            realisable = False
            failures.append(f"no bipartite selection of weight {perf} realises terminals {c}")

    top = max(weights)
    bounded = top <= perf
    if not bounded:
        failures.append(f"triangle-free selection of weight {top} exceeds {perf}")

    encodes = True
    for s, w in zip(sels, weights):
        if w <= perf - 1:
            continue
        problem = _near_optimum_problem(g, s, T, par)
        if problem:
            encodes = False
            failures.append(f"selection {s.indices()} (weight {w}): {problem}")
    return VerificationReport(perf, par, len(sels), top, realisable, bounded, encodes, tuple(failures))


def _near_optimum_problem(g: Multigraph, s: EdgeSelection, T, parity: int) -> str | None:
    dist = distances_from(g, s, T[0])
    if any(dist[t] is None for t in T[1:]):
        return "terminals not connected"
    if any(dist[t] > 2 for t in T[1:]):
        return "terminal farther than 2 from terminal 0"
    bp = bipartition(g, s)
    comp = bp.component
    if not bp.is_bipartite:
        # only the terminals' component matters
        keep = [i for i, (u, _, _) in enumerate(g.edges) if s.mask >> i & 1 and comp[u] == comp[T[0]]]
        sub = EdgeSelection.from_indices(g, keep)
        bp = bipartition(g, sub)
        if not bp.is_bipartite:
            return "terminal component not bipartite"
    side = bp.sides.side
    if sum(side[t] for t in T) % 2 != parity:
        return "terminal sides violate the parity"
    return None


def bins_lower_bound(capacities: Sequence[float], volume: float) -> float:
    """``volume - sum(capacities) + n``: bins guaranteed to hold more than ``c_i - 1``."""
    caps = list(capacities)
    if any(c < 0 for c in caps):
        raise ValueError("capacities must be non-negative")
    if volume > sum(caps):
        raise ValueError("volume exceeds the total capacity")
    return volume - sum(caps) + len(caps)


@dataclass(frozen=True)
class Block:
    """One gadget copy: host vertex of each gadget vertex, and host-pair multiplicities added."""

    equation: int
    parity: int
    vertex_map: tuple[int, ...]
    contributions: tuple[tuple[int, int, int], ...]

    def weight_in(self, inst_graph: Multigraph, s: EdgeSelection) -> int:
        return sum(w for u, v, w in self.contributions if inst_graph.edge_index(u, v) in s)


@dataclass(frozen=True)
class ReducedInstance:
    graph: Multigraph
    var_vertex: tuple[int, ...]
    zero_vertex: int
    constraint_blocks: tuple[Block, ...]
    system: E3LinSystem
    performances: tuple[int, int]

    def to_dict(self) -> dict:
        return {
            "zero_vertex": self.zero_vertex,
            "var_vertex": list(self.var_vertex),
            "blocks": [
                {
                    "equation": b.equation,
                    "parity": b.parity,
                    "vertex_map": list(b.vertex_map),
                    "edges": [list(e) for e in b.contributions],
                }
                for b in self.constraint_blocks
            ],
        }

    def good_blocks(self, s: EdgeSelection) -> list[int]:
        """Equations whose block restricted to ``s`` weighs more than performance - 1."""
        return [
            b.equation
            for b in self.constraint_blocks
            if b.weight_in(self.graph, s) > self.performances[b.parity] - 1
        ]


def reduce_to_maxpcsp(
    sys: E3LinSystem, g0: Gadget | None = None, g1: Gadget | None = None
) -> ReducedInstance:
    """Glue one gadget copy per equation onto a zero vertex and the variable vertices.

    Vertex 0 is the zero vertex, variable ``i`` is vertex ``i + 1``, and the
    internal vertices of each copy follow in equation order.
    """
    g0 = g0 or gadget17()
    g1 = g1 or gadget9()
    if g0.parity != 0 or g1.parity != 1:
        raise ValueError("need a parity-0 gadget and a parity-1 gadget")
    if not sys.is_balanced:
        raise ValueError("system is not balanced")
    for i, e in enumerate(sys.equations):
        if len(set(e[:3])) != 3:
            raise ValueError(f"equation {i} repeats a variable")
    n = sys.num_vars + 1
    edges: list[tuple[int, int, int]] = []
    blocks = []
    for i, (x, y, z, p) in enumerate(sys.equations):
        gad = g1 if p else g0
        vmap = [0] * gad.graph.n
        for t, host in zip(gad.terminals, (0, x + 1, y + 1, z + 1)):
            vmap[t] = host
        for v in gad.internal:
            vmap[v] = n
            n += 1
        contrib = []
        for u, v, w in gad.graph.edges:
            a, b = sorted((vmap[u], vmap[v]))
            contrib.append((a, b, w))
        edges += contrib
        blocks.append(Block(i, p, tuple(vmap), tuple(sorted(contrib))))
    g = Multigraph.from_edges(n, edges)
    return ReducedInstance(
        g,
        tuple(range(1, sys.num_vars + 1)),
        0,
        tuple(blocks),
        sys,
        (g0.performance, g1.performance),
    )


def decode_solution(inst: ReducedInstance, s: EdgeSelection) -> tuple[int, ...]:
    """Variable value = parity of its distance from the zero vertex; unreachable means 0."""
    if not is_triangle_free(inst.graph, s):
        raise ValueError("selection is not triangle-free")
    dist = distances_from(inst.graph, s, inst.zero_vertex)
    return tuple(0 if dist[v] is None else dist[v] % 2 for v in inst.var_vertex)


def assignment_cut(
    inst: ReducedInstance, assignment: Sequence[int], g0: Gadget | None = None, g1: Gadget | None = None
) -> CutAssignment:
    """Cut putting the zero vertex on side 0, variables on their values, internals greedily.

    Each copy's internal vertices are placed to maximise that copy's cut
    weight; on a satisfied equation this reaches the gadget's performance.
    """
    gads = (g0 or gadget17(), g1 or gadget9())
    side = [0] * inst.graph.n
    for v, val in zip(inst.var_vertex, assignment):
        side[v] = int(val)
    for b in inst.constraint_blocks:
        gad = gads[b.parity]
        inner = gad.internal
        best = None
        for choice in product((0, 1), repeat=len(inner)):
            loc = [side[b.vertex_map[v]] for v in range(gad.graph.n)]
            for v, c in zip(inner, choice):
                loc[v] = c
            w = sum(m for u, v, m in gad.graph.edges if loc[u] != loc[v])
            if best is None or w > best[0]:
                best = (w, choice)
        for v, c in zip(inner, best[1]):
            side[b.vertex_map[v]] = c
    return CutAssignment(tuple(side))


def hardness_ratio(g0: Gadget, g1: Gadget) -> Fraction:
    """``1 - 1/(performance_0 + performance_1)``."""
    return 1 - Fraction(1, g0.performance + g1.performance)

