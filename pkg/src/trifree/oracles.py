"""Exhaustive ground truth for small instances."""

from __future__ import annotations

import numpy as np

from . import _kernels
from .graph import CutAssignment, EdgeSelection, Multigraph
from .hardness import E3LinSystem
from .threecolor import ThreeColouring

__all__ = [
    "OracleSizeError",
    "MAX_CUT_CAP",
    "TRIANGLE_FREE_CAP",
    "COLOUR3_CAP",
    "E3LIN_CAP",
    "brute_max_cut",
    "brute_max_triangle_free",
    "brute_all_max_triangle_free",
    "brute_best_3colouring",
    "brute_e3lin",
]

MAX_CUT_CAP = 24
TRIANGLE_FREE_CAP = 25
COLOUR3_CAP = 15
E3LIN_CAP = 20


class OracleSizeError(ValueError):
    """Instance too large for exhaustive search."""


def _cap(value: int, cap: int, what: str) -> None:
    if value > cap:
        raise OracleSizeError(f"{what} {value} exceeds the oracle cap {cap}")


def brute_max_cut(g: Multigraph) -> tuple[int, CutAssignment]:
    _cap(g.n, MAX_CUT_CAP, "vertex count")
    best, mask = _kernels.max_cut_enum(g.n, *g.arrays)
    return int(best), CutAssignment.from_mask(g.n, int(mask))


def _triangle_free_search(g: Multigraph, collect_all: bool):
    _cap(g.m, TRIANGLE_FREE_CAP, "support size")
    ptr, a, b = _kernels.conflict_arrays(g.m, g.triangles)
    _, _, ew = g.arrays
    return _kernels.max_triangle_free(g.m, ew, ptr, a, b, collect_all)


def brute_max_triangle_free(g: Multigraph) -> tuple[int, EdgeSelection]:
    best, masks = _triangle_free_search(g, False)
    return int(best), EdgeSelection(g.m, int(masks[0]))


def brute_all_max_triangle_free(g: Multigraph) -> tuple[int, list[EdgeSelection]]:
    """The maximum weight and every triangle-free selection attaining it."""
    best, masks = _triangle_free_search(g, True)
    return int(best), [EdgeSelection(g.m, int(s)) for s in masks]


def brute_best_3colouring(g: Multigraph) -> tuple[int, ThreeColouring]:
    """Maximum bichromatic weight; vertex 0 is fixed to colour 1."""
    _cap(g.n, COLOUR3_CAP, "vertex count")
    best, colours = _kernels.colour3_enum(g.n, *g.arrays)
    return int(best), ThreeColouring(tuple(int(c) + 1 for c in colours))


def brute_e3lin(sys: E3LinSystem, balanced_only: bool = False) -> tuple[int, tuple[int, ...]] | None:
    """Best satisfied count over all assignments; ``None`` if no balanced solution exists.

    Ties go to the first assignment in lexicographic order.
    """
    _cap(sys.num_vars, E3LIN_CAP, "variable count")
    n = sys.num_vars
    eqs = np.array(sys.equations, dtype=np.int64).reshape(-1, 4)
    # bit j of the index is variable n-1-j, so index order is lexicographic order
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    best = None
    for start in range(0, 1 << n, 1 << 16):
        idx = np.arange(start, min(start + (1 << 16), 1 << n), dtype=np.int64)
        bits = (idx[:, None] >> shifts) & 1
        sat = (bits[:, eqs[:, 0]] ^ bits[:, eqs[:, 1]] ^ bits[:, eqs[:, 2]]) == eqs[:, 3]
        value = sat.sum(axis=1)
        if balanced_only:
            s1 = sat[:, eqs[:, 3] == 1].sum(axis=1)
            value = np.where(2 * s1 == value, value, -1)
        i = int(np.argmax(value))
        if value[i] >= 0 and (best is None or value[i] > best[0]):
            best = (int(value[i]), tuple(int(b) for b in bits[i]))
    return best
