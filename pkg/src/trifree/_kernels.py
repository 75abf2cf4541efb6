"""Kernel dispatch: compiled extension when importable, numpy fallback otherwise.

Set ``TRIFREE_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os
from types import ModuleType

import numpy as np

from . import _pykernels

_NAMES = (
    "mixing_sweep",
    "max_cut_enum",
    "colour3_enum",
    "max_triangle_free",
    "triangle_free_masks",
    "atom_intervals",
)


def _load_compiled() -> ModuleType | None:
    try:
        from . import _ckernels
    except ImportError:
        return None
    return _ckernels


def available_backends() -> dict[str, ModuleType]:
    out = {"python": _pykernels}
    compiled = _load_compiled()
    if compiled is not None:
        out["cython"] = compiled
    return out


def get_backend(name: str) -> ModuleType:
    try:
        return available_backends()[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} is not available") from None


if os.environ.get("TRIFREE_PURE_PYTHON") == "1":
    _impl = _pykernels
else:
    _impl = _load_compiled() or _pykernels

BACKEND = "python" if _impl is _pykernels else "cython"

mixing_sweep = _impl.mixing_sweep
max_cut_enum = _impl.max_cut_enum
colour3_enum = _impl.colour3_enum
max_triangle_free = _impl.max_triangle_free
triangle_free_masks = _impl.triangle_free_masks
atom_intervals = _impl.atom_intervals


def conflict_arrays(m: int, triangles) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """CSR layout of triangle conflicts keyed by each triangle's largest edge index."""
    per_edge: list[list[tuple[int, int]]] = [[] for _ in range(m)]
    for i, j, k in triangles:
        per_edge[k].append((i, j))
    ptr = np.zeros(m + 1, dtype=np.int64)
    for k in range(m):
        ptr[k + 1] = ptr[k] + len(per_edge[k])
    flat = [p for lst in per_edge for p in lst]
    a = np.array([p[0] for p in flat], dtype=np.int64)
    b = np.array([p[1] for p in flat], dtype=np.int64)
    return ptr, a, b
