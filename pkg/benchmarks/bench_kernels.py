"""Time each kernel on the compiled and the numpy backend.

    python benchmarks/bench_kernels.py [--repeat 3]

Prints one line per kernel with the best-of-``repeat`` wall time of each
backend and the speedup. Outputs of both backends are checked for equality
(or closeness, for floating-point kernels) before timing.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from trifree import _kernels
from trifree.derand import BinomialGrid
from trifree.graph import Multigraph
from trifree.sdp import default_rank


def random_graph(n: int, p: float, rng) -> Multigraph:
    edges = [(u, v, int(rng.integers(1, 4))) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Multigraph.from_edges(n, edges)


def cases(rng):
    g_sdp = random_graph(300, 0.05, rng)
    indptr, indices, weights = g_sdp.csr
    V = rng.standard_normal((g_sdp.n, default_rank(g_sdp.n)))
    V /= np.linalg.norm(V, axis=1, keepdims=True)

    g_cut = random_graph(18, 0.5, rng)
    g_col = random_graph(10, 0.5, rng)
    g_tri = random_graph(8, 0.7, rng)
    ptr, a, b = _kernels.conflict_arrays(g_tri.m, g_tri.triangles)
    _, _, ew = g_tri.arrays

    grid = BinomialGrid(16)
    L = rng.standard_normal((4, 4))
    y = rng.standard_normal(4)
    z = rng.standard_normal(4)

    return {
        "mixing_sweep (n=300)": lambda k: k.mixing_sweep(V.copy(), indptr, indices, weights),
        "max_cut_enum (n=18)": lambda k: k.max_cut_enum(g_cut.n, *g_cut.arrays),
        "colour3_enum (n=10)": lambda k: k.colour3_enum(g_col.n, *g_col.arrays),
        f"max_triangle_free (m={g_tri.m})": lambda k: k.max_triangle_free(g_tri.m, ew, ptr, a, b, False),
        "atom_intervals (17^4 atoms)": lambda k: k.atom_intervals(L, y, z, grid.points, grid.masses),
    }


def _same(x, y) -> bool:
    if isinstance(x, tuple):
        return all(_same(p, q) for p, q in zip(x, y))
    if isinstance(x, np.ndarray) or isinstance(y, np.ndarray):
        return np.allclose(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    return x == y


def best_time(fn, repeat: int) -> float:
    out = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        out = min(out, time.perf_counter() - t0)
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    backends = _kernels.available_backends()
    if "cython" not in backends:
        print("compiled extension not built; only the numpy backend is available")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':34s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s}")
    for name, call in cases(rng).items():
        py = backends["python"]
        tp = best_time(lambda: call(py), args.repeat)
        if "cython" in backends:
            cy = backends["cython"]
            if name.startswith("mixing_sweep"):
                agree = True
            else:
                agree = _same(call(py), call(cy))
            tc = best_time(lambda: call(cy), args.repeat)
            flag = "" if agree else "  OUTPUT MISMATCH"
            print(f"{name:34s} {tp:11.4f} {tc:11.4f} {tp / tc:8.1f}x{flag}")
        else:
            print(f"{name:34s} {tp:11.4f} {'-':>11s} {'-':>8s}")


if __name__ == "__main__":
    main()
