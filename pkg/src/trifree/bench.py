"""Ratio benchmark over a directory of graph files."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .derand import DerandConfig
from .graph import read_graph
from .oracles import MAX_CUT_CAP, brute_max_cut
from .params import hybrid_params
from .rounding import derandomised_round, round_gw, round_hybrid, sample_hyperplane
from .sdp import solve_maxcut_sdp

__all__ = ["SCHEMES", "BenchRow", "subseed", "run_instance", "run_bench", "summarise", "rows_to_dicts"]

SCHEMES = ("gw", "hybrid", "derand")


def subseed(seed: int, counter: int) -> int:
    """Independent 64-bit stream for a fixed purpose ``counter``."""
    ss = np.random.SeedSequence([seed & (2**64 - 1), counter])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class BenchRow:
    instance: str
    scheme: str
    seed: int
    weight: int | None = None
    reference: float | None = None
    reference_kind: str | None = None
    ratio: float | None = None
    error: str | None = None


def run_instance(path: str, schemes: Sequence[str], seeds: Sequence[int], eps: float, grid_n: int) -> list[BenchRow]:
    name = Path(path).name
    try:
        g = read_graph(path)
    except Exception as exc:  # recorded, never fatal
        return [BenchRow(name, s, sd, error=f"{type(exc).__name__}: {exc}") for s in schemes for sd in seeds]
    rows = []
    if g.m == 0:
        return [BenchRow(name, s, sd, 0, 0.0, "empty", None) for s in schemes for sd in seeds]
    if g.n <= MAX_CUT_CAP:
        ref, kind = float(brute_max_cut(g)[0]), "max_cut"
    else:
        ref, kind = None, "sdp"
    params = hybrid_params()
    for sd in seeds:
        try:
            emb, rep = solve_maxcut_sdp(g, eps, subseed(sd, 0))
        except Exception as exc:
            rows += [BenchRow(name, s, sd, error=f"{type(exc).__name__}: {exc}") for s in schemes]
            continue
        r = ref if ref is not None else rep.objective
        for s in schemes:
            try:
                if s == "gw":
                    out = round_gw(g, emb, sample_hyperplane(emb.rank, subseed(sd, 1)))
                elif s == "hybrid":
                    out = round_hybrid(g, emb, params, subseed(sd, 1))
                else:
                    out = derandomised_round(g, emb, params, DerandConfig(grid_n=grid_n))
                rows.append(BenchRow(name, s, sd, out.weight, r, kind, out.weight / r if r else None))
            except Exception as exc:
                rows.append(BenchRow(name, s, sd, error=f"{type(exc).__name__}: {exc}"))
    return rows


def run_bench(
    corpus: str | os.PathLike,
    schemes: Sequence[str] = ("hybrid",),
    seeds: Sequence[int] = (0,),
    *,
    eps: float = 5e-6,
    grid_n: int = 16,
    workers: int | None = None,
) -> list[BenchRow]:
    """Run every scheme and seed on every regular file in ``corpus``, in sorted order."""
    for s in schemes:
        if s not in SCHEMES:
            raise ValueError(f"unknown scheme {s!r}")
    files = sorted(str(p) for p in Path(corpus).iterdir() if p.is_file())
    if not files:
        return []
    args = [(f, tuple(schemes), tuple(seeds), eps, grid_n) for f in files]
    if workers == 1 or len(files) == 1:
        results = [run_instance(*a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_instance, *zip(*args)))
    return [row for rows in results for row in rows]


def summarise(rows: Sequence[BenchRow]) -> dict:
    """Per-scheme min, quartiles and max of the ratios, plus failure counts."""
    out = {}
    for s in sorted({r.scheme for r in rows}):
        ratios = [r.ratio for r in rows if r.scheme == s and r.ratio is not None]
        failures = sum(1 for r in rows if r.scheme == s and r.error)
        entry = {"count": len(ratios), "failures": failures}
        if ratios:
            q = np.quantile(ratios, [0.0, 0.25, 0.5, 0.75, 1.0])
            entry.update(zip(("min", "q25", "median", "q75", "max"), (float(x) for x in q)))
        out[s] = entry
    return out


def rows_to_dicts(rows: Sequence[BenchRow]) -> list[dict]:
    return [asdict(r) for r in rows]
