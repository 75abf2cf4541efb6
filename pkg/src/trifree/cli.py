"""Command-line front end.

Every subcommand prints one JSON document with ``"schema": 1`` to standard
output. Exit status is 0 on success, 2 for bad input and 3 for internal
failures such as SDP non-convergence.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .bench import SCHEMES, rows_to_dicts, run_bench, subseed, summarise
from .derand import DerandBudgetError, DerandConfig
from .graph import GraphParseError, read_graph, serialise_graph
from .hardness import (
    E3LinParseError,
    gadget9,
    gadget17,
    parse_e3lin,
    reduce_to_maxpcsp,
    verify_gadget,
)
from .oracles import (
    OracleSizeError,
    brute_best_3colouring,
    brute_e3lin,
    brute_max_cut,
    brute_max_triangle_free,
)
from .params import PUBLISHED_TAU, hybrid_params, optimize_tau, verify_constraints
from .rounding import derandomised_round, round_gw, round_hybrid, sample_hyperplane
from .sdp import Embedding, SdpConvergenceError, solve_maxcut_sdp
from .threecolor import solve_k2_k3

SCHEMA = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3

log = logging.getLogger("trifree")


class InputError(Exception):
    """Bad user input detected before computation."""


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _load_graph(path: str):
    p = Path(path)
    if not p.is_file():
        raise InputError(f"{path}: no such file")
    return read_graph(p)


def _load_embedding(path: str, g):
    p = Path(path)
    if not p.is_file():
        raise InputError(f"{path}: no such file")
    emb = Embedding.from_text(p.read_text())
    if emb.n != g.n:
        raise InputError(f"embedding has {emb.n} rows, graph has {g.n} vertices")
    return emb


def _embedding(args, g):
    if getattr(args, "embedding", None):
        return _load_embedding(args.embedding, g), None
    emb, rep = solve_maxcut_sdp(g, args.eps, subseed(args.seed, 0))
    return emb, rep


def cmd_solve(args) -> dict:
    g = _load_graph(args.graph)
    if g.m == 0:
        raise InputError("graph has no edges")
    emb, rep = solve_maxcut_sdp(g, args.eps, subseed(args.seed, 0))
    if args.embedding_out:
        Path(args.embedding_out).write_text(emb.to_text())
    out = {"sdp": rep.to_dict(), "rank": emb.rank}
    if args.vectors:
        out["vectors"] = emb.vectors.tolist()
    return out


def cmd_round(args) -> dict:
    g = _load_graph(args.graph)
    params = hybrid_params(args.tau)
    if g.m == 0:
        return {"weight": 0, "case": "empty", "selection": [], "sdp_bound": 0.0}
    emb, rep = _embedding(args, g)
    if args.scheme == "gw":
        out = round_gw(g, emb, sample_hyperplane(emb.rank, subseed(args.seed, 1)))
    elif args.scheme == "hybrid":
        out = round_hybrid(g, emb, params, subseed(args.seed, 1))
    else:
        out = derandomised_round(g, emb, params, DerandConfig(args.grid_n, args.atom_budget))
    res = out.to_dict()
    res["sdp_bound"] = rep.objective if rep else None
    res["params"] = params.to_dict()
    return res


def cmd_color3(args) -> dict:
    g = _load_graph(args.graph)
    if g.m == 0:
        raise InputError("graph has no edges")
    emb = _load_embedding(args.embedding, g) if args.embedding else None
    res = solve_k2_k3(
        g,
        args.mode,
        args.budget,
        subseed(args.seed, 2),
        eps=args.eps,
        derand_cfg=DerandConfig(args.grid_n, args.atom_budget),
        emb=emb,
    )
    return res.to_dict()


def cmd_gadget(args) -> dict:
    gad = gadget9() if args.which == 9 else gadget17()
    out = {"gadget": gad.to_dict(), "graph": serialise_graph(gad.graph)}
    if args.verify:
        out["verification"] = verify_gadget(gad).to_dict()
    return out


def cmd_reduce(args) -> dict:
    p = Path(args.system)
    if not p.is_file():
        raise InputError(f"{args.system}: no such file")
    sysm = parse_e3lin(p.read_text())
    if not sysm.is_balanced:
        raise InputError("system is not balanced")
    if any(len(set(e[:3])) != 3 for e in sysm.equations):
        raise InputError("an equation repeats a variable")
    inst = reduce_to_maxpcsp(sysm)
    text = serialise_graph(inst.graph)
    if args.graph_out:
        Path(args.graph_out).write_text(text)
    return {"graph": text, **inst.to_dict()}


def cmd_oracle(args) -> dict:
    p = Path(args.file)
    if not p.is_file():
        raise InputError(f"{args.file}: no such file")
    if args.what == "e3lin":
        res = brute_e3lin(parse_e3lin(p.read_text()), args.balanced_only)
        if res is None:
            return {"value": None, "assignment": None}
        return {"value": res[0], "assignment": list(res[1])}
    g = read_graph(p)
    if args.what == "maxcut":
        w, c = brute_max_cut(g)
        return {"value": w, "sides": list(c.side)}
    if args.what == "trifree":
        w, s = brute_max_triangle_free(g)
        return {"value": w, "selection": [list(e) for e in s.pairs(g)]}
    w, col = brute_best_3colouring(g)
    return {"value": w, "colours": list(col.colour)}


def cmd_verify_params(args) -> dict:
    params = hybrid_params(args.tau)
    report = verify_constraints(params, args.grid_points)
    tau_star, alpha_star = optimize_tau()
    return {
        "params": params.to_dict(),
        "constraints": report.to_dict(),
        "optimum": {"tau": tau_star, "alpha": alpha_star},
    }


def cmd_bench(args) -> dict:
    corpus = Path(args.corpus)
    if not corpus.is_dir():
        raise InputError(f"{args.corpus}: not a directory")
    schemes = [s for s in args.scheme.split(",") if s]
    bad = [s for s in schemes if s not in SCHEMES]
    if bad:
        raise InputError(f"unknown scheme(s): {', '.join(bad)}")
    seeds = [subseed(args.seed, 100 + i) for i in range(args.seeds)]
    rows = run_bench(corpus, schemes, seeds, eps=args.eps, grid_n=args.grid_n, workers=args.workers)
    return {"rows": rows_to_dicts(rows), "summary": summarise(rows)}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_u64, default=0, help="64-bit master seed")
    common.add_argument("--json", action="store_true", help="compact single-line JSON")
    common.add_argument("-v", "--verbose", action="store_true")

    sdp = argparse.ArgumentParser(add_help=False)
    sdp.add_argument("--eps", type=_positive_float, default=5e-6, help="SDP accuracy")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--grid-n", type=_positive_int, default=16, help="binomial grid size")
    grid.add_argument("--atom-budget", type=_positive_int, default=100_000)

    p = argparse.ArgumentParser(prog="trifree", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", parents=[common, sdp], help="solve the Max-Cut SDP")
    s.add_argument("graph")
    s.add_argument("--embedding-out", help="write the embedding to this file")
    s.add_argument("--vectors", action="store_true", help="include vectors in the output")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("round", parents=[common, sdp, grid], help="extract a triangle-free subgraph")
    s.add_argument("graph")
    s.add_argument("--scheme", choices=SCHEMES, default="hybrid")
    s.add_argument("--embedding", help="precomputed embedding file")
    s.add_argument("--tau", type=float, default=PUBLISHED_TAU)
    s.set_defaults(func=cmd_round)

    s = sub.add_parser("color3", parents=[common, grid], help="3-colour at least as well as any cut")
    s.add_argument("graph")
    s.add_argument("--mode", choices=("restarts", "derand"), default="restarts")
    s.add_argument("--budget", type=_positive_int, default=None, help="restart budget")
    s.add_argument("--eps", type=_positive_float, default=1e-4, help="SDP accuracy")
    s.add_argument("--embedding", help="precomputed embedding file")
    s.set_defaults(func=cmd_color3)

    s = sub.add_parser("gadget", parents=[common], help="print a gadget")
    s.add_argument("--which", type=int, choices=(9, 17), required=True)
    s.add_argument("--verify", action="store_true")
    s.set_defaults(func=cmd_gadget)

    s = sub.add_parser("reduce", parents=[common], help="reduce a balanced E3LIN system")
    s.add_argument("system")
    s.add_argument("--graph-out", help="also write the graph file here")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("oracle", parents=[common], help="exhaustive optimum")
    s.add_argument("file")
    s.add_argument("--what", choices=("maxcut", "trifree", "color3", "e3lin"), required=True)
    s.add_argument("--balanced-only", action="store_true")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("verify-params", parents=[common], help="check the rounding constants")
    s.add_argument("--tau", type=float, default=PUBLISHED_TAU)
    s.add_argument("--grid-points", type=_positive_int, default=10_000)
    s.set_defaults(func=cmd_verify_params)

    s = sub.add_parser("bench", parents=[common, sdp], help="ratio table over a corpus")
    s.add_argument("corpus")
    s.add_argument("--scheme", default="hybrid", help="comma-separated: gw,hybrid,derand")
    s.add_argument("--seeds", type=_positive_int, default=1, help="seeds per instance")
    s.add_argument("--grid-n", type=_positive_int, default=16)
    s.add_argument("--workers", type=_positive_int, default=None)
    s.set_defaults(func=cmd_bench)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        payload = args.func(args)
    except (InputError, GraphParseError, E3LinParseError, OracleSizeError, DerandBudgetError) as exc:
        print(f"trifree: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SdpConvergenceError as exc:
        print(f"trifree: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except ValueError as exc:
        print(f"trifree: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - report, never traceback to users
        log.debug("internal failure", exc_info=True)
        print(f"trifree: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    doc = {"schema": SCHEMA, "command": args.command, **payload}
    if args.json:
        print(json.dumps(doc, sort_keys=True, separators=(",", ":")))
    else:
        print(json.dumps(doc, sort_keys=True, indent=2))
    return 0


def main() -> None:
    sys.exit(run())
