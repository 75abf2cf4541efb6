import json
import subprocess
import sys

import numpy as np
import pytest

from helpers import random_multigraph
from trifree import cli as cli_module
from trifree.bench import BenchRow, run_bench, subseed, summarise
from trifree.cli import run
from trifree.graph import EdgeSelection, Multigraph, is_triangle_free, parse_graph, serialise_graph
from trifree.hardness import E3LinSystem, gadget9, serialise_e3lin
from trifree.sdp import SdpConvergenceError, solve_maxcut_sdp

K3 = "p 3 3\ne 0 1 1\ne 1 2 1\ne 0 2 1\n"
C5 = "p 5 5\n" + "".join(f"e {i} {(i + 1) % 5} 1\n" for i in range(5))


@pytest.fixture
def files(tmp_path):
    (tmp_path / "k3.graph").write_text(K3)
    (tmp_path / "c5.graph").write_text(C5)
    (tmp_path / "bad.graph").write_text("p 2 1\ne 0 0 1\n")
    (tmp_path / "empty.graph").write_text("p 3 0\n")
    sysm = E3LinSystem(4, ((0, 1, 2, 1), (1, 2, 3, 0)))
    (tmp_path / "sys.e3lin").write_text(serialise_e3lin(sysm))
    (tmp_path / "unbal.e3lin").write_text("l 3 1\nq 0 1 2 1\n")
    return tmp_path


def call(capsys, *argv):
    code = run([str(a) for a in argv])
    out, err = capsys.readouterr()
    doc = json.loads(out) if code == 0 else None
    return code, doc, out, err


class TestSubcommands:
    def test_solve(self, capsys, files):
        code, doc, _, _ = call(capsys, "solve", files / "k3.graph")
        assert code == 0 and doc["schema"] == 1 and doc["command"] == "solve"
        assert doc["sdp"]["objective"] == pytest.approx(2.25, abs=1e-4)

    def test_solve_writes_embedding(self, capsys, files):
        out = files / "k3.emb"
        code, _, _, _ = call(capsys, "solve", files / "k3.graph", "--embedding-out", out)
        assert code == 0 and out.exists()
        code, doc, _, _ = call(capsys, "round", files / "k3.graph", "--embedding", out, "--scheme", "derand")
        assert code == 0 and doc["weight"] == 2

    @pytest.mark.parametrize("scheme", ["gw", "hybrid", "derand"])
    def test_round(self, capsys, files, scheme):
        code, doc, _, _ = call(capsys, "round", "--scheme", scheme, "--seed", 7, files / "c5.graph")
        assert code == 0
        g = parse_graph(C5)
        sel = EdgeSelection.from_pairs(g, [e[:2] for e in doc["selection"]])
        assert is_triangle_free(g, sel) and doc["weight"] == len(doc["selection"])
        assert doc["params"]["tau"] == pytest.approx(2.18746)

    def test_round_empty_graph(self, capsys, files):
        code, doc, _, _ = call(capsys, "round", files / "empty.graph")
        assert code == 0 and doc["weight"] == 0

    @pytest.mark.parametrize("mode", ["restarts", "derand"])
    def test_color3(self, capsys, files, mode):
        code, doc, _, _ = call(capsys, "color3", "--mode", mode, files / "c5.graph")
        assert code == 0 and doc["satisfied_weight"] >= 4 and doc["mode"] == mode

    def test_gadget(self, capsys):
        code, doc, _, _ = call(capsys, "gadget", "--which", 9, "--verify")
        assert code == 0
        assert doc["gadget"]["performance"] == 9 and doc["gadget"]["parity"] == 1
        assert doc["verification"]["ok"] is True
        assert parse_graph(doc["graph"]) == gadget9().graph

    def test_gadget17(self, capsys):
        code, doc, _, _ = call(capsys, "gadget", "--which", 17)
        assert code == 0 and doc["gadget"]["total_weight"] == 27 and "verification" not in doc

    def test_reduce(self, capsys, files):
        out = files / "red.graph"
        code, doc, _, _ = call(capsys, "reduce", files / "sys.e3lin", "--graph-out", out)
        assert code == 0 and len(doc["blocks"]) == 2
        assert parse_graph(out.read_text()).total_weight == 41

    @pytest.mark.parametrize(
        "what, path, value",
        [("maxcut", "k3.graph", 2), ("trifree", "c5.graph", 5), ("color3", "k3.graph", 3), ("e3lin", "sys.e3lin", 2)],
    )
    def test_oracle(self, capsys, files, what, path, value):
        code, doc, _, _ = call(capsys, "oracle", "--what", what, files / path)
        assert code == 0 and doc["value"] == value

    def test_verify_params(self, capsys):
        code, doc, _, _ = call(capsys, "verify-params")
        assert code == 0
        margins = doc["constraints"]["margins"]
        assert set(margins) == {"long", "middle", "short"}
        assert min(margins.values()) >= -1e-9
        assert doc["optimum"]["tau"] == pytest.approx(2.18746, abs=1e-3)

    def test_bench(self, capsys, files, tmp_path):
        corpus = tmp_path / "corpus"
        corpus.mkdir()
        (corpus / "k3.graph").write_text(K3)
        (corpus / "c5.graph").write_text(C5)
        code, doc, _, _ = call(capsys, "bench", corpus, "--scheme", "gw,derand", "--workers", 1)
        assert code == 0 and len(doc["rows"]) == 4
        assert doc["summary"]["derand"]["min"] >= 0.8823


class TestErrors:
    def test_parse_error_exit_2(self, capsys, files):
        code, _, out, err = call(capsys, "round", files / "bad.graph")
        assert code == 2 and out == "" and "line 2" in err

    def test_missing_file(self, capsys, files):
        code, _, _, err = call(capsys, "solve", files / "nope.graph")
        assert code == 2 and "no such file" in err

    def test_unknown_flag(self, capsys, files):
        code, _, _, _ = call(capsys, "solve", "--bogus", files / "k3.graph")
        assert code == 2

    def test_bad_seed(self, capsys, files):
        assert call(capsys, "solve", "--seed", -1, files / "k3.graph")[0] == 2
        assert call(capsys, "solve", "--seed", 2**64, files / "k3.graph")[0] == 2

    def test_unbalanced_system(self, capsys, files):
        code, _, _, err = call(capsys, "reduce", files / "unbal.e3lin")
        assert code == 2 and "balanced" in err

    def test_unknown_scheme(self, capsys, files):
        assert call(capsys, "bench", files, "--scheme", "magic")[0] == 2

    def test_sdp_failure_exit_3(self, capsys, files, monkeypatch):
        k6 = Multigraph.from_edges(6, [(u, v, 1) for u in range(6) for v in range(u + 1, 6)])
        with pytest.raises(SdpConvergenceError) as info:
            solve_maxcut_sdp(k6, 1e-12, max_sweeps=1, max_restarts=2)

        def fail(*a, **k):
            raise info.value

        monkeypatch.setattr(cli_module, "solve_maxcut_sdp", fail)
        code, _, _, err = call(capsys, "solve", files / "k3.graph")
        assert code == 3 and "did not converge" in err

    def test_budget_error_exit_2(self, capsys, files):
        code, _, _, err = call(capsys, "round", "--scheme", "derand", "--atom-budget", 1, files / "k3.graph")
        assert code == 2 and "budget" in err


class TestDeterminism:
    @pytest.mark.parametrize(
        "argv",
        [
            ("round", "--scheme", "hybrid", "--seed", "99", "c5.graph"),
            ("color3", "--seed", "5", "k3.graph"),
            ("solve", "--json", "--seed", "3", "c5.graph"),
        ],
    )
    def test_byte_identical(self, capsys, files, argv):
        argv = [str(files / a) if a.endswith(".graph") else a for a in argv]
        first = call(capsys, *argv)[2]
        second = call(capsys, *argv)[2]
        assert first == second and first

    def test_compact_json(self, capsys):
        _, _, out, _ = call(capsys, "gadget", "--which", 9, "--json")
        assert out.count("\n") == 1

    def test_console_script(self, files):
        proc = subprocess.run(
            [sys.executable, "-c", "from trifree.cli import main; main()", "oracle", "--what", "maxcut", str(files / "k3.graph")],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0 and json.loads(proc.stdout)["value"] == 2


class TestBench:
    def test_subseed(self):
        assert subseed(1, 0) == subseed(1, 0)
        assert len({subseed(1, c) for c in range(50)}) == 50
        assert subseed(2**64 - 1, 3) != subseed(0, 3)

    def test_empty_corpus(self, tmp_path):
        assert run_bench(tmp_path) == []
        assert summarise([]) == {}

    def test_bad_file_is_recorded(self, tmp_path):
        (tmp_path / "bad.graph").write_text("nonsense")
        rows = run_bench(tmp_path, ["gw"], [0])
        assert len(rows) == 1 and rows[0].error and rows[0].ratio is None
        assert summarise(rows)["gw"]["failures"] == 1

    def test_k3_ratio_against_max_cut(self, tmp_path):
        (tmp_path / "k3.graph").write_text(K3)
        rows = run_bench(tmp_path, ["derand"], [0])
        assert rows[0].reference == 2 and rows[0].reference_kind == "max_cut" and rows[0].ratio == 1.0
        # against the relaxation the same output is only 8/9
        assert rows[0].weight / 2.25 == pytest.approx(8 / 9)

    def test_seven_vertex_corpus(self, tmp_path, rng):
        for i in range(12):
            (tmp_path / f"g{i:02d}.graph").write_text(serialise_graph(random_multigraph(rng, 7, 7)))
        rows = run_bench(tmp_path, ["hybrid", "derand"], [subseed(0, 100 + i) for i in range(4)], workers=2)
        summary = summarise(rows)
        assert summary["derand"]["min"] >= 0.8823 and summary["derand"]["failures"] == 0
        hybrid = [r.ratio for r in rows if r.scheme == "hybrid"]
        assert len(hybrid) == 48 and np.mean(hybrid) >= 0.8823

    def test_row_fields(self):
        r = BenchRow("x", "gw", 0)
        assert r.weight is None and r.error is None
