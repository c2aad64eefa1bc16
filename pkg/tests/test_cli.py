from __future__ import annotations

import json
import os

import numpy as np
import pytest
from click.testing import CliRunner

from dagcraft import load_csv
from dagcraft.cli import main

from conftest import GENERATING_EDGES, graph_from


@pytest.fixture()
def runner():
    return CliRunner()


def write_toy(runner, path, n=300, seed=1):
    result = runner.invoke(main, ["toygen", "--n", str(n), "--seed", str(seed), "--out", path])
    assert result.exit_code == 0, result.output
    return path


def write_graph(path, edges=GENERATING_EDGES):
    graph = graph_from(edges, version=1)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(graph.to_dict(), fh)
    return path


class TestToygen:
    def test_writes_csv(self, runner, tmp_path):
        out = str(tmp_path / "toy.csv")
        result = runner.invoke(main, ["toygen", "--n", "120", "--seed", "3", "--out", out])
        assert result.exit_code == 0
        assert "120 rows" in result.output
        data = load_csv(out)
        assert data.n == 120
        assert "Energy_Yield" in data.names

    def test_deterministic_bytes(self, runner, tmp_path):
        a = str(tmp_path / "a.csv")
        b = str(tmp_path / "b.csv")
        write_toy(runner, a, n=150, seed=9)
        write_toy(runner, b, n=150, seed=9)
        with open(a, "rb") as fa, open(b, "rb") as fb:
            assert fa.read() == fb.read()


class TestScreen:
    def test_table_to_stdout(self, runner, tmp_path):
        data = write_toy(runner, str(tmp_path / "toy.csv"), n=250)
        result = runner.invoke(main, ["screen", "--data", data, "--reps", "199"])
        assert result.exit_code == 0, result.output
        lines = result.output.strip().splitlines()
        assert lines[0].split("\t") == ["x", "y", "r", "raw_p", "adjusted_p", "rejected"]
        # 7 columns give 21 unordered pairs
        assert len(lines) == 22
        first = lines[1].split("\t")
        assert first[5] in ("true", "false")
        float(first[2]), float(first[3]), float(first[4])

    def test_csv_output(self, runner, tmp_path):
        data = write_toy(runner, str(tmp_path / "toy.csv"), n=250)
        out = str(tmp_path / "screen.csv")
        result = runner.invoke(
            main, ["screen", "--data", data, "--reps", "199", "--out", out]
        )
        assert result.exit_code == 0
        with open(out, encoding="utf-8") as fh:
            rows = fh.read().strip().splitlines()
        assert rows[0] == "x,y,r,raw_p,adjusted_p,rejected"
        assert len(rows) == 22

    def test_by_never_rejects_more(self, runner, tmp_path):
        data = write_toy(runner, str(tmp_path / "toy.csv"), n=250)
        out_bh = str(tmp_path / "bh.csv")
        out_by = str(tmp_path / "by.csv")
        runner.invoke(main, ["screen", "--data", data, "--reps", "199", "--out", out_bh])
        runner.invoke(
            main,
            ["screen", "--data", data, "--reps", "199", "--method", "by", "--out", out_by],
        )
        count = lambda path: sum(
            1 for line in open(path, encoding="utf-8") if line.rstrip().endswith("true")
        )
        assert count(out_by) <= count(out_bh)


class TestFit:
    def test_writes_all_artifacts(self, runner, tmp_path):
        data = write_toy(runner, str(tmp_path / "toy.csv"), n=300)
        graph = write_graph(str(tmp_path / "graph.json"))
        out_dir = str(tmp_path / "run")
        result = runner.invoke(
            main,
            ["fit", "--graph", graph, "--data", data, "--out", out_dir, "--reps", "64"],
        )
        assert result.exit_code == 0, result.output
        assert "records: 47" in result.output
        assert "intersection p:" in result.output
        snap_path = os.path.join(out_dir, "snapshot.json")
        with open(snap_path, encoding="utf-8") as fh:
            snap = json.load(fh)
        assert snap["index"] == 1
        assert "created_at" not in snap
        assert len(snap["family"]["records"]) == 47
        with open(os.path.join(out_dir, "effects.dot"), encoding="utf-8") as fh:
            assert fh.read().startswith("digraph dagcraft {")
        with open(os.path.join(out_dir, "induced_cov.dot"), encoding="utf-8") as fh:
            assert fh.read().startswith("graph dagcraft {")

    def test_byte_reproducible(self, runner, tmp_path):
        data = write_toy(runner, str(tmp_path / "toy.csv"), n=300)
        graph = write_graph(str(tmp_path / "graph.json"))
        outputs = []
        for name in ("one", "two"):
            out_dir = str(tmp_path / name)
            result = runner.invoke(
                main,
                ["fit", "--graph", graph, "--data", data, "--out", out_dir, "--reps", "64"],
            )
            assert result.exit_code == 0, result.output
            blob = {}
            for fname in ("snapshot.json", "effects.dot", "induced_cov.dot"):
                with open(os.path.join(out_dir, fname), "rb") as fh:
                    blob[fname] = fh.read()
            outputs.append(blob)
        assert outputs[0] == outputs[1]

    def test_misfit_edges_listed_as_talking_points(self, runner, tmp_path):
        data = write_toy(runner, str(tmp_path / "toy.csv"), n=2000)
        # leave out the strong RPM -> Energy edge; the equivalence records
        # around that pair cannot be rejected and get listed
        edges = tuple(
            e for e in GENERATING_EDGES if e[:2] != ("Rotational_RPM", "Energy_Yield")
        )
        graph_obj = graph_from(edges, nodes={"Rotational_RPM", "Energy_Yield"}, version=1)
        graph = str(tmp_path / "graph.json")
        with open(graph, "w", encoding="utf-8") as fh:
            json.dump(graph_obj.to_dict(), fh)
        out_dir = str(tmp_path / "run")
        result = runner.invoke(
            main,
            ["fit", "--graph", graph, "--data", data, "--out", out_dir, "--reps", "64"],
        )
        assert result.exit_code == 0, result.output
        assert "talking points" in result.output
        assert "cov-eq:Rotational_RPM,Energy_Yield" in result.output


class TestAdjust:
    def write_pvalues(self, tmp_path, rows, header="id,p,weight"):
        path = str(tmp_path / "pvals.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(header + "\n")
            for row in rows:
                fh.write(",".join(str(v) for v in row) + "\n")
        return path

    def test_bh_table(self, runner, tmp_path):
        path = self.write_pvalues(
            tmp_path, [("a", 0.01, 1), ("b", 0.04, 1), ("c", 0.3, 1)]
        )
        result = runner.invoke(main, ["adjust", "--input", path])
        assert result.exit_code == 0, result.output
        lines = result.output.strip().splitlines()
        assert lines[0].split("\t") == ["id", "raw_p", "weight", "adjusted_p", "rejected"]
        table = {ln.split("\t")[0]: ln.split("\t") for ln in lines[1:]}
        assert table["a"][3] == "0.03"
        assert table["a"][4] == "true"
        assert table["c"][4] == "false"

    def test_weight_column_optional(self, runner, tmp_path):
        path = self.write_pvalues(tmp_path, [("a", 0.01), ("b", 0.2)], header="id,p")
        result = runner.invoke(main, ["adjust", "--input", path])
        assert result.exit_code == 0, result.output
        assert "a\t0.01\t1\t" in result.output

    def test_fdcr_appends_intersection(self, runner, tmp_path):
        path = self.write_pvalues(
            tmp_path, [("a", 0.004, 2), ("b", 0.2, 1), ("c", 0.6, 1)]
        )
        out = str(tmp_path / "adjusted.csv")
        result = runner.invoke(
            main, ["adjust", "--input", path, "--method", "fdcr", "--out", out]
        )
        assert result.exit_code == 0, result.output
        with open(out, encoding="utf-8") as fh:
            rows = fh.read().strip().splitlines()
        ids = [r.split(",")[0] for r in rows[1:]]
        assert set(ids) == {"a", "b", "c", "intersection"}

    def test_simes_prints_single_value(self, runner, tmp_path):
        path = self.write_pvalues(tmp_path, [("a", 0.02, 1), ("b", 0.04, 1)])
        result = runner.invoke(main, ["adjust", "--input", path, "--method", "simes"])
        assert result.exit_code == 0
        assert result.output.strip() == "0.04"

    def test_fisher_prints_single_value(self, runner, tmp_path):
        path = self.write_pvalues(tmp_path, [("a", 0.01, 1), ("b", 0.04, 1)])
        result = runner.invoke(main, ["adjust", "--input", path, "--method", "fisher"])
        assert result.exit_code == 0
        assert result.output.strip() == "0.00352962"

    def test_missing_columns_fail_cleanly(self, runner, tmp_path):
        path = str(tmp_path / "bad.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("name,value\nx,0.1\n")
        result = runner.invoke(main, ["adjust", "--input", path])
        assert result.exit_code != 0
        assert "columns id, p" in result.output

    def test_empty_input_fails_cleanly(self, runner, tmp_path):
        path = str(tmp_path / "empty.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("id,p\n")
        result = runner.invoke(main, ["adjust", "--input", path])
        assert result.exit_code != 0
        assert "no p-values" in result.output


class TestHelp:
    def test_group_lists_subcommands(self, runner):
        result = runner.invoke(main, ["--help"])
        assert result.exit_code == 0
        for sub in ("toygen", "screen", "fit", "adjust", "serve"):
            assert sub in result.output
