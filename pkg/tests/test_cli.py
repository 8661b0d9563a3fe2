import csv
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kobalt.cli import main
from kobalt.errors import InvalidInputError
from kobalt.experiments import ExperimentConfig, paper_suite, run
from kobalt.report import Check, ReportDocument, dumps, fmt_real, parallel_map


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def write_json(tmp_path, doc, name="in.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


class TestReport:
    def test_check_semantics(self):
        assert Check("a", 1.0, 1.0 + 1e-9, 1e-8, "PAPER").passed
        assert not Check("a", 1.0, 1.1, 1e-8, "PAPER").passed
        assert Check("b", True, True, 0, "TRIVIAL").passed
        assert not Check("c", 1.0, "x", 0, "DERIVED").passed
        with pytest.raises(ValueError):
            Check("d", 1, 1, 0, "GUESS")

    def test_nan_becomes_null(self):
        assert json.loads(dumps({"x": float("nan")})) == {"x": None}

    def test_parallel_map_preserves_order(self, monkeypatch):
        monkeypatch.setenv("KOBALT_THREADS", "4")
        assert parallel_map(lambda x: x * x, range(20)) == [x * x for x in range(20)]


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_seventeen_digits_round_trip(x):
    assert float(fmt_real(x)) == x
    assert json.loads(dumps({"x": x}))["x"] == x


class TestRunner:
    def test_unknown_subcommand(self, capsys):
        code, _, _ = run_cli(["no-such-thing"], capsys)
        assert code == 2
        with pytest.raises(InvalidInputError):
            ExperimentConfig("no-such-thing")

    def test_schema_errors(self, tmp_path, capsys):
        assert run_cli(["teich-distance", "--input", write_json(tmp_path, {"tau": [0, 1]})], capsys)[0] == 2
        assert run_cli(["teich-distance", "--input", write_json(tmp_path, {"tau1": [0, -1]})], capsys)[0] == 2
        assert run_cli(["teich-distance", "--input", write_json(tmp_path, [1, 2])], capsys)[0] == 2
        bad = tmp_path / "bad.json"
        bad.write_text("{nope")
        assert run_cli(["bsd-distance", "--input", str(bad)], capsys)[0] == 2
        assert run_cli(["torus-intersection", "--grid", "0"], capsys)[0] == 2

    def test_numerical_error_exit_one(self, tmp_path, capsys):
        doc = {"shape": {"rows": 1, "cols": 1}, "p": {"rows": 1, "cols": 1, "re": [[0.0]], "im": [[0.0]]},
               "q": {"rows": 1, "cols": 1, "re": [[1.0]], "im": [[0.0]]}}
        code, _, err = run_cli(["bsd-distance", "--input", write_json(tmp_path, doc)], capsys)
        assert code == 1 and "BoundaryProximityError" in err

    def test_ch2_horocycle_default(self, tmp_path, capsys):
        code, out, _ = run_cli(["ch2-horocycle", "--json", "--out", str(tmp_path)], capsys)
        assert code == 0
        rep = json.loads(out)
        assert rep["passed"]
        assert abs(rep["results"]["gap"] - math.log(2)) < 1e-8
        assert abs(rep["results"]["exp_gap"] - 0.5) < 1e-8
        assert (tmp_path / "ch2-horocycle.levels.csv").exists()

    def test_torus_intersection_csv(self, tmp_path, capsys):
        code, _, _ = run_cli(["torus-intersection", "--grid", "64", "--out", str(tmp_path)], capsys)
        assert code == 0
        rows = list(csv.reader(open(tmp_path / "torus-intersection.sweep.csv")))
        assert rows[0] == ["theta", "intersection", "closed_form"] and len(rows) == 65
        vals = np.array([float(r[1]) for r in rows[1:]])
        thetas = np.array([float(r[0]) for r in rows[1:]])
        np.testing.assert_allclose(vals, math.sqrt(2) * np.abs(np.cos(thetas / 2 + math.pi / 4)), atol=1e-10)
        rep = json.loads((tmp_path / "torus-intersection.json").read_text())
        assert rep["results"]["min"] == vals.min() and rep["results"]["max"] == vals.max()

    def test_deterministic_output(self, tmp_path, capsys):
        for sub in ("reflections-check", "bsd-roughness", "saddle-connections"):
            a, b = tmp_path / f"{sub}-a", tmp_path / f"{sub}-b"
            args = [sub, "--seed", "11", "--grid", "200"] if sub == "reflections-check" else [sub]
            assert run_cli(args + ["--out", str(a)], capsys)[0] == 0
            assert run_cli(args + ["--out", str(b)], capsys)[0] == 0
            for f in sorted(a.iterdir()):
                assert f.read_bytes() == (b / f.name).read_bytes()

    def test_bsd_distance_default(self, capsys):
        code, out, _ = run_cli(["bsd-distance", "--json"], capsys)
        assert code == 0
        assert json.loads(out)["results"]["distance"] == pytest.approx(0.5 * math.log(3), abs=1e-15)

    def test_bsd_roughness_custom_path(self, tmp_path, capsys):
        doc = {
            "shape": {"rows": 2, "cols": 2, "kind": "FullMatrixBall"},
            "coeffs": [
                {"rows": 2, "cols": 2, "re": [[0.5, 0], [0, 0.5]], "im": [[0, 0], [0, 0]]},
                {"rows": 2, "cols": 2, "re": [[1, 0], [0, -1]], "im": [[0, 0], [0, 0]]},
            ],
            "epsilon": 0.1,
        }
        code, out, _ = run_cli(["bsd-roughness", "--input", write_json(tmp_path, doc), "--json", "--out", str(tmp_path)], capsys)
        assert code == 0
        rep = json.loads(out)
        assert rep["results"]["puiseux_fit"]["branch_index"] == 1
        assert rep["results"]["k_gt_1_observed"] is False
        header = next(csv.reader(open(tmp_path / "bsd-roughness.path.csv")))
        assert header == ["t", "lambda_1", "lambda_2", "distance"]

    def test_extremal_length_and_teich(self, tmp_path, capsys):
        code, out, _ = run_cli(
            ["torus-extremal-length", "--input", write_json(tmp_path, {"tau": [1, 1], "curve": [1, 1]}), "--json"], capsys
        )
        assert code == 0 and json.loads(out)["results"]["extremal_length"] == pytest.approx(5)
        code, out, _ = run_cli(["teich-distance", "--json"], capsys)
        rep = json.loads(out)
        assert code == 0 and rep["results"]["closed_form"] == pytest.approx(0.5 * math.log(2))

    def test_saddle_connections_named_and_json(self, tmp_path, capsys):
        code, _, _ = run_cli(["saddle-connections", "--out", str(tmp_path)], capsys)
        assert code == 0
        rows = list(csv.reader(open(tmp_path / "saddle-connections.holonomies.csv")))
        assert len(rows) == 17
        surf = {"polygons": [[[0, 0], [2, 0], [2, 1], [0, 1]]], "gluings": [[0, 0, 0, 2, 1], [0, 1, 0, 3, 1]]}
        code, out, _ = run_cli(
            ["saddle-connections", "--input", write_json(tmp_path, {"surface": surf, "L_max": 3}), "--json"], capsys
        )
        assert code == 0 and json.loads(out)["results"]["count"] > 0
        assert run_cli(["saddle-connections", "--input", write_json(tmp_path, {"surface": "klein-bottle"})], capsys)[0] == 2

    def test_failed_check_exit_one(self, monkeypatch, capsys):
        import kobalt.experiments as ex

        def broken(cfg):
            doc = ReportDocument("broken")
            doc.check("always wrong", 0.0, 1.0, 1e-3, "TRIVIAL")
            return doc

        monkeypatch.setitem(ex.RUNNERS, "ch2-horocycle", broken)
        code, out, _ = run_cli(["ch2-horocycle"], capsys)
        assert code == 1 and "FAIL always wrong" in out


@pytest.fixture(scope="module")
def suite():
    return paper_suite()


class TestPaperSuite:
    def test_all_pass(self, suite):
        assert suite.passed, [c.name for c in suite.checks if not c.passed]

    def test_enough_anchored_constants(self, suite):
        anchored = {c.name for c in suite.checks if c.source == "PAPER"}
        assert len(anchored) >= 6

    def test_normalization_canary(self):
        doc = paper_suite(metric_scale=2.0)
        failed = {c.name for c in doc.checks if not c.passed}
        assert "horocycle gap log 2 (closed Busemann)" in failed
        assert not doc.passed

    def test_cli_exit_code(self, capsys):
        assert run_cli(["paper-suite"], capsys)[0] == 0

    def test_run_matches_direct_call(self):
        a = run(ExperimentConfig("paper-suite", seed=0))
        assert [c.passed for c in a.checks] == [c.passed for c in paper_suite().checks]
