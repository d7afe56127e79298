import json
import math
import re
from fractions import Fraction

import numpy as np
import pytest

from boxball import __version__
from boxball.harness import records, render, scenarios
from boxball.harness.cli import main
from boxball.lattice import BinaryConfiguration, encode_path, running_max
from boxball.samplers import Bernoulli, PeriodicIID, spec_to_dict


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def records_of(out: str) -> list[dict]:
    return [json.loads(line) for line in out.splitlines() if line.startswith("{")]


class TestEvolve:
    def test_figure1(self, capsys):
        code, out, _ = run(capsys, "evolve", "--config", "|010111001000000", "--steps", "2")
        assert code == 0
        rec = records_of(out)[0]
        rows = [BinaryConfiguration.from_string(r) for r in rec["outputs"]["rows"]]
        assert [r.occupied() for r in rows] == [[2, 4, 5, 6, 9], [3, 7, 8, 10, 11], [4, 9, 12, 13, 14]]
        assert rec["command"] == "evolve" and rec["version"] == __version__

    def test_text_rendering(self, capsys):
        code, out, _ = run(capsys, "evolve", "--config", "|010111001000000", "--steps", "2", "--render", "text")
        assert code == 0
        lines = [l for l in out.splitlines() if not l.startswith("{")]
        assert len(lines) == 3
        assert lines[0].count("●") == 5 and set(lines[0]) <= {"○", "●"}

    def test_empty_config_unchanged(self, capsys):
        code, out, _ = run(capsys, "evolve", "--config", "0000", "--cyclic", "--steps", "5")
        assert code == 0
        assert set(records_of(out)[0]["outputs"]["rows"]) == {"|0000"}

    def test_gibbs_sample_conserves_profile(self, capsys):
        spec = json.dumps(spec_to_dict(PeriodicIID(100, 0.35)))
        code, out, _ = run(capsys, "evolve", "--spec", spec, "--steps", "25", "--seed", "3")
        assert code == 0
        o = records_of(out)[0]["outputs"]
        assert len(o["rows"]) == 26
        assert o["profile_conserved"] is True

    def test_density_error_is_usage_error(self, capsys):
        code, _, err = run(capsys, "evolve", "--config", "110100", "--cyclic")
        assert code == 2 and "evolve" in err

    def test_svg(self, capsys, tmp_path):
        out_file = tmp_path / "run.jsonl"
        code, _, _ = run(capsys, "evolve", "--config", "|0110", "--steps", "2", "--render", "svg",
                         "--out", str(out_file))
        assert code == 0
        svg = (tmp_path / "run.svg").read_text()
        assert svg.startswith("<?xml") or svg.startswith("<svg")
        assert len(records.read_records(out_file)) == 1


class TestVerify:
    def test_pass_and_records(self, capsys):
        code, out, err = run(capsys, "verify", "figure1", "--render", "text")
        assert code == 0
        assert "PASS figure1" in err
        assert records_of(out)[0]["passed"] is True

    @pytest.mark.parametrize("suite", ["figure1", "conservation"])
    def test_broken_step_fails(self, capsys, suite):
        overrides = json.dumps({"random_count": 50, "random_max_N": 16, "exhaustive_max_N": 8}) \
            if suite == "conservation" else "{}"
        code, out, _ = run(capsys, "verify", suite, "--broken", "--spec", overrides)
        assert code == 1
        assert records_of(out)[0]["passed"] is False

    def test_unknown_suite(self, capsys):
        assert run(capsys, "verify", "nonsense")[0] == 2

    def test_broken_needs_step_suite(self, capsys):
        assert run(capsys, "verify", "zigzag", "--broken")[0] == 2

    def test_tolerance_override(self, capsys):
        code, out, _ = run(capsys, "verify", "gibbs-invariance", "--tolerance", "1e-300",
                           "--spec", json.dumps({"N": [6]}))
        assert code == 1
        assert records_of(out)[0]["spec"]["overrides"]["tolerance"] == 1e-300


class TestDispatch:
    def test_sample_reproducible(self, capsys):
        spec = json.dumps(spec_to_dict(Bernoulli(0.3)))
        a = run(capsys, "sample", "--spec", spec, "--window", "1,30", "--size", "4", "--seed", "9")
        b = run(capsys, "sample", "--spec", spec, "--window", "1,30", "--size", "4", "--seed", "9")
        c = run(capsys, "sample", "--spec", spec, "--window", "1,30", "--size", "4", "--seed", "10")
        assert a[0] == 0 and a[1] == b[1]
        assert a[1] != c[1]
        assert all(len(w) == 30 for w in records_of(a[1])[0]["outputs"]["samples"])

    def test_sample_gibbs(self, capsys):
        spec = json.dumps(spec_to_dict(PeriodicIID(12, 0.3)))
        code, out, _ = run(capsys, "sample", "--spec", spec, "--size", "3")
        assert code == 0 and len(records_of(out)[0]["outputs"]["samples"]) == 3

    def test_exact(self, capsys):
        spec = json.dumps(spec_to_dict(PeriodicIID(8, 0.3)))
        code, out, _ = run(capsys, "exact", "--spec", spec)
        assert code == 0
        assert records_of(out)[0]["outputs"]["tv_to_pushforward"] < 1e-12
        code, out, _ = run(capsys, "exact", "--spec", spec, "--M", "2")
        law = records_of(out)[0]["outputs"]["window_law"]
        assert sum(law.values()) == pytest.approx(1)

    def test_limits(self, capsys):
        spec = json.dumps({"family": "iid", "params": {"p": 0.35}, "grid": [50, 200]})
        code, out, _ = run(capsys, "limits", "--spec", spec, "--tolerance", "1e-2")
        assert code == 0 and records_of(out)[0]["passed"] is True

    def test_toda(self, capsys):
        spec = json.dumps({"Q": [2, 1], "E": [4, 3], "periodic": True, "L": 10})
        code, out, _ = run(capsys, "toda", "--spec", spec, "--steps", "3")
        assert code == 0
        o = records_of(out)[0]["outputs"]
        assert o["orbit"][1] == {"Q": [2, 1], "E": [3, 4], "periodic": True, "L": 10}
        assert o["path_route_agrees"] is True

    def test_continuum(self, capsys):
        # a negative window start needs the --window=a,b form
        a = run(capsys, "continuum", "--seed", "2", "--window=-3,3")
        b = run(capsys, "continuum", "--seed", "2", "--window=-3,3")
        assert a[0] == 0 and a[1] == b[1]
        o = records_of(a[1])[0]["outputs"]
        assert o["transformed"]["times"][0] == -3.0

    @pytest.mark.parametrize("argv", [
        ["sample", "--spec", "{not json"],
        ["sample", "--spec", "[1, 2]"],
        ["sample", "--spec", '{"kind": "ising"}'],
        ["toda", "--spec", '{"Q": [1]}'],
        ["limits", "--spec", '{"family": "potts"}'],
        ["sample"],
        ["evolve", "--config", "0120"],
        ["evolve", "--steps", "-1", "--config", "01"],
        ["continuum", "--window", "1"],
    ])
    def test_usage_errors(self, capsys, argv):
        code, _, err = run(capsys, *argv)
        assert code == 2 and err

    def test_argparse_error(self, capsys):
        assert run(capsys, "frobnicate")[0] == 2

    def test_timestamps_opt_in(self, capsys):
        _, out, _ = run(capsys, "evolve", "--config", "01", "--timestamps")
        assert "finished" in records_of(out)[0]["timestamps"]
        _, out, _ = run(capsys, "evolve", "--config", "01")
        assert "timestamps" not in records_of(out)[0]


class TestRecords:
    def test_jsonable(self):
        data = {"a": np.int64(3), "b": np.arange(3), "c": (1.5, math.inf), "d": Fraction(1, 4),
                "e": np.bool_(True), "f": -math.inf}
        out = records.jsonable(data)
        assert out == {"a": 3, "b": [0, 1, 2], "c": [1.5, "inf"], "d": 0.25, "e": True, "f": "-inf"}
        json.dumps(out, allow_nan=False)

    def test_round_trip(self, tmp_path):
        path = tmp_path / "r.jsonl"
        w = records.RecordWriter(path)
        w.write(records.RunRecord("x", 1, {"k": 1}, {"v": [1, 2]}))
        w.write(records.RunRecord("y", 2, {}, {}, passed=True))
        back = records.read_records(path)
        assert [r["command"] for r in back] == ["x", "y"]
        assert back[1]["passed"] is True

    def test_deterministic_json(self):
        a = records.RunRecord("x", 1, {"b": 1, "a": 2}, {}).to_json()
        b = records.RunRecord("x", 1, {"a": 2, "b": 1}, {}).to_json()
        assert a == b


class TestRender:
    def test_rows(self):
        rows = [BinaryConfiguration.from_string("|0110"), BinaryConfiguration.from_string("|0011")]
        assert render.render_rows(rows).splitlines() == ["○●●○", "○○●●"]

    def test_single_ball_four_segments(self):
        p = encode_path(BinaryConfiguration((0, 1, 0, 0), 0))
        svg = render.render_path_svg([(np.arange(p.first, p.last + 1), p.values)])
        pts = re.search(r'<polyline[^>]*points="([^"]+)"', svg).group(1).split()
        assert len(pts) - 1 == 4

    def test_overlay_above_path(self):
        p = encode_path(BinaryConfiguration.from_string("|010111001000000"))
        t = np.arange(p.first, p.last + 1)
        m = running_max(p)
        assert np.all(m >= np.asarray(p.values))
        svg = render.render_path_svg([(t, p.values)], [(t, m)])
        lines = re.findall(r'<polyline[^>]*points="([^"]+)"', svg)
        path_y = [float(s.split(",")[1]) for s in lines[0].split()]
        max_y = [float(s.split(",")[1]) for s in lines[1].split()]
        # SVG y grows downward
        assert all(my <= py + 1e-9 for my, py in zip(max_y, path_y))
        assert "#c00" in svg

    def test_deterministic(self):
        args = ([([0, 1, 2], [0, -1, 0])], [([0, 1, 2], [0, 0, 0])])
        assert render.render_path_svg(*args) == render.render_path_svg(*args)

    def test_empty(self):
        with pytest.raises(ValueError):
            render.render_path_svg([])


class TestScenarios:
    def test_defaults_versioned(self):
        d = scenarios.load_defaults()
        assert d["version"] == 1
        assert set(scenarios.SUITES) <= set(d)

    def test_check_line(self):
        c = scenarios.Check("x", True, {"tv": 1e-15})
        assert c.line().startswith("PASS x")
        assert scenarios.Check("y", False).line() == "FAIL y"

    def test_unknown(self):
        with pytest.raises(KeyError):
            scenarios.run_suite("nope")
