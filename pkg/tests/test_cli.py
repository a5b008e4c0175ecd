import json
import subprocess
import sys

import numpy as np
import pytest

from gammarul.cli import main
from gammarul.fixtures import fixture_path

LASER = str(fixture_path("laser"))
WHEEL = str(fixture_path("wheel"))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write_csv(path, rows):
    path.write_text("unit_id,time,value\n" + "".join(f"{u},{t},{v}\n" for u, t, v in rows))
    return str(path)


class TestFit:
    def test_report(self, capsys):
        code, out, _ = run(capsys, "fit", "--data", LASER, "--threshold", "10", "--reliability-at", "4500", "--seed", "3")
        assert code == 0
        rep = json.loads(out)
        assert rep["schema_version"] == 1 and rep["seed"] == 3
        assert rep["input_digest"].startswith("sha256:")
        assert rep["config"]["sampler"] == "dgs" and rep["config"]["K"] == 1000
        assert set(rep["estimates"]) == {"alpha", "beta", "R(4500)", "MTTF"}
        a = rep["estimates"]["alpha"]
        assert a["lower"] < a["point"] < a["upper"]
        assert rep["posterior"]["family"] == "AGG"
        assert rep["data"]["n"] == 15 and rep["data"]["m"] == 16

    def test_reproducible(self, capsys, tmp_path):
        outs = []
        for k in range(2):
            p = tmp_path / f"r{k}.json"
            assert run(capsys, "fit", "--data", LASER, "--threshold", "10", "--sampler", "sir", "--out", str(p))[0] == 0
            outs.append(json.loads(p.read_text())["estimates"])
        assert outs[0] == outs[1]

    def test_dgs_sir_agree(self, capsys):
        est = {}
        for s in ("dgs", "sir"):
            code, out, _ = run(capsys, "fit", "--data", LASER, "--threshold", "10", "--sampler", s, "--draws", "5000")
            assert code == 0
            est[s] = json.loads(out)["estimates"]
        for k in ("alpha", "beta", "MTTF"):
            assert est["dgs"][k]["point"] == pytest.approx(est["sir"][k]["point"], rel=0.02)

    def test_hetero(self, capsys, tmp_path):
        draws = tmp_path / "d.csv"
        code, out, _ = run(capsys, "fit", "--data", WHEEL, "--threshold", "60", "--hetero", "--draws-out", str(draws))
        assert code == 0
        rep = json.loads(out)
        assert "beta_11" in rep["estimates"] and "MTTF_5" in rep["estimates"]
        assert rep["posterior"]["family"] == "AGMG"
        assert draws.read_text().splitlines()[0].startswith("draw_index,alpha,beta_1")

    def test_bad_draws(self, capsys):
        code, _, err = run(capsys, "fit", "--data", LASER, "--threshold", "10", "--draws", "0")
        assert code == 2 and "ConfigurationError" in err

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "fit", "--data", str(tmp_path / "nope.csv"), "--threshold", "1")[0] == 2

    def test_malformed_csv(self, capsys, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("unit_id,time,value\n1,1,0.5\n1,2,abc\n")
        code, _, err = run(capsys, "fit", "--data", str(p), "--threshold", "10")
        assert code == 3 and "line 3" in err

    def test_improper(self, capsys, tmp_path):
        # Increments proportional to their lags make the tail exponent vanish.
        rows = [(u, t, c * t) for u, c in ((1, 0.5), (2, 0.5)) for t in (1, 2, 3)]
        code, _, err = run(capsys, "fit", "--data", write_csv(tmp_path / "p.csv", rows), "--threshold", "10")
        assert code == 4 and "ProperError" in err


class TestReplay:
    def test_outputs(self, capsys, tmp_path):
        out = tmp_path / "traj.csv"
        assert run(capsys, "replay", "--data", WHEEL, "--threshold", "60", "--out", str(out))[0] == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "epoch,time,unit_id,point,lower,upper,true_rul"
        params = (tmp_path / "traj_params.csv").read_text().splitlines()
        assert len(params) == 1 + 11

    def test_stdout(self, capsys):
        code, out, _ = run(capsys, "replay", "--data", LASER, "--threshold", "10", "--sampler", "sir", "--draws", "200")
        assert code == 0 and len(out.splitlines()) == 1 + 15 * 15

    def test_bad_start(self, capsys):
        assert run(capsys, "replay", "--data", WHEEL, "--threshold", "60", "--start-epoch", "99")[0] == 2

    def test_gibbs_rejected_by_parser(self, capsys):
        with pytest.raises(SystemExit) as e:
            main(["replay", "--data", WHEEL, "--threshold", "60", "--sampler", "gs"])
        assert e.value.code == 2


class TestInterpFailure:
    def test_wheel(self, capsys):
        code, out, _ = run(capsys, "interp-failure", "--data", WHEEL, "--threshold", "60")
        assert code == 0
        lines = dict(l.split(",") for l in out.splitlines()[1:])
        assert lines["1"] == "not failed"
        assert float(lines["5"]) == pytest.approx(504.881, abs=1e-3)

    def test_by_hand(self, capsys, tmp_path):
        rows = [(1, 3750, 9.87), (1, 4000, 10.94), (2, 3750, 1.0), (2, 4000, 2.0)]
        code, out, _ = run(capsys, "interp-failure", "--data", write_csv(tmp_path / "f.csv", rows), "--threshold", "10")
        assert out.splitlines() == ["unit_id,failure_time", "1,3780.373832", "2,not failed"]


class TestExportDensity:
    def _argmax(self, capsys, delta):
        code, out, _ = run(capsys, "export-density", "--delta", str(delta), "--omega", "0.5", "--lam", "1.5",
                           "--grid-points", "41", "--alpha-range", "0.1", "4", "--beta-range", "0.1", "4")
        assert code == 0
        arr = np.loadtxt(out.splitlines()[1:], delimiter=",")
        assert arr.shape == (41 * 41, 4)
        assert arr[:, 3].max() == 1.0
        return arr[np.argmax(arr[:, 2]), :2]

    def test_mode_invariant_in_delta(self, capsys):
        np.testing.assert_array_equal(self._argmax(capsys, 2), self._argmax(capsys, 5))

    def test_from_fit_params(self, capsys, tmp_path):
        code, out, _ = run(capsys, "fit", "--data", LASER, "--threshold", "10", "--draws", "100")
        p = tmp_path / "post.json"
        p.write_text(json.dumps(json.loads(out)["posterior"]))
        code, out, _ = run(capsys, "export-density", "--params", str(p), "--grid-points", "5",
                           "--alpha-range", "0.02", "0.05", "--beta-range", "10", "20")
        assert code == 0 and len(out.splitlines()) == 26

    def test_missing_args(self, capsys):
        assert run(capsys, "export-density", "--delta", "1")[0] == 2

    def test_bad_range(self, capsys):
        assert run(capsys, "export-density", "--delta", "1", "--omega", "1", "--lam", "2", "--alpha-range", "3", "1")[0] == 2


class TestSimulate:
    def test_tiny(self, capsys, tmp_path):
        cfg = tmp_path / "s.json"
        cfg.write_text(json.dumps({"N": 5, "deltas": [0], "samplers": ["sir"], "K": 100, "M": 1000}))
        assert run(capsys, "simulate", "--config", str(cfg), "--out", str(tmp_path / "o"), "--replications", "2",
                   "--workers", "1")[0] == 0
        doc = json.loads((tmp_path / "o" / "metrics.json").read_text())
        assert doc["scenario"]["N"] == 2
        assert (tmp_path / "o" / "table_fcp.csv").exists()

    def test_bad_config(self, capsys, tmp_path):
        cfg = tmp_path / "s.json"
        cfg.write_text(json.dumps({"samplers": ["mh"]}))
        assert run(capsys, "simulate", "--config", str(cfg), "--out", str(tmp_path))[0] == 2


def test_console_script_module():
    r = subprocess.run([sys.executable, "-m", "gammarul.cli", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("gammarul ")
