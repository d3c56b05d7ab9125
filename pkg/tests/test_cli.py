import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from thzrelay.cli import ConfigError, main, parse_config
from thzrelay.cli.config import Scenario, SweepSpec, parse_grid
from thzrelay.cli.output import render
from thzrelay.cli.sweep import COLUMNS, run_sweep
from thzrelay.cli.validate import format_report, run_validate

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

FAST = """
[scenario]
gamma_bar_db = 20
distance = 80
[hop1]
alpha = 2
mu = 3
phi = 2.0437
[hop2]
alpha = 2
mu = 3
phi = 2.0437
"""


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, text, name="c.ini"):
    p = tmp_path / name
    p.write_text(text)
    return p


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestConfig:
    def test_defaults(self):
        sc, sw = parse_config("")
        assert sc == Scenario() and sw is None

    @pytest.mark.parametrize("raw, grid", [
        ("0:40:10", (0.0, 10.0, 20.0, 30.0, 40.0)),
        ("1, 2.5, 4", (1.0, 2.5, 4.0)),
        ("50:150:25", (50.0, 75.0, 100.0, 125.0, 150.0)),
        ("0:1:0.1", tuple(np.round(np.arange(11) * 0.1, 12))),
    ])
    def test_grid(self, raw, grid):
        assert parse_grid(raw) == pytest.approx(grid)

    def test_db_and_linear(self):
        sc, _ = parse_config("[scenario]\ngamma_bar = 100\ngamma_th_db = 3\n")
        assert sc.gamma_bar_db == pytest.approx(20.0) and sc.gamma_th_db == 3.0

    def test_relay_and_modulation(self):
        sc, _ = parse_config("[relay]\nk = 3\nscheme = brs\n[modulation]\nlabel = DPSK\n")
        assert sc.K == 3 and sc.scheme == "BRS" and sc.modulation.label == "DPSK"

    def test_h_l_override(self):
        sc, _ = parse_config("[hop1]\nh_l = 0.5\n")
        assert sc.dual_hop().hop1.h_l == 0.5

    def test_distance_split(self):
        sc, _ = parse_config("[scenario]\ndistance = 100\nd1 = 30\n")
        assert sc.hop_distances() == (30.0, 50.0)

    @pytest.mark.parametrize("text", [
        "[bogus]\nx = 1\n",
        "[scenario]\nfoo = 1\n",
        "[scenario]\ngamma_bar = 10\ngamma_bar_db = 10\n",
        "[scenario]\ngamma_bar = -1\n",
        "[scenario]\nc = -1\n",
        "[scenario]\ndistance = 0\n",
        "[scenario]\nperturb_degenerate = maybe\n",
        "[hop1]\nalpha = -2\n",
        "[hop1]\nphi = abc\n",
        "[relay]\nk = 0\n",
        "[relay]\nk = two\n",
        "[relay]\nscheme = MRC\n",
        "[modulation]\nlabel = BPSK\np = 1\n",
        "[modulation]\nm = 1\n",
        "[sweep]\naxis = gamma_bar_db\ngrid = 0:10:5\n",
        "[sweep]\naxis = power\ngrid = 0:10:5\nmetrics = op\n",
        "[sweep]\naxis = gamma_bar_db\ngrid = 10, 0\nmetrics = op\n",
        "[sweep]\naxis = gamma_bar_db\ngrid = 0:10:5\nmetrics = op, nope\n",
        "[sweep]\naxis = gamma_bar_db\ngrid = 0:10:0\nmetrics = op\n",
        "not an ini file",
    ])
    def test_errors(self, text):
        with pytest.raises(ConfigError):
            parse_config(text)

    def test_at_k(self):
        with pytest.raises(ConfigError):
            Scenario().at("K", 1.5)
        assert Scenario().at("K", 3).K == 3


class TestExitCodes:
    def test_config_error(self, tmp_path, capsys):
        code, _, err = run(["sweep", "--config", write(tmp_path, "[scenario]\nfoo=1\n")], capsys)
        assert code == 1 and "foo" in err

    def test_missing_file(self, tmp_path, capsys):
        assert run(["sweep", "--config", tmp_path / "none.ini"], capsys)[0] == 1

    def test_sweep_needs_section(self, capsys):
        assert run(["sweep"], capsys)[0] == 1

    @pytest.mark.parametrize("flag", [["--seed", "-1"], ["--samples", "0"], ["--jobs", "0"]])
    def test_bad_flags(self, flag, capsys):
        assert run(["mc", *flag], capsys)[0] == 1

    def test_degenerate(self, capsys):
        code, out, _ = run(["sweep", "--config", CONFIGS / "degenerate.ini"], capsys)
        rows = rows_of(out)
        assert code == 2
        assert {r["status"] for r in rows if r["metric"] == "op_asym"} == {"degenerate"}
        assert {r["status"] for r in rows if r["metric"] == "op"} == {"ok"}
        assert all(r["value"] == "nan" for r in rows if r["status"] == "degenerate")

    def test_perturbed(self, tmp_path, capsys):
        text = (CONFIGS / "degenerate.ini").read_text().replace("= false", "= true")
        code, out, _ = run(["sweep", "--config", write(tmp_path, text)], capsys)
        assert code == 0
        assert {r["status"] for r in rows_of(out) if r["metric"] == "op_asym"} == {"perturbed"}


class TestSweep:
    def test_outage_vs_snr_recipe(self, capsys):
        code, out, _ = run(["sweep", "--config", CONFIGS / "outage_vs_snr.ini",
                            "--samples", 10**6, "--seed", 4], capsys)
        assert code == 0
        rows = rows_of(out)
        assert list(rows[0]) == list(COLUMNS)
        op = [float(r["value"]) for r in rows if r["metric"] == "op"]
        mc = [float(r["value"]) for r in rows if r["metric"] == "mc_op"]
        assert len(op) == len(mc) == 9
        assert np.all(np.diff(op) < 0) and np.all(np.diff(mc) <= 0)
        assert np.max(np.abs(np.array(op) - mc)) <= 0.003
        assert {r["method"] for r in rows} == {"exact", "asymptotic", "mc"}
        assert all(r["stderr"] == "" for r in rows if r["method"] != "mc")

    def test_capacity_vs_distance_recipe(self, capsys):
        code, out, _ = run(["sweep", "--config", CONFIGS / "capacity_vs_distance.ini"], capsys)
        acc = [float(r["value"]) for r in rows_of(out)]
        assert code == 0 and len(acc) == 5 and np.all(np.diff(acc) < 0)

    def test_deterministic_and_jobs(self, tmp_path, capsys):
        args = ["sweep", "--config", CONFIGS / "multirelay_k2.ini", "--samples", 3 * 10**5]
        outs = [run(args + extra, capsys)[1] for extra in ([], [], ["--jobs", "3"])]
        assert outs[0] == outs[1] == outs[2]

    def test_json(self, tmp_path, capsys):
        out_path = tmp_path / "o.json"
        code, out, _ = run(["sweep", "--config", CONFIGS / "degenerate.ini", "--format", "json",
                            "--out", out_path], capsys)
        data = json.loads(out_path.read_text())
        assert out == "" and code == 2
        assert all(list(d) == list(COLUMNS) for d in data)
        assert any(d["value"] is None for d in data)

    def test_k_axis(self):
        sc, _ = parse_config((CONFIGS / "multirelay_k2.ini").read_text())
        rows = run_sweep(SweepSpec("K", (1.0, 2.0, 3.0), ("ser_arp", "ser_brs"), sc))
        v = {(r.axis_value, r.metric): r.value for r in rows}
        assert v[(1.0, "ser_arp")] == pytest.approx(v[(1.0, "ser_brs")])
        assert v[(3.0, "ser_brs")] < v[(3.0, "ser_arp")] < v[(1.0, "ser_arp")]

    def test_error_isolation(self):
        sc = Scenario()
        rows = run_sweep(SweepSpec("K", (1.0, 1.5), ("ser_arp",), sc))
        assert [r.status for r in rows] == ["ok", "error"]

    def test_render_unknown(self):
        with pytest.raises(ValueError):
            render([], "xml")


class TestMc:
    def test_mc_rows(self, capsys):
        code, out, _ = run(["mc", "--samples", 10**5], capsys)
        rows = rows_of(out)
        assert code == 0 and [r["metric"] for r in rows] == ["mc_acc", "mc_ber", "mc_op"]
        assert all(float(r["stderr"]) > 0 for r in rows)


class TestValidate:
    def test_fast_scenario(self, tmp_path, capsys):
        code, out, _ = run(["validate", "--config", write(tmp_path, FAST),
                            "--samples", 10**6], capsys)
        assert code == 0, out
        assert out.count("\tPASS\t") == 8 and out.endswith("# 8/8 checks passed\n")

    def test_corrupted_coefficient(self, tmp_path, capsys):
        code, out, _ = run(["validate", "--config", write(tmp_path, FAST), "--samples", 10**6,
                            "--corrupt-coefficient", 1.05], capsys)
        assert code == 3
        failed = {l.split("\t")[0] for l in out.splitlines() if "\tFAIL\t" in l}
        assert {"hop_sampler_ks", "op_exact_vs_mc"} <= failed

    def test_crash_becomes_fail(self):
        sc, _ = parse_config(FAST)
        checks = run_validate(sc, 0, 1, 1.0)  # n = 1 breaks the standard-error checks
        report = format_report(checks)
        assert "FAIL" in report and report.endswith("checks passed\n")

    @pytest.mark.slow
    def test_k2_scenario(self, tmp_path, capsys):
        text = (CONFIGS / "multirelay_k2.ini").read_text()
        code, out, _ = run(["validate", "--config", write(tmp_path, text)], capsys)
        for name in ("ser_ratio_identity", "mc_ser_slope_arp", "mc_ser_slope_brs",
                     "mc_ser_brs_below_arp"):
            assert f"{name}\tPASS" in out, out
        assert code == 0, out


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "thzrelay.cli", "--help"], capture_output=True,
                       text=True)
    assert r.returncode == 0 and "sweep" in r.stdout
