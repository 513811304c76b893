import json

import pytest
from click.testing import CliRunner

from eetsim.cli import main

BASE = "preset = moderate-clustered\n"


@pytest.fixture
def runner():
    return CliRunner()


def write_cfg(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def output_of(result):
    err = getattr(result, "stderr", "") or ""
    return result.output + err


class TestSimulate:
    def test_zero_horizon_single_row(self, runner, tmp_path):
        cfg = write_cfg(tmp_path, BASE + "t_final = 0 ns\n")
        out = str(tmp_path / "traj.csv")
        result = runner.invoke(main, ["simulate", "--config", cfg, "--out", out])
        assert result.exit_code == 0, output_of(result)
        lines = open(out).read().splitlines()
        assert lines[0].startswith("# config-hash: ")
        assert lines[1] == "time_ns,P1,P2,P3,P4,Pa,Pb,trace,purity"
        assert len(lines) == 3
        row = [float(x) for x in lines[2].split(",")]
        assert row[0] == 0.0
        assert row[1] == pytest.approx(1.0)
        assert row[2:7] == [0.0] * 5
        assert row[7] == pytest.approx(1.0)

    def test_sidecar_files(self, runner, tmp_path):
        cfg = write_cfg(tmp_path, BASE + "t_final = 5 ns\n")
        out = str(tmp_path / "traj.csv")
        result = runner.invoke(main, ["simulate", "--config", cfg, "--out", out])
        assert result.exit_code == 0, output_of(result)
        metrics = json.load(open(out + ".metrics.json"))
        assert metrics["equilibration_time_ns"] == "not-reached"
        assert 0.0 <= metrics["efficiency"] <= 1.0
        meta = json.load(open(out + ".meta.json"))
        assert meta["config_hash"] == metrics["config_hash"]
        assert meta["backend"] in ("numba", "numpy")
        assert meta["resolved"]["preset"] == "moderate-clustered"

    def test_jsonl_format(self, runner, tmp_path):
        cfg = write_cfg(tmp_path, BASE + "t_final = 0 ns\n")
        out = str(tmp_path / "traj.jsonl")
        result = runner.invoke(
            main, ["simulate", "--config", cfg, "--out", out, "--format", "jsonl"]
        )
        assert result.exit_code == 0, output_of(result)
        lines = [json.loads(ln) for ln in open(out).read().splitlines()]
        assert lines[0]["columns"][0] == "time_ns"
        assert lines[1]["P1"] == pytest.approx(1.0)

    def test_byte_identical_reruns(self, runner, tmp_path):
        cfg = write_cfg(tmp_path, BASE + "t_final = 5 ns\n")
        outs = []
        for name in ("a.csv", "b.csv"):
            out = str(tmp_path / name)
            result = runner.invoke(main, ["simulate", "--config", cfg, "--out", out])
            assert result.exit_code == 0, output_of(result)
            outs.append(open(out, "rb").read())
        assert outs[0] == outs[1]

    def test_bad_config_exits_2(self, runner, tmp_path):
        cfg = write_cfg(tmp_path, BASE + "tfinal = 5 ns\n")
        result = runner.invoke(
            main, ["simulate", "--config", cfg, "--out", str(tmp_path / "x.csv")]
        )
        assert result.exit_code == 2
        assert "t_final" in output_of(result)

    def test_unwritable_out_exits_3(self, runner, tmp_path):
        cfg = write_cfg(tmp_path, BASE + "t_final = 0 ns\n")
        out = str(tmp_path / "no-such-dir" / "traj.csv")
        result = runner.invoke(main, ["simulate", "--config", cfg, "--out", out])
        assert result.exit_code == 3

    def test_missing_config_exits_3(self, runner, tmp_path):
        result = runner.invoke(
            main,
            ["simulate", "--config", str(tmp_path / "ghost.cfg"),
             "--out", str(tmp_path / "x.csv")],
        )
        assert result.exit_code == 3


class TestCouplings:
    def test_moderate_table(self, runner, tmp_path):
        cfg = write_cfg(tmp_path, BASE)
        result = runner.invoke(main, ["couplings", "--config", cfg])
        assert result.exit_code == 0, output_of(result)
        assert "J12/2pi = 11.8071 MHz" in result.output
        assert "J12/J23 = 1.2954" in result.output
        assert "descending" in result.output

    def test_dispersive_violation_exits_2(self, runner, tmp_path):
        text = (
            "omega_a = 3.0 GHz\nomega_b = 3.0 GHz\n"
            "omega1 = 13.115 GHz\nomega2 = 13.009 GHz\n"
            "omega3 = 12.991 GHz\nomega4 = 13.078 GHz\n"
            "g1 = 120 MHz\ng2 = 5000 MHz\ng3 = 990 MHz\ng4 = 120 MHz\n"
            "g_ab = 930 MHz\n"
        )
        cfg = write_cfg(tmp_path, text)
        result = runner.invoke(main, ["couplings", "--config", cfg])
        assert result.exit_code == 2


class TestCompareFrames:
    def test_short_horizon_agrees(self, runner, tmp_path):
        cfg = write_cfg(tmp_path, BASE + "t_final = 1 ns\nn_max = 1\n")
        result = runner.invoke(main, ["compare-frames", "--config", cfg])
        assert result.exit_code == 0, output_of(result)
        assert "max population deviation" in result.output


SWEEP_CFG = (
    BASE
    + "t_final = 20 ns\n"
    + "measure_at = 20 ns\n"
    + "objective = efficiency_at_t\n"
    + "sweep_g1 = 100:140:40 MHz\n"
    + "sweep_g2 = 990:990:10 MHz\n"
    + "sweep_gab = 900:930:30 MHz\n"
    + "checkpoint_every = 1\n"
)


class TestSweep:
    def test_grid_scan_outputs(self, runner, tmp_path):
        cfg = write_cfg(tmp_path, SWEEP_CFG)
        out = str(tmp_path / "scan.csv")
        result = runner.invoke(main, ["sweep", "--config", cfg, "--out", out])
        assert result.exit_code == 0, output_of(result)
        lines = open(out).read().splitlines()
        assert lines[1] == "g1_mhz,g2_mhz,gab_mhz,J12_over_J23,objective_value,status"
        assert len(lines) == 2 + 4  # hash comment + header + 2*1*2 grid points
        best = json.load(open(out + ".best.json"))
        assert best["objective"] == "efficiency_at_t"
        assert best["status"] == "ok"
        assert "best point" in result.output
        assert (tmp_path / "scan.csv.checkpoint").exists()

    def test_resume_reproduces_table(self, runner, tmp_path):
        cfg = write_cfg(tmp_path, SWEEP_CFG)
        out = str(tmp_path / "scan.csv")
        result = runner.invoke(main, ["sweep", "--config", cfg, "--out", out])
        assert result.exit_code == 0, output_of(result)
        first = open(out, "rb").read()
        result = runner.invoke(main, ["sweep", "--config", cfg, "--out", out, "--resume"])
        assert result.exit_code == 0, output_of(result)
        assert open(out, "rb").read() == first

    def test_missing_axes_exit_2(self, runner, tmp_path):
        cfg = write_cfg(tmp_path, BASE)
        result = runner.invoke(
            main, ["sweep", "--config", cfg, "--out", str(tmp_path / "s.csv")]
        )
        assert result.exit_code == 2
        assert "sweep" in output_of(result)
