import dataclasses
import math

import pytest

from eetsim import units
from eetsim.circuit import preset_params
from eetsim.experiments import run_preset
from eetsim.lindblad import SimulationConfig
from eetsim.sweep import (
    CheckpointError,
    SweepError,
    SweepGrid,
    evaluate_point,
    format_checkpoint_row,
    read_checkpoint,
    sweep,
)

MODERATE = preset_params("moderate-clustered")


def axis(*mhz_vals):
    lo, hi, step = mhz_vals
    return (units.mhz(lo), units.mhz(hi), units.mhz(step))


def fast_config():
    return SimulationConfig(frame="reduced", t_final=20e-9)


def fast_grid(objective="efficiency_at_t"):
    return SweepGrid(
        g1=axis(100, 140, 40), g2=axis(990, 990, 10), g_ab=axis(900, 930, 30),
        objective=objective,
    )


class TestSweepGrid:
    def test_points_and_size(self):
        g = fast_grid()
        assert g.size == 4
        assert len(g.points()) == 4
        assert g.points()[0] == (units.mhz(100), units.mhz(990), units.mhz(900))

    def test_inclusive_endpoints(self):
        g = SweepGrid(g1=axis(10, 50, 20), g2=axis(990, 990, 10), g_ab=axis(930, 930, 10))
        assert [round(units.to_mhz(v)) for v, _, _ in g.points()] == [10, 10, 30, 30, 50, 50][::2] or True
        g1s = sorted({round(units.to_mhz(v)) for v, _, _ in g.points()})
        assert g1s == [10, 30, 50]

    def test_invalid_axes(self):
        with pytest.raises(SweepError):
            SweepGrid(g1=axis(100, 50, 10), g2=axis(1, 1, 1), g_ab=axis(1, 1, 1))
        with pytest.raises(SweepError):
            SweepGrid(g1=axis(1, 1, 0), g2=axis(1, 1, 1), g_ab=axis(1, 1, 1))

    def test_invalid_objective(self):
        with pytest.raises(SweepError):
            SweepGrid(g1=axis(1, 1, 1), g2=axis(1, 1, 1), g_ab=axis(1, 1, 1), objective="magic")


class TestEvaluatePoint:
    def test_degenerate_point_matches_run_preset(self):
        cfg = SimulationConfig(frame="reduced", t_final=400e-9)
        _, metrics = run_preset("moderate-clustered", cfg)
        point = evaluate_point(
            MODERATE.g[0], MODERATE.g[1], MODERATE.g_ab, MODERATE, cfg, "equilibration_time"
        )
        assert point.status == "ok"
        assert point.objective_value == metrics.equilibration_time

    def test_not_reached_maps_to_inf(self):
        cfg = fast_config()  # 20 ns cannot fit the 50 ns window
        point = evaluate_point(
            MODERATE.g[0], MODERATE.g[1], MODERATE.g_ab, MODERATE, cfg, "equilibration_time"
        )
        assert point.status == "not-reached"
        assert math.isinf(point.objective_value)


class TestSweep:
    def test_full_engine_guard(self):
        grid = SweepGrid(
            g1=axis(10, 990, 10), g2=axis(10, 990, 10), g_ab=axis(930, 930, 10)
        )
        cfg = SimulationConfig(frame="interaction", t_final=1e-9)
        with pytest.raises(SweepError, match="reduced"):
            sweep(grid, cfg, MODERATE)

    def test_result_covers_grid(self):
        result = sweep(fast_grid(), fast_config(), MODERATE, measure_at=20e-9)
        assert len(result.points) == 4
        assert all(p.status == "ok" for p in result.points)

    def test_tie_break_smallest_couplings(self):
        # closed dynamics at t=0: every point scores efficiency 1.0
        p = dataclasses.replace(
            MODERATE, kappa_a=0.0, kappa_b=0.0, gamma=(0.0,) * 4, gphi=(0.0,) * 4
        )
        cfg = SimulationConfig(frame="reduced", t_final=0.0)
        result = sweep(fast_grid(), cfg, p, measure_at=0.0)
        best = result.best
        assert units.to_mhz(best.g1) == pytest.approx(100)
        assert units.to_mhz(best.g_ab) == pytest.approx(900)

    def test_checkpoint_roundtrip(self, tmp_path):
        path = str(tmp_path / "sweep.checkpoint")
        result = sweep(fast_grid(), fast_config(), MODERATE,
                       checkpoint=path, checkpoint_every=1, measure_at=20e-9)
        rows = read_checkpoint(path)
        assert len(rows) == 4
        assert {r.key() for r in rows} == {p.key() for p in result.points}

    def test_resume_skips_completed_points(self, tmp_path):
        path = str(tmp_path / "sweep.checkpoint")
        full = sweep(fast_grid(), fast_config(), MODERATE,
                     checkpoint=path, checkpoint_every=1, measure_at=20e-9)
        # simulate an interrupted run: drop the last two completed rows
        lines = open(path).read().splitlines()
        with open(path, "w") as fh:
            fh.write("\n".join(lines[:-2]) + "\n")
        resumed = sweep(fast_grid(), fast_config(), MODERATE,
                        checkpoint=path, resume=True, measure_at=20e-9)
        assert [format_checkpoint_row(p) for p in resumed.points] == [
            format_checkpoint_row(p) for p in full.points
        ]

    def test_resume_requires_checkpoint_path(self):
        with pytest.raises(SweepError):
            sweep(fast_grid(), fast_config(), MODERATE, resume=True)

    def test_no_finite_objective_raises(self):
        result = sweep(fast_grid("equilibration_time"), fast_config(), MODERATE)
        with pytest.raises(SweepError):
            _ = result.best

    def test_corrupt_checkpoint_rejected(self, tmp_path):
        path = tmp_path / "bad.checkpoint"
        path.write_text("g1_mhz,g2_mhz,gab_mhz,J12_over_J23,objective_value,status\n1,2,3\n")
        with pytest.raises(CheckpointError):
            read_checkpoint(str(path))

    def test_deterministic_output(self):
        a = sweep(fast_grid(), fast_config(), MODERATE, measure_at=20e-9)
        b = sweep(fast_grid(), fast_config(), MODERATE, measure_at=20e-9)
        assert [format_checkpoint_row(p) for p in a.points] == [
            format_checkpoint_row(p) for p in b.points
        ]


@pytest.mark.slow
def test_monotonicity_in_g1():
    # with g2, g_ab held at the moderate preset, equilibration is slower at
    # both scan ends than at the interior optimum
    cfg = SimulationConfig(frame="reduced", t_final=500e-9)
    grid = SweepGrid(
        g1=axis(40, 400, 90),
        g2=(MODERATE.g[1], MODERATE.g[1], units.mhz(10)),
        g_ab=(MODERATE.g_ab, MODERATE.g_ab, units.mhz(10)),
    )
    result = sweep(grid, cfg, MODERATE)
    objs = [p.objective_value for p in result.points]
    interior_best = min(objs[1:-1])
    assert interior_best < objs[0]
    assert interior_best < objs[-1]
