"""Batch command-line front-end.

Exit codes: 0 success, 2 physics or validation failure, 3 I/O failure.
"""

from __future__ import annotations

import dataclasses
import json
import math
import sys

import click

from . import _kernels, units
from .circuit import DispersiveError, effective_couplings
from .config import ConfigError, RunConfig, load_config
from .experiments import compute_metrics, run_simulation
from .lindblad import PhysicalityError, StepSizeError, TrajectoryRecord
from .sweep import CheckpointError, SweepError, SweepPoint, format_checkpoint_row
from .sweep import sweep as run_sweep
from .units import UnitError

EXIT_PHYSICS = 2
EXIT_IO = 3

_PHYSICS_ERRORS = (
    ConfigError, UnitError, PhysicalityError, StepSizeError, DispersiveError,
    SweepError, CheckpointError, ValueError,
)


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load(config_path: str, engine: str | None, frame: str | None) -> RunConfig:
    try:
        with open(config_path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        _fail(EXIT_IO, f"cannot read config: {exc}")
    from .config import parse_config

    cfg = parse_config(text)
    if engine:
        cfg = dataclasses.replace(cfg, engine=engine)
    if frame:
        cfg = dataclasses.replace(cfg, frame=frame, engine="full")
    return cfg


def _fmt(x: float) -> str:
    return f"{x:.8e}"


def _write_text(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        _fail(EXIT_IO, f"cannot write {path}: {exc}")


def _write_json(path: str, payload: dict) -> None:
    _write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _serialize_table(columns: tuple[str, ...], rows, fmt: str, config_hash: str) -> str:
    if fmt == "csv":
        lines = [f"# config-hash: {config_hash}", ",".join(columns)]
        lines += [",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row) for row in rows]
        return "\n".join(lines) + "\n"
    lines = [json.dumps({"config_hash": config_hash, "columns": list(columns)})]
    for row in rows:
        rec = {c: (float(_fmt(v)) if isinstance(v, float) else v) for c, v in zip(columns, row)}
        lines.append(json.dumps(rec))
    return "\n".join(lines) + "\n"


def _write_trajectory(path: str, traj: TrajectoryRecord, fmt: str, config_hash: str) -> None:
    rows = [tuple(float(v) for v in row) for row in traj.as_table()]
    _write_text(path, _serialize_table(TrajectoryRecord.COLUMNS, rows, fmt, config_hash))


def _write_meta(out: str, cfg: RunConfig) -> None:
    _write_json(out + ".meta.json", {
        "config_hash": cfg.config_hash(),
        "backend": _kernels.BACKEND,
        "resolved": cfg.resolved(),
    })


@click.group()
def main() -> None:
    """Simulate excitation-energy transfer in a four-qubit circuit."""


_config_opt = click.option("--config", "config_path", required=True, type=click.Path(), help="Run configuration file.")
_out_opt = click.option("--out", required=True, type=click.Path(), help="Output file path.")
_format_opt = click.option("--format", "fmt", default="csv", type=click.Choice(["csv", "jsonl"]), help="Output format.")
_engine_opt = click.option("--engine", default=None, type=click.Choice(["full", "reduced"]), help="Override the configured engine.")
_frame_opt = click.option("--frame", default=None, type=click.Choice(["lab", "interaction"]), help="Override the full-engine frame.")


@main.command()
@_config_opt
@_out_opt
@_format_opt
@_engine_opt
@_frame_opt
def simulate(config_path: str, out: str, fmt: str, engine: str | None, frame: str | None) -> None:
    """Integrate the master equation and write the population trajectory."""
    try:
        cfg = _load(config_path, engine, frame)
        traj = run_simulation(cfg.params, cfg.simulation_config())
        metrics = compute_metrics(traj, cfg.spread_tol, cfg.window, cfg.measure_at)
    except _PHYSICS_ERRORS as exc:
        _fail(EXIT_PHYSICS, str(exc))
    _write_trajectory(out, traj, fmt, cfg.config_hash())
    t_eq = metrics.equilibration_time
    _write_json(out + ".metrics.json", {
        "config_hash": cfg.config_hash(),
        "equilibration_time_ns": "not-reached" if t_eq is None else float(_fmt(t_eq * 1e9)),
        "efficiency": float(_fmt(metrics.efficiency)),
        "trapped": float(_fmt(metrics.trapped)),
        "peak_P4": float(_fmt(metrics.peak_P4)),
        "measured_at_ns": float(_fmt(metrics.measured_at * 1e9)),
    })
    _write_meta(out, cfg)
    click.echo(f"wrote {len(traj.times)} samples to {out}")


@main.command()
@_config_opt
def couplings(config_path: str) -> None:
    """Print the effective coupling table and the clustering ratio."""
    try:
        cfg = _load(config_path, None, None)
        table = effective_couplings(cfg.params)
    except _PHYSICS_ERRORS as exc:
        _fail(EXIT_PHYSICS, str(exc))
    for name in ("J12", "J34", "J23", "J13", "J24", "J14"):
        click.echo(f"{name}/2pi = {units.to_mhz(getattr(table, name)):.4f} MHz")
    for j, e in enumerate(table.eps, 1):
        click.echo(f"eps{j}/2pi = {units.to_ghz(e):.6f} GHz")
    click.echo(f"J12/J23 = {table.ratio:.4f}")
    verdict = "descending" if table.energy_ordered else "not descending"
    click.echo(f"energy ordering eps1 > eps2 > eps3 > eps4: {verdict}")


@main.command(name="sweep")
@_config_opt
@_out_opt
@_format_opt
@_engine_opt
@click.option("--workers", default=1, type=int, show_default=True, help="Parallel worker processes.")
@click.option("--resume", is_flag=True, help="Continue from the checkpoint next to --out.")
def sweep_cmd(config_path: str, out: str, fmt: str, engine: str | None, workers: int, resume: bool) -> None:
    """Scan (g1=g4, g2=g3, g_ab) and report the best point."""
    checkpoint = out + ".checkpoint"
    try:
        cfg = _load(config_path, engine, None)
        grid = cfg.sweep_grid()
        result = run_sweep(
            grid, cfg.simulation_config(), cfg.params,
            workers=workers, checkpoint=checkpoint, resume=resume,
            checkpoint_every=cfg.checkpoint_every, measure_at=cfg.measure_at,
        )
        best = result.best
    except _PHYSICS_ERRORS as exc:
        _fail(EXIT_PHYSICS, str(exc))

    def row(p: SweepPoint) -> tuple:
        return tuple(format_checkpoint_row(p).split(","))

    columns = ("g1_mhz", "g2_mhz", "gab_mhz", "J12_over_J23", "objective_value", "status")
    _write_text(out, _serialize_table(columns, [row(p) for p in result.points], fmt, cfg.config_hash()))
    _write_json(out + ".best.json", {
        "config_hash": cfg.config_hash(),
        "objective": grid.objective,
        "g1_mhz": float(_fmt(units.to_mhz(best.g1))),
        "g2_mhz": float(_fmt(units.to_mhz(best.g2))),
        "gab_mhz": float(_fmt(units.to_mhz(best.g_ab))),
        "J12_over_J23": float(_fmt(best.ratio)),
        "objective_value": "inf" if math.isinf(best.objective_value) else float(_fmt(best.objective_value)),
        "status": best.status,
    })
    _write_meta(out, cfg)
    click.echo(
        f"best point: g1 = {units.to_mhz(best.g1):.1f} MHz, g2 = {units.to_mhz(best.g2):.1f} MHz, "
        f"g_ab = {units.to_mhz(best.g_ab):.1f} MHz, J12/J23 = {best.ratio:.4f}"
    )


@main.command(name="compare-frames")
@_config_opt
def compare_frames(config_path: str) -> None:
    """Run the full engine in both frames and check they agree."""
    try:
        cfg = _load(config_path, "full", None)
        lab = run_simulation(cfg.params, dataclasses.replace(cfg.simulation_config(), frame="lab"))
        rot = run_simulation(cfg.params, dataclasses.replace(cfg.simulation_config(), frame="interaction"))
    except _PHYSICS_ERRORS as exc:
        _fail(EXIT_PHYSICS, str(exc))
    n = min(len(lab.times), len(rot.times))
    dev = float(abs(lab.populations[:n] - rot.populations[:n]).max())
    click.echo(f"max population deviation over {lab.times[n - 1] * 1e9:.1f} ns: {dev:.3e}")
    if dev >= 5e-4:
        _fail(EXIT_PHYSICS, f"frames disagree by {dev:.3e} >= 5e-4")


if __name__ == "__main__":
    main()
