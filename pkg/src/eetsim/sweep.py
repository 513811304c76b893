"""Coupling-strength sweep: grid over (g1 = g4, g2 = g3, g_ab) with
checkpointed, optionally parallel evaluation of a transfer objective."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import units
from .circuit import CircuitParams, custom_params, effective_couplings, preset_params
from .experiments import DEFAULT_SPREAD_TOL, DEFAULT_WINDOW, compute_metrics, run_simulation
from .lindblad import PhysicalityError, SimulationConfig, StepSizeError

OBJECTIVES = ("equilibration_time", "efficiency_at_t")
FULL_ENGINE_MAX_POINTS = 1000
CHECKPOINT_COLUMNS = ("g1_mhz", "g2_mhz", "gab_mhz", "J12_over_J23", "objective_value", "status")


class SweepError(ValueError):
    pass


class CheckpointError(RuntimeError):
    """Malformed or inconsistent checkpoint file."""


@dataclass(frozen=True)
class SweepGrid:
    """Inclusive (min, max, step) axes in rad/s; g1 drives g4 and g2 drives g3."""

    g1: tuple[float, float, float]
    g2: tuple[float, float, float]
    g_ab: tuple[float, float, float]
    objective: str = "equilibration_time"

    def __post_init__(self):
        for name, (lo, hi, step) in (("g1", self.g1), ("g2", self.g2), ("g_ab", self.g_ab)):
            if step <= 0:
                raise SweepError(f"{name} step must be > 0")
            if lo > hi:
                raise SweepError(f"{name} min exceeds max")
            if lo < 0:
                raise SweepError(f"{name} min must be >= 0")
        if self.objective not in OBJECTIVES:
            raise SweepError(f"objective must be one of {OBJECTIVES}")

    @staticmethod
    def _axis(spec: tuple[float, float, float]) -> list[float]:
        lo, hi, step = spec
        n = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return [lo + k * step for k in range(n)]

    def points(self) -> list[tuple[float, float, float]]:
        """All (g1, g2, g_ab) combinations, lexicographically ordered."""
        return [
            (a, b, c)
            for a in self._axis(self.g1)
            for b in self._axis(self.g2)
            for c in self._axis(self.g_ab)
        ]

    @property
    def size(self) -> int:
        return len(self._axis(self.g1)) * len(self._axis(self.g2)) * len(self._axis(self.g_ab))


@dataclass(frozen=True)
class SweepPoint:
    g1: float
    g2: float
    g_ab: float
    ratio: float
    objective_value: float  # inf when the objective is undefined at this point
    status: str  # ok | not-reached | error

    def key(self) -> tuple[float, float, float]:
        return _point_key(self.g1, self.g2, self.g_ab)


@dataclass
class SweepResult:
    grid: SweepGrid
    points: list[SweepPoint] = field(default_factory=list)

    @property
    def best(self) -> SweepPoint:
        """Argbest under the grid's objective; ties resolve to the smallest
        g1, then g2, then g_ab."""
        usable = [p for p in self.points if p.status != "error" and math.isfinite(p.objective_value)]
        if not usable:
            raise SweepError("no sweep point produced a finite objective")
        sign = 1.0 if self.grid.objective == "equilibration_time" else -1.0
        return min(usable, key=lambda p: (sign * p.objective_value, p.g1, p.g2, p.g_ab))


def _point_key(g1: float, g2: float, g_ab: float) -> tuple[float, float, float]:
    return (round(units.to_mhz(g1), 6), round(units.to_mhz(g2), 6), round(units.to_mhz(g_ab), 6))


def evaluate_point(
    g1: float,
    g2: float,
    g_ab: float,
    base: CircuitParams,
    config: SimulationConfig,
    objective: str,
    measure_at: float | None = None,
    spread_tol: float = DEFAULT_SPREAD_TOL,
    window: float = DEFAULT_WINDOW,
) -> SweepPoint:
    """Run one grid point and score it.  Engine-level physics failures are
    recorded as status=error instead of aborting the whole sweep."""
    p = custom_params(g1, g2, g_ab, base)
    ratio = effective_couplings(p).ratio
    try:
        traj = run_simulation(p, config)
        metrics = compute_metrics(traj, spread_tol, window, measure_at)
    except (PhysicalityError, StepSizeError, ValueError):
        return SweepPoint(g1, g2, g_ab, ratio, math.inf, "error")
    if objective == "equilibration_time":
        if metrics.equilibration_time is None:
            return SweepPoint(g1, g2, g_ab, ratio, math.inf, "not-reached")
        return SweepPoint(g1, g2, g_ab, ratio, metrics.equilibration_time, "ok")
    return SweepPoint(g1, g2, g_ab, ratio, metrics.efficiency, "ok")


def _evaluate_star(args) -> SweepPoint:
    return evaluate_point(*args)


def format_checkpoint_row(p: SweepPoint) -> str:
    obj = "inf" if not math.isfinite(p.objective_value) else f"{p.objective_value:.8e}"
    return ",".join(
        [
            f"{units.to_mhz(p.g1):.8e}",
            f"{units.to_mhz(p.g2):.8e}",
            f"{units.to_mhz(p.g_ab):.8e}",
            f"{p.ratio:.8e}",
            obj,
            p.status,
        ]
    )


def read_checkpoint(path: str) -> list[SweepPoint]:
    points: list[SweepPoint] = []
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    if not lines:
        return points
    if lines[0] != ",".join(CHECKPOINT_COLUMNS):
        raise CheckpointError(f"unexpected checkpoint header in {path}")
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != len(CHECKPOINT_COLUMNS):
            raise CheckpointError(f"malformed checkpoint row: {ln!r}")
        g1, g2, gab, ratio = (float(x) for x in parts[:4])
        obj = math.inf if parts[4] == "inf" else float(parts[4])
        status = parts[5]
        if status not in ("ok", "not-reached", "error"):
            raise CheckpointError(f"unknown status {status!r} in checkpoint")
        points.append(SweepPoint(units.mhz(g1), units.mhz(g2), units.mhz(gab), ratio, obj, status))
    return points


def sweep(
    grid: SweepGrid,
    config: SimulationConfig,
    base: CircuitParams | None = None,
    workers: int = 1,
    checkpoint: str | None = None,
    resume: bool = False,
    checkpoint_every: int = 10,
    measure_at: float | None = None,
) -> SweepResult:
    """Evaluate the objective over the whole grid.

    With a checkpoint path, completed rows are flushed every
    checkpoint_every points; resume=True skips points already present.
    The full-space engine is refused above FULL_ENGINE_MAX_POINTS.
    """
    if base is None:
        base = preset_params("moderate-clustered")
    if config.frame != "reduced" and grid.size > FULL_ENGINE_MAX_POINTS:
        raise SweepError(
            f"{grid.size} grid points with the full-space engine; use frame='reduced' "
            f"or shrink the grid below {FULL_ENGINE_MAX_POINTS} points"
        )
    if workers < 1:
        raise SweepError("workers must be >= 1")

    done: dict[tuple[float, float, float], SweepPoint] = {}
    if resume:
        if not checkpoint:
            raise SweepError("resume requires a checkpoint path")
        if os.path.exists(checkpoint):
            for p in read_checkpoint(checkpoint):
                done[p.key()] = p

    all_points = grid.points()
    todo = [pt for pt in all_points if _point_key(*pt) not in done]
    results: dict[tuple[float, float, float], SweepPoint] = dict(done)
    pending_rows: list[SweepPoint] = []

    fh = None
    if checkpoint:
        fresh = not (resume and os.path.exists(checkpoint) and done)
        fh = open(checkpoint, "w" if fresh else "a", encoding="utf-8", newline="\n")
        if fresh:
            fh.write("# coupling-sweep checkpoint\n")
            fh.write(",".join(CHECKPOINT_COLUMNS) + "\n")
            for p in done.values():
                fh.write(format_checkpoint_row(p) + "\n")
            fh.flush()

    def collect(point: SweepPoint) -> None:
        results[point.key()] = point
        if fh is None:
            return
        pending_rows.append(point)
        if len(pending_rows) >= checkpoint_every:
            flush()

    def flush() -> None:
        for p in pending_rows:
            fh.write(format_checkpoint_row(p) + "\n")
        pending_rows.clear()
        fh.flush()

    args = [(g1, g2, gab, base, config, grid.objective, measure_at) for g1, g2, gab in todo]
    try:
        if workers == 1 or len(todo) <= 1:
            for a in args:
                collect(_evaluate_star(a))
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for point in pool.map(_evaluate_star, args):
                    collect(point)
    finally:
        if fh is not None:
            flush()
            fh.close()

    ordered = [results[_point_key(*pt)] for pt in all_points]
    return SweepResult(grid, ordered)
