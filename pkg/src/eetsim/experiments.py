"""Observables and transfer metrics for the energy-transfer experiments."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import CircuitParams, preset_params
from .hilbert import DenseOperator, HilbertLayout, projector
from .lindblad import (
    SimulationConfig,
    TrajectoryRecord,
    evolve,
    evolve_reduced,
    full_state_index,
)

DEFAULT_SPREAD_TOL = 0.02
DEFAULT_WINDOW = 50e-9


def projectors(layout: HilbertLayout) -> list[DenseOperator]:
    """Rank-1 projectors onto |1>..|4>, |a>, |b| in the canonical layout."""
    return [projector(layout, full_state_index(layout, lab)) for lab in ("1", "2", "3", "4", "a", "b")]


@dataclass(frozen=True)
class TransferMetrics:
    """Equilibration time (None when not reached), qubit-population
    efficiency, resonator-trapped population, and the acceptor peak."""

    equilibration_time: float | None
    efficiency: float
    trapped: float
    peak_P4: float
    measured_at: float

    def __post_init__(self):
        if self.efficiency + self.trapped > 1 + 1e-6:
            raise ValueError("efficiency + trapped exceeds unity")


def equilibration_time(
    traj: TrajectoryRecord,
    spread_tol: float = DEFAULT_SPREAD_TOL,
    window: float = DEFAULT_WINDOW,
) -> float | None:
    """Earliest sampled t whose qubit-population spread stays below
    spread_tol for the whole window [t, t + window]; None if never."""
    qpops = traj.populations[:, :4]
    spread = qpops.max(axis=1) - qpops.min(axis=1)
    ok = spread < spread_tol
    times = traj.times
    for k in range(len(times)):
        if times[k] + window > times[-1] + 1e-15:
            break
        stop = np.searchsorted(times, times[k] + window, side="right")
        if ok[k:stop].all():
            return float(times[k])
    return None


def compute_metrics(
    traj: TrajectoryRecord,
    spread_tol: float = DEFAULT_SPREAD_TOL,
    window: float = DEFAULT_WINDOW,
    measure_at: float | None = None,
) -> TransferMetrics:
    t_eq = equilibration_time(traj, spread_tol, window)
    if measure_at is None:
        measure_at = t_eq if t_eq is not None else float(traj.times[-1])
    k = int(np.argmin(np.abs(traj.times - measure_at)))
    return TransferMetrics(
        equilibration_time=t_eq,
        efficiency=float(traj.qubit_total[k]),
        trapped=float(traj.populations[k, 4] + traj.populations[k, 5]),
        peak_P4=float(traj.populations[:, 3].max()),
        measured_at=float(traj.times[k]),
    )


def run_simulation(p: CircuitParams, config: SimulationConfig) -> TrajectoryRecord:
    if config.frame == "reduced":
        return evolve_reduced(None, config, p)
    return evolve(None, config, p)


def run_preset(
    preset: str,
    config: SimulationConfig,
    spread_tol: float = DEFAULT_SPREAD_TOL,
    window: float = DEFAULT_WINDOW,
    measure_at: float | None = None,
) -> tuple[TrajectoryRecord, TransferMetrics]:
    """Trajectory plus metrics for a named geometry."""
    p = preset_params(preset)
    traj = run_simulation(p, config)
    return traj, compute_metrics(traj, spread_tol, window, measure_at)


def trapped_population(traj: TrajectoryRecord) -> tuple[np.ndarray, np.ndarray]:
    """Resonator population time series (P_a, P_b)."""
    return traj.pop("a"), traj.pop("b")


def linear_growth_fit(
    times: np.ndarray, series: np.ndarray, t_lo: float, t_hi: float
) -> tuple[float, float, float]:
    """(slope, intercept, R^2) of a straight-line fit over [t_lo, t_hi]."""
    mask = (times >= t_lo) & (times <= t_hi)
    if mask.sum() < 3:
        raise ValueError("fewer than three samples in the fit window")
    t, y = times[mask], series[mask]
    slope, intercept = np.polyfit(t, y, 1)
    resid = y - (slope * t + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def value_at(traj: TrajectoryRecord, series: np.ndarray, t: float) -> float:
    k = int(np.argmin(np.abs(traj.times - t)))
    return float(series[k])


def format_equilibration(t_eq: float | None) -> str:
    if t_eq is None or (isinstance(t_eq, float) and math.isnan(t_eq)):
        return "not-reached"
    return f"{t_eq * 1e9:.9e}"
