"""Flat key-value run configuration with mandatory unit suffixes.

Format: one ``key = value`` per line, ``#`` comments, optional double
quotes around values.  Dimensioned scalars must carry a unit suffix
("120 MHz", "250 ns", "20 mK"); a bare number for such a key is fatal.
"""

from __future__ import annotations

import difflib
import hashlib
import json
from dataclasses import dataclass, field

from . import units
from .circuit import (
    DEFAULT_KAPPA_INV,
    DEFAULT_T1,
    DEFAULT_TEMPERATURE,
    DEFAULT_TPHI,
    PRESETS,
    CircuitParams,
    effective_couplings,
    preset_params,
)
from .lindblad import SimulationConfig, _DEFAULT_DT
from .sweep import OBJECTIVES, SweepGrid
from .units import UnitError


class ConfigError(ValueError):
    pass


_FREQ_KEYS = ("omega_a", "omega_b", "omega1", "omega2", "omega3", "omega4",
              "g1", "g2", "g3", "g4", "g_ab")
_TIME_KEYS = ("t1", "tphi", "kappa_inv", "t_final", "dt", "measure_at", "window")
_SWEEP_KEYS = ("sweep_g1", "sweep_g2", "sweep_gab")
_PARAM_KEYS = set(_FREQ_KEYS)

KNOWN_KEYS = (
    ("preset",) + _FREQ_KEYS + _TIME_KEYS + _SWEEP_KEYS
    + ("temperature", "engine", "frame", "n_max", "record_stride",
       "initial_state", "qubit_occupation", "objective", "checkpoint_every",
       "spread_tol")
)


def _parse_lines(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
            value = value[1:-1]
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _reject_unknown(key: str) -> None:
    if key in KNOWN_KEYS:
        return
    hint = difflib.get_close_matches(key, KNOWN_KEYS, n=1)
    suffix = f"; did you mean {hint[0]!r}?" if hint else ""
    raise ConfigError(f"unknown key {key!r}{suffix}")


def _parse_axis(value: str, key: str) -> tuple[float, float, float]:
    """``"80:240:40 MHz"`` -> inclusive (min, max, step) in rad/s."""
    parts = value.rsplit(None, 1)
    if len(parts) != 2:
        raise ConfigError(f"field {key!r}: expected 'min:max:step UNIT', got {value!r}")
    nums, unit = parts
    pieces = nums.split(":")
    if len(pieces) != 3:
        raise ConfigError(f"field {key!r}: expected three ':'-separated numbers")
    try:
        return tuple(units.parse_quantity(f"{p} {unit}", "frequency", key) for p in pieces)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run description: circuit, engine and sweep settings."""

    params: CircuitParams
    preset: str | None
    engine: str = "reduced"  # full | reduced
    frame: str = "interaction"  # lab | interaction (full engine only)
    n_max: int = 2
    t_final: float = 250e-9
    dt: float | None = None
    record_stride: int | None = None
    initial_state: str = "1"
    qubit_occupation: str = "as-printed"
    spread_tol: float = 0.02
    window: float = 50e-9
    measure_at: float | None = None
    sweep_axes: dict[str, tuple[float, float, float]] = field(default_factory=dict)
    objective: str = "equilibration_time"
    checkpoint_every: int = 10

    def simulation_config(self) -> SimulationConfig:
        frame = "reduced" if self.engine == "reduced" else self.frame
        return SimulationConfig(
            frame=frame,
            n_max=self.n_max,
            t_final=self.t_final,
            dt=self.dt,
            record_stride=self.record_stride,
            initial_state=self.initial_state,
            qubit_occupation=self.qubit_occupation,
        )

    def sweep_grid(self) -> SweepGrid:
        missing = [k for k in _SWEEP_KEYS if k not in self.sweep_axes]
        if missing:
            raise ConfigError(f"sweep requires {', '.join(missing)}")
        return SweepGrid(
            g1=self.sweep_axes["sweep_g1"],
            g2=self.sweep_axes["sweep_g2"],
            g_ab=self.sweep_axes["sweep_gab"],
            objective=self.objective,
        )

    def resolved(self) -> dict:
        """Human-unit echo of every effective setting, plus the derived
        detunings and coupling table."""
        p = self.params
        table = effective_couplings(p)
        out = {
            "preset": self.preset,
            "omega_a_ghz": units.to_ghz(p.omega_a),
            "omega_b_ghz": units.to_ghz(p.omega_b),
            "omega_ghz": [units.to_ghz(w) for w in p.omega],
            "g_mhz": [units.to_mhz(g) for g in p.g],
            "g_ab_mhz": units.to_mhz(p.g_ab),
            "t1_us": 1e6 / p.gamma[0] if p.gamma[0] else None,
            "tphi_ns": 0.5e9 / p.gphi[0] if p.gphi[0] else None,
            "kappa_inv_us": 1e6 / p.kappa_a if p.kappa_a else None,
            "temperature_mk": p.temperature * 1e3,
            "delta_ghz": [units.to_ghz(d) for d in p.deltas],
            "couplings_mhz": {
                name: units.to_mhz(getattr(table, name))
                for name in ("J12", "J34", "J23", "J13", "J24", "J14")
            },
            "eps_ghz": [units.to_ghz(e) for e in table.eps],
            "J12_over_J23": table.ratio,
            "engine": self.engine,
            "frame": "reduced" if self.engine == "reduced" else self.frame,
            "n_max": self.n_max,
            "t_final_ns": self.t_final * 1e9,
            "dt_ps": (self.dt if self.dt is not None
                      else _DEFAULT_DT["reduced" if self.engine == "reduced" else self.frame]) * 1e12,
            "record_stride": self.simulation_config().resolved_stride(),
            "initial_state": self.initial_state,
            "qubit_occupation": self.qubit_occupation,
            "spread_tol": self.spread_tol,
            "window_ns": self.window * 1e9,
            "measure_at_ns": self.measure_at * 1e9 if self.measure_at is not None else None,
            "objective": self.objective,
        }
        if self.sweep_axes:
            out["sweep_axes_mhz"] = {
                k: [units.to_mhz(x) for x in v] for k, v in self.sweep_axes.items()
            }
            out["checkpoint_every"] = self.checkpoint_every
        return out

    def config_hash(self) -> str:
        blob = json.dumps(self.resolved(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _build_params(raw: dict[str, str]) -> tuple[CircuitParams, str | None]:
    preset = raw.pop("preset", None)
    explicit = sorted(k for k in raw if k in _PARAM_KEYS)
    if preset is not None and explicit:
        raise ConfigError(
            f"preset and explicit circuit parameters are mutually exclusive "
            f"(got preset with {', '.join(explicit)})"
        )
    t1 = units.parse_quantity(raw.pop("t1"), "time", "t1") if "t1" in raw else DEFAULT_T1
    tphi = units.parse_quantity(raw.pop("tphi"), "time", "tphi") if "tphi" in raw else DEFAULT_TPHI
    kinv = (units.parse_quantity(raw.pop("kappa_inv"), "time", "kappa_inv")
            if "kappa_inv" in raw else DEFAULT_KAPPA_INV)
    temp = (units.parse_quantity(raw.pop("temperature"), "temperature", "temperature")
            if "temperature" in raw else DEFAULT_TEMPERATURE)
    for t, name in ((t1, "t1"), (tphi, "tphi"), (kinv, "kappa_inv")):
        if t <= 0:
            raise ConfigError(f"{name} must be positive")
    if preset is not None:
        if preset not in PRESETS:
            hint = difflib.get_close_matches(preset, PRESETS, n=1)
            suffix = f"; did you mean {hint[0]!r}?" if hint else f"; have {sorted(PRESETS)}"
            raise ConfigError(f"unknown preset {preset!r}{suffix}")
        return preset_params(preset, t1, tphi, kinv, temp), preset
    required = set(_PARAM_KEYS)
    missing = sorted(required - set(raw))
    if missing:
        raise ConfigError(f"no preset given and circuit parameters missing: {', '.join(missing)}")
    f = {k: units.parse_quantity(raw.pop(k), "frequency", k) for k in sorted(required)}
    params = CircuitParams(
        omega_a=f["omega_a"],
        omega_b=f["omega_b"],
        omega=(f["omega1"], f["omega2"], f["omega3"], f["omega4"]),
        g=(f["g1"], f["g2"], f["g3"], f["g4"]),
        g_ab=f["g_ab"],
        kappa_a=1.0 / kinv,
        kappa_b=1.0 / kinv,
        gamma=(1.0 / t1,) * 4,
        gphi=(0.5 / tphi,) * 4,
        temperature=temp,
    )
    return params, None


def parse_config(text: str) -> RunConfig:
    """Validated RunConfig from flat key-value text; unknown keys, missing
    units and constraint violations are all fatal."""
    raw = _parse_lines(text)
    for key in raw:
        _reject_unknown(key)
    try:
        params, preset = _build_params(raw)

        def take_time(key: str, default: float | None) -> float | None:
            if key not in raw:
                return default
            return units.parse_quantity(raw.pop(key), "time", key)

        def take_int(key: str, default: int | None) -> int | None:
            if key not in raw:
                return default
            try:
                return int(raw.pop(key))
            except ValueError:
                raise ConfigError(f"field {key!r}: expected an integer") from None

        def take_choice(key: str, default: str, allowed: tuple[str, ...]) -> str:
            value = raw.pop(key, default)
            if value not in allowed:
                raise ConfigError(f"field {key!r}: must be one of {allowed}, got {value!r}")
            return value

        engine = take_choice("engine", "reduced", ("full", "reduced"))
        spread_tol = float(raw.pop("spread_tol", 0.02))
        if not 0 < spread_tol < 1:
            raise ConfigError("spread_tol must lie in (0, 1)")
        cfg = RunConfig(
            params=params,
            preset=preset,
            engine=engine,
            frame=take_choice("frame", "interaction", ("lab", "interaction")),
            n_max=take_int("n_max", 2),
            t_final=take_time("t_final", 250e-9),
            dt=take_time("dt", None),
            record_stride=take_int("record_stride", None),
            initial_state=raw.pop("initial_state", "1"),
            qubit_occupation=take_choice(
                "qubit_occupation", "as-printed", ("as-printed", "bose-einstein")
            ),
            spread_tol=spread_tol,
            window=take_time("window", 50e-9),
            measure_at=take_time("measure_at", None),
            sweep_axes={k: _parse_axis(raw.pop(k), k) for k in _SWEEP_KEYS if k in raw},
            objective=take_choice("objective", "equilibration_time", OBJECTIVES),
            checkpoint_every=take_int("checkpoint_every", 10),
        )
    except (UnitError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    # eagerly validate the derived pieces so errors surface at parse time
    cfg.simulation_config()
    if cfg.checkpoint_every < 1:
        raise ConfigError("checkpoint_every must be >= 1")
    return cfg


def load_config(path: str) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
