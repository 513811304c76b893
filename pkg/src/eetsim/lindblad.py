"""Lindblad master-equation integration for the full circuit and for the
single-excitation fast path.

The full engine works on the 2^4 (n_max+1)^2 space in the lab frame
(static H1) or the interaction frame (sparse static terms times scalar
phases).  The reduced engine restricts every coherent and dissipative
term to span{|1>..|4>, |a>, |b>, ground}: decay channels route population
to the ground sink, sigma_z dephasing acts exactly (it preserves the
subspace), and the counter-rotating pieces of the resonator bridge are
dropped because they exit the subspace.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.constants

from . import _kernels
from .circuit import CircuitOperators, CircuitParams, circuit_layout
from .hilbert import DenseOperator, HilbertLayout, _require_same_layout

TRACE_ABORT = 1e-6
POPULATION_ABORT = -1e-6
MAX_PHASE_PER_STEP = 0.3

REDUCED_BASIS = ("1", "2", "3", "4", "a", "b", "ground")
STATE_LABELS = REDUCED_BASIS
_SINK = 6


class PhysicalityError(RuntimeError):
    """Trace drift or negative population beyond the abort thresholds."""


class StepSizeError(ValueError):
    """dt too coarse for the fastest frequency of the chosen frame."""


# -- thermal occupations -------------------------------------------------------


@dataclass(frozen=True)
class ThermalNumbers:
    """Dimensionless bath occupations of the two resonators and four qubits."""

    N_a: float
    N_b: float
    N_q: tuple[float, float, float, float]


def thermal_occupations(p: CircuitParams, qubit_occupation: str = "as-printed") -> ThermalNumbers:
    """Resonators get the Bose-Einstein occupation; qubits default to the
    bare Boltzmann factor exp(-hbar w / kT), with a bose-einstein switch.
    The two differ by < 1e-13 below 100 mK."""
    if p.temperature < 0:
        raise ValueError("temperature must be >= 0")
    if qubit_occupation not in ("as-printed", "bose-einstein"):
        raise ValueError(f"unknown qubit occupation mode {qubit_occupation!r}")
    if p.temperature == 0:
        return ThermalNumbers(0.0, 0.0, (0.0, 0.0, 0.0, 0.0))
    beta_hbar = scipy.constants.hbar / (scipy.constants.k * p.temperature)

    def bose(w: float) -> float:
        return 1.0 / np.expm1(beta_hbar * w)

    def boltzmann(w: float) -> float:
        return float(np.exp(-beta_hbar * w))

    qfun = boltzmann if qubit_occupation == "as-printed" else bose
    return ThermalNumbers(
        N_a=bose(p.omega_a),
        N_b=bose(p.omega_b),
        N_q=tuple(qfun(w) for w in p.omega),
    )


# -- dissipator and reference right-hand side ----------------------------------


def dissipator(A: DenseOperator, rho: DenseOperator) -> DenseOperator:
    """D[A] rho = (2 A rho A^dag - A^dag A rho - rho A^dag A) / 2."""
    _require_same_layout(A, rho)
    a, r = A.array, rho.array
    ada = a.conj().T @ a
    return DenseOperator(A.layout, a @ r @ a.conj().T - 0.5 * (ada @ r + r @ ada))


@dataclass
class LindbladSpec:
    """Collapse channels as (operator, rate) pairs on a shared layout."""

    channels: list[tuple[DenseOperator, float]]

    def __post_init__(self):
        if not self.channels:
            return
        layout = self.channels[0][0].layout
        for op, rate in self.channels:
            if rate < 0:
                raise ValueError("collapse rates must be >= 0")
            if op.layout != layout:
                raise ValueError("collapse operators must share one layout")


def collapse_channels(
    p: CircuitParams, layout: HilbertLayout, ops: CircuitOperators | None = None,
    qubit_occupation: str = "as-printed",
) -> LindbladSpec:
    """Resonator leakage/heating, qubit relaxation/excitation and dephasing."""
    ops = ops or CircuitOperators(layout)
    occ = thermal_occupations(p, qubit_occupation)
    ch: list[tuple[DenseOperator, float]] = [
        (ops.a, p.kappa_a * (occ.N_a + 1)),
        (ops.a_dag, p.kappa_a * occ.N_a),
        (ops.b, p.kappa_b * (occ.N_b + 1)),
        (ops.b_dag, p.kappa_b * occ.N_b),
    ]
    for l in range(4):
        ch.append((ops.sm[l], p.gamma[l] * (occ.N_q[l] + 1)))
        ch.append((ops.sp[l], p.gamma[l] * occ.N_q[l]))
        ch.append((ops.sz[l], p.gphi[l]))
    return LindbladSpec(ch)


def rhs(t: float, rho: DenseOperator, hamiltonian, spec: LindbladSpec) -> DenseOperator:
    """Reference right-hand side: -i[H(t), rho] + sum rate * D[A] rho.

    hamiltonian is a DenseOperator or a callable t -> DenseOperator.  This
    straightforward implementation is the oracle the packed kernels are
    checked against; the engines do not call it in their hot loop.
    """
    H = hamiltonian(t) if callable(hamiltonian) else hamiltonian
    _require_same_layout(H, rho)
    out = -1j * (H.array @ rho.array - rho.array @ H.array)
    acc = DenseOperator(rho.layout, out)
    for op, rate in spec.channels:
        acc = acc + rate * dissipator(op, rho)
    return acc


# -- configuration and trajectory record ---------------------------------------

_DEFAULT_DT = {"lab": 1e-12, "interaction": 2e-12, "reduced": 2e-12}


@dataclass(frozen=True)
class SimulationConfig:
    frame: str = "interaction"  # lab | interaction | reduced
    n_max: int = 2
    t_final: float = 250e-9
    dt: float | None = None
    record_stride: int | None = None
    initial_state: str = "1"
    qubit_occupation: str = "as-printed"

    def __post_init__(self):
        if self.frame not in ("lab", "interaction", "reduced"):
            raise ValueError(f"unknown frame {self.frame!r}")
        if self.t_final < 0:
            raise ValueError("t_final must be >= 0")
        if self.dt is not None and self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.initial_state not in STATE_LABELS:
            raise ValueError(f"initial_state must be one of {STATE_LABELS}")

    def resolved_dt(self) -> float:
        return self.dt if self.dt is not None else _DEFAULT_DT[self.frame]

    def resolved_stride(self) -> int:
        if self.record_stride is not None:
            if self.record_stride < 1:
                raise ValueError("record_stride must be >= 1")
            return self.record_stride
        # aim for ~0.5 ns between samples
        return max(1, round(0.5e-9 / self.resolved_dt()))


@dataclass
class TrajectoryRecord:
    """Sampled populations P1..P4, Pa, Pb plus trace and purity."""

    times: np.ndarray
    populations: np.ndarray  # (n_samples, 6)
    trace: np.ndarray
    purity: np.ndarray
    frame: str
    states: list[tuple[float, np.ndarray]] = field(default_factory=list)

    COLUMNS = ("time_ns", "P1", "P2", "P3", "P4", "Pa", "Pb", "trace", "purity")

    def pop(self, label: str) -> np.ndarray:
        idx = {"1": 0, "2": 1, "3": 2, "4": 3, "a": 4, "b": 5}[label]
        return self.populations[:, idx]

    @property
    def qubit_total(self) -> np.ndarray:
        return self.populations[:, :4].sum(axis=1)

    def as_table(self) -> np.ndarray:
        return np.column_stack(
            [self.times * 1e9, self.populations, self.trace, self.purity]
        )


# -- shared integration driver --------------------------------------------------


def _integrate(
    rho0: np.ndarray,
    heff: np.ndarray,
    terms: list[tuple[np.ndarray, float]],
    jump_mats: list[np.ndarray],
    dt: float,
    n_steps: int,
    stride: int,
    obs_idx: np.ndarray,
    frame: str,
    keep_states_every: int | None = None,
) -> TrajectoryRecord:
    """Fixed-step RK4 over the packed kernel, sampling every `stride` steps."""
    tvals, trows, tcols, toff = _kernels.pack_channels([m for m, _ in terms])
    tfreqs = np.asarray([f for _, f in terms], dtype=np.float64)
    jvals, jrows, jcols, joff = _kernels.pack_channels(jump_mats)

    rho = np.array(rho0, dtype=np.complex128, order="C")
    boundaries = list(range(0, n_steps + 1, stride))
    if boundaries[-1] != n_steps:
        boundaries.append(n_steps)
    n_rec = len(boundaries)
    times = np.asarray(boundaries, dtype=np.float64) * dt
    pops = np.empty((n_rec, len(obs_idx)))
    trace = np.empty(n_rec)
    purity = np.empty(n_rec)
    states: list[tuple[float, np.ndarray]] = []

    for k in range(n_rec):
        if k > 0:
            t0 = boundaries[k - 1] * dt
            rho = _kernels.advance(
                rho, t0, dt, boundaries[k] - boundaries[k - 1], heff,
                tvals, trows, tcols, toff, tfreqs,
                jvals, jrows, jcols, joff,
            )
        diag = np.real(np.diag(rho))
        pops[k] = diag[obs_idx]
        trace[k] = diag.sum()
        purity[k] = float(np.vdot(rho, rho).real)
        if abs(trace[k] - 1.0) >= TRACE_ABORT:
            raise PhysicalityError(
                f"trace drifted to {trace[k]:.9f} at t = {times[k] * 1e9:.3f} ns"
            )
        if diag.min() < POPULATION_ABORT:
            raise PhysicalityError(
                f"population {diag.min():.3e} < {POPULATION_ABORT} at "
                f"t = {times[k] * 1e9:.3f} ns"
            )
        if keep_states_every and k % keep_states_every == 0:
            states.append((float(times[k]), rho.copy()))

    return TrajectoryRecord(times, pops, trace, purity, frame, states)


def _check_step(dt: float, omega_max: float) -> None:
    if dt * omega_max >= MAX_PHASE_PER_STEP:
        raise StepSizeError(
            f"dt * omega_max = {dt * omega_max:.3f} rad >= {MAX_PHASE_PER_STEP}; "
            "reduce dt or change frame"
        )


def _anticommutator_part(jump_mats: list[np.ndarray], dim: int) -> np.ndarray:
    g = np.zeros((dim, dim), dtype=np.complex128)
    for m in jump_mats:
        g += 0.5 * (m.conj().T @ m)
    return g


def _full_space_setup(p: CircuitParams, config: SimulationConfig):
    from .circuit import build_h1, interaction_terms

    layout = circuit_layout(config.n_max)
    ops = CircuitOperators(layout)
    spec = collapse_channels(p, layout, ops, config.qubit_occupation)
    jump_mats = [np.sqrt(rate) * op.array for op, rate in spec.channels if rate > 0]
    g = _anticommutator_part(jump_mats, layout.dim)
    if config.frame == "lab":
        h_static = build_h1(p, layout, ops).array
        terms: list[tuple[np.ndarray, float]] = []
        omega_max = max(p.omega) + p.omega_a + p.omega_b
    else:
        h_static = np.zeros((layout.dim, layout.dim), dtype=np.complex128)
        terms = interaction_terms(p, layout, ops)
        omega_max = max(max(p.deltas), p.omega_a + p.omega_b)
    heff = h_static - 1j * g
    return layout, heff, terms, jump_mats, omega_max


def full_state_index(layout: HilbertLayout, label: str) -> int:
    """Flat index of |1>..|4>, |a>, |b> or the global ground state."""
    n_occ = [0] * 6
    if label in ("1", "2", "3", "4"):
        n_occ[int(label) - 1] = 1
    elif label == "a":
        n_occ[4] = 1
    elif label == "b":
        n_occ[5] = 1
    elif label != "ground":
        raise ValueError(f"unknown state label {label!r}")
    return layout.basis_index(tuple(n_occ))


def _initial_density(dim: int, index: int) -> np.ndarray:
    rho = np.zeros((dim, dim), dtype=np.complex128)
    rho[index, index] = 1.0
    return rho


def evolve(
    rho0: DenseOperator | None,
    config: SimulationConfig,
    p: CircuitParams,
    keep_states_every: int | None = None,
) -> TrajectoryRecord:
    """Full-space integration of the master equation.

    rho0 may be None, in which case config.initial_state selects a basis
    state.  Aborts with PhysicalityError if the trace drifts beyond 1e-6
    or any population goes below -1e-6.
    """
    if config.frame == "reduced":
        return evolve_reduced(rho0, config, p, keep_states_every)
    layout, heff, terms, jump_mats, omega_max = _full_space_setup(p, config)
    dt = config.resolved_dt()
    _check_step(dt, omega_max)
    if rho0 is None:
        rho = _initial_density(layout.dim, full_state_index(layout, config.initial_state))
    else:
        if rho0.layout != layout:
            raise ValueError("initial state layout does not match the configured n_max")
        rho = rho0.array
    n_steps = int(round(config.t_final / dt))
    stride = min(config.resolved_stride(), n_steps) if n_steps else 1
    obs_idx = np.asarray(
        [full_state_index(layout, lab) for lab in ("1", "2", "3", "4", "a", "b")],
        dtype=np.int64,
    )
    return _integrate(rho, heff, terms, jump_mats, dt, n_steps, stride, obs_idx,
                      config.frame, keep_states_every)


# -- reduced single-excitation engine -------------------------------------------


def reduced_hamiltonian(p: CircuitParams) -> np.ndarray:
    """Single-excitation restriction of H1 with the bridge RWA-reduced.

    Basis order |1>, |2>, |3>, |4>, |a>, |b>, ground; energies relative to
    the global ground state.
    """
    h = np.zeros((7, 7), dtype=np.complex128)
    for j in range(4):
        h[j, j] = p.omega[j]
    h[4, 4] = p.omega_a
    h[5, 5] = p.omega_b
    for j, mode in enumerate((4, 4, 5, 5)):
        h[j, mode] = p.g[j]
        h[mode, j] = p.g[j]
    h[4, 5] = p.g_ab
    h[5, 4] = p.g_ab
    return h


def reduced_collapse_channels(
    p: CircuitParams, qubit_occupation: str = "as-printed"
) -> list[tuple[np.ndarray, float]]:
    """Every channel of the full equation restricted to the subspace."""
    occ = thermal_occupations(p, qubit_occupation)
    ch: list[tuple[np.ndarray, float]] = []

    def hop(src: int, dst: int) -> np.ndarray:
        m = np.zeros((7, 7), dtype=np.complex128)
        m[dst, src] = 1.0
        return m

    ch.append((hop(4, _SINK), p.kappa_a * (occ.N_a + 1)))
    ch.append((hop(_SINK, 4), p.kappa_a * occ.N_a))
    ch.append((hop(5, _SINK), p.kappa_b * (occ.N_b + 1)))
    ch.append((hop(_SINK, 5), p.kappa_b * occ.N_b))
    for l in range(4):
        ch.append((hop(l, _SINK), p.gamma[l] * (occ.N_q[l] + 1)))
        ch.append((hop(_SINK, l), p.gamma[l] * occ.N_q[l]))
        dephase = -np.eye(7, dtype=np.complex128)
        dephase[l, l] = 1.0
        ch.append((dephase, p.gphi[l]))
    return ch


def reduced_state_index(label: str) -> int:
    try:
        return REDUCED_BASIS.index(label)
    except ValueError:
        raise ValueError(f"unknown reduced-basis label {label!r}") from None


def evolve_reduced(
    rho0: np.ndarray | DenseOperator | None,
    config: SimulationConfig,
    p: CircuitParams,
    keep_states_every: int | None = None,
) -> TrajectoryRecord:
    """Fast path on the 7-dimensional block (6 excited states + ground sink)."""
    if isinstance(rho0, DenseOperator):
        rho0 = _project_full_state(rho0, config)
    if rho0 is None:
        rho = _initial_density(7, reduced_state_index(config.initial_state))
    else:
        rho = np.asarray(rho0, dtype=np.complex128)
        if rho.shape != (7, 7):
            raise ValueError("reduced initial state must be 7x7")
    dt = config.dt if config.dt is not None else _DEFAULT_DT["reduced"]
    _check_step(dt, max(p.deltas))
    jump_mats = [np.sqrt(rate) * m for m, rate in reduced_collapse_channels(p, config.qubit_occupation) if rate > 0]
    heff = reduced_hamiltonian(p) - 1j * _anticommutator_part(jump_mats, 7)
    n_steps = int(round(config.t_final / dt))
    stride = min(config.resolved_stride(), n_steps) if n_steps else 1
    obs_idx = np.arange(6, dtype=np.int64)
    return _integrate(rho, heff, [], jump_mats, dt, n_steps, stride, obs_idx,
                      "reduced", keep_states_every)


def _project_full_state(rho0: DenseOperator, config: SimulationConfig) -> np.ndarray:
    """Extract the subspace block of a full-space state; reject leakage."""
    layout = circuit_layout(config.n_max)
    if rho0.layout != layout:
        raise ValueError("initial state layout does not match the configured n_max")
    idx = [full_state_index(layout, lab) for lab in REDUCED_BASIS]
    block = rho0.array[np.ix_(idx, idx)]
    if abs(np.trace(block).real - 1.0) > 1e-9:
        raise ValueError("initial state lies outside the single-excitation subspace")
    return block
