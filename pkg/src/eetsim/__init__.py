"""Master-equation simulator for excitation-energy transfer in a
four-qubit, two-resonator superconducting circuit."""

from ._kernels import BACKEND
from .circuit import (
    PRESETS,
    CircuitOperators,
    CircuitParams,
    CouplingTable,
    build_h1,
    circuit_layout,
    custom_params,
    effective_couplings,
    effective_hamiltonian,
    fn_generator,
    preset_params,
    second_order_h3,
)
from .config import ConfigError, RunConfig, load_config, parse_config
from .excitons import ExcitonGeometry, ExcitonSite, dipole_coupling, frenkel_hamiltonian
from .experiments import (
    TransferMetrics,
    compute_metrics,
    equilibration_time,
    projectors,
    run_preset,
    run_simulation,
    trapped_population,
)
from .hilbert import DenseOperator, HilbertLayout, embed
from .lindblad import (
    LindbladSpec,
    PhysicalityError,
    SimulationConfig,
    StepSizeError,
    TrajectoryRecord,
    collapse_channels,
    dissipator,
    evolve,
    evolve_reduced,
    thermal_occupations,
)
from .sweep import SweepGrid, SweepPoint, SweepResult, sweep

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "PRESETS",
    "CircuitOperators",
    "CircuitParams",
    "ConfigError",
    "CouplingTable",
    "DenseOperator",
    "ExcitonGeometry",
    "ExcitonSite",
    "HilbertLayout",
    "LindbladSpec",
    "PhysicalityError",
    "RunConfig",
    "SimulationConfig",
    "StepSizeError",
    "SweepGrid",
    "SweepPoint",
    "SweepResult",
    "TrajectoryRecord",
    "TransferMetrics",
    "build_h1",
    "circuit_layout",
    "collapse_channels",
    "compute_metrics",
    "custom_params",
    "dipole_coupling",
    "dissipator",
    "effective_couplings",
    "effective_hamiltonian",
    "embed",
    "equilibration_time",
    "evolve",
    "evolve_reduced",
    "fn_generator",
    "frenkel_hamiltonian",
    "load_config",
    "parse_config",
    "preset_params",
    "projectors",
    "run_preset",
    "run_simulation",
    "second_order_h3",
    "sweep",
    "thermal_occupations",
    "trapped_population",
]
