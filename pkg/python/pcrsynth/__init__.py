# -*- coding: utf-8 -*-
__version__ = "0.1.0"

from .enums import ModeKind, TargetName, SegmentKind, EdgeShape, RowStatus
from .exceptions import (
    PCRException,
    ConfigurationError,
    DeviceLoadError,
    CellValidationError,
    JournalMismatch,
    NumericError,
    ResonanceError,
    HybridizationError,
    SeedingError,
    OptimizationFailed,
    SweepFailed,
)
from .boson_algebra import ModeSpec, ProductBasis, OperatorMatrix, build_basis, pauli_word
from .circuit_model import (
    CircuitSpec,
    DriveSpec,
    DressedTable,
    build_system_hamiltonian,
    build_drive_hamiltonian,
    rotating_frame_rwa,
    frame_frequency,
    dressed_table,
    numeric_exchange_coupling,
)
from .effective_hamiltonian import (
    PauliCoefficients,
    block_diagonalize,
    pauli_project,
    coefficients_for,
    cutoff_convergence,
)
from .perturbative import perturbative_coefficients, PerturbativeInputs, seed_parameters
from .gate_logic import GateTarget, target_preset, reference_unitary
from .optimizer import ParameterBounds, cost, powell_minimize, optimize_cell
from .dynamics import (
    NoiseModel,
    PulseEnvelope,
    PulseSchedule,
    SimulationResult,
    evolve_lindblad,
    run_protocol,
    amplitude_sweep,
    robustness_sweep,
    ghz_drift_curve,
)
from .device import Device, UnitCell, load_device
from .campaign import CampaignOptions, CampaignReport, run_campaign, verify_coefficients
from .util import DirConfig, setup_logging

__all__ = [
    "__version__",
    "ModeKind",
    "TargetName",
    "SegmentKind",
    "EdgeShape",
    "RowStatus",
    "PCRException",
    "ConfigurationError",
    "DeviceLoadError",
    "CellValidationError",
    "JournalMismatch",
    "NumericError",
    "ResonanceError",
    "HybridizationError",
    "SeedingError",
    "OptimizationFailed",
    "SweepFailed",
    "ModeSpec",
    "ProductBasis",
    "OperatorMatrix",
    "build_basis",
    "pauli_word",
    "CircuitSpec",
    "DriveSpec",
    "DressedTable",
    "build_system_hamiltonian",
    "build_drive_hamiltonian",
    "rotating_frame_rwa",
    "frame_frequency",
    "dressed_table",
    "numeric_exchange_coupling",
    "PauliCoefficients",
    "block_diagonalize",
    "pauli_project",
    "coefficients_for",
    "cutoff_convergence",
    "perturbative_coefficients",
    "PerturbativeInputs",
    "seed_parameters",
    "GateTarget",
    "target_preset",
    "reference_unitary",
    "ParameterBounds",
    "cost",
    "powell_minimize",
    "optimize_cell",
    "NoiseModel",
    "PulseEnvelope",
    "PulseSchedule",
    "SimulationResult",
    "evolve_lindblad",
    "run_protocol",
    "amplitude_sweep",
    "robustness_sweep",
    "ghz_drift_curve",
    "Device",
    "UnitCell",
    "load_device",
    "CampaignOptions",
    "CampaignReport",
    "run_campaign",
    "verify_coefficients",
    "DirConfig",
    "setup_logging",
]
