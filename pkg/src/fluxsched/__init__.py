"""Compile flux-qubit annealer circuits to effective Pauli schedules and back.

The package splits into circuit-side modules (operators, elements,
composite), the effective-model reduction (pauli), the two compilation
directions (inversion), qubit-model schedule families (schedules),
time evolution and spectra (dynamics), and the file/config/CLI surface
(io, config, presets, cli).
"""

from ._version import __version__
from .composite import (
    Topology,
    TopologyError,
    chain_topology,
    loaded_inductances,
    pair_topology,
    single_qubit_topology,
)
from .dynamics import (
    EvolutionResult,
    StepSizeError,
    WindowError,
    adiabatic_time,
    evolve,
    gap_minima,
    measure_oscillation,
    spectrum_trace,
)
from .elements import (
    CircuitElementParams,
    DomainParameterError,
    FluxBias,
    build_coupler,
    build_csfq,
    persistent_current,
    table_coupler,
    table_csfq,
)
from .inversion import (
    AnnealingCell,
    BranchError,
    FluxScheduleTable,
    InversionResult,
    UnreachableCouplingError,
    asymmetry_correct,
    correct_table,
    forward_schedule,
    invert_full,
    invert_pairwise,
    invert_schedule,
)
from .operators import BasisSpec
from .pauli import (
    GaugeUndefinedError,
    PauliPoint,
    PauliSchedule,
    SwUndefinedError,
    full_sw,
    pairwise_sw,
)
from .schedules import (
    DqaParams,
    GaussianProgressionParams,
    LzGadgetParams,
    PolynomialRfParams,
    dqa_schedule,
    gaussian_progression,
    lz_gadget,
    polynomial_rf,
)

__all__ = [
    "__version__",
    "AnnealingCell",
    "BasisSpec",
    "BranchError",
    "CircuitElementParams",
    "DomainParameterError",
    "DqaParams",
    "EvolutionResult",
    "FluxBias",
    "FluxScheduleTable",
    "GaugeUndefinedError",
    "GaussianProgressionParams",
    "InversionResult",
    "LzGadgetParams",
    "PauliPoint",
    "PauliSchedule",
    "PolynomialRfParams",
    "StepSizeError",
    "SwUndefinedError",
    "Topology",
    "TopologyError",
    "UnreachableCouplingError",
    "WindowError",
    "adiabatic_time",
    "asymmetry_correct",
    "build_coupler",
    "build_csfq",
    "chain_topology",
    "correct_table",
    "dqa_schedule",
    "evolve",
    "forward_schedule",
    "full_sw",
    "gap_minima",
    "gaussian_progression",
    "invert_full",
    "invert_pairwise",
    "invert_schedule",
    "loaded_inductances",
    "lz_gadget",
    "measure_oscillation",
    "pair_topology",
    "pairwise_sw",
    "persistent_current",
    "polynomial_rf",
    "single_qubit_topology",
    "spectrum_trace",
    "table_coupler",
    "table_csfq",
]
