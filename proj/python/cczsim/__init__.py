"""Python bindings for the cczsim direct-CCZ simulator."""

from ._core import (
    CouplingReport,
    Device,
    OperatingPoint,
    PhaseSet,
    conditional_phases,
    evaluate_operating_point,
    find_idle_point,
    fit_rb_decay,
    grover_ideal,
    optimal_grover_iterations,
    process_fidelity_unitary,
    rb_fidelity,
    zeta_exact,
    zeta_perturbative,
)

__all__ = [
    "CouplingReport",
    "Device",
    "OperatingPoint",
    "PhaseSet",
    "conditional_phases",
    "evaluate_operating_point",
    "find_idle_point",
    "fit_rb_decay",
    "grover_ideal",
    "optimal_grover_iterations",
    "process_fidelity_unitary",
    "rb_fidelity",
    "zeta_exact",
    "zeta_perturbative",
]
