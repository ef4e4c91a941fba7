"""Exact free-mode reduction and spurious crosstalk analysis for floating qubit circuits."""

from .crosstalk import (
    CrosstalkReport,
    asymptotic_check,
    closed_form_general,
    closed_form_lambda,
    coupling_weights,
    crosstalk_report,
    drive_amplitude,
    floating_bus_ratio,
    ratio,
    sweep,
    table1_value,
    to_db,
)
from .netlist import (
    LayoutPreset,
    Netlist,
    build_direct_coupled,
    build_floating_bus,
    build_grounded_bus,
    from_preset,
    parse,
    render,
)
from .quantize import ModeSystem, ReducedSystem, assemble, build_modes, quantize, reduce, transform
from .ratmat import Matrix, congruence, invert, rational_from_decimal, submatrix

__all__ = [
    "CrosstalkReport", "LayoutPreset", "Matrix", "ModeSystem", "Netlist", "ReducedSystem",
    "assemble", "asymptotic_check", "build_direct_coupled", "build_floating_bus",
    "build_grounded_bus", "build_modes", "closed_form_general", "closed_form_lambda",
    "congruence", "coupling_weights", "crosstalk_report", "drive_amplitude",
    "floating_bus_ratio", "from_preset", "invert", "parse", "quantize", "ratio",
    "rational_from_decimal", "reduce", "render", "submatrix", "sweep", "table1_value",
    "to_db", "transform",
]
