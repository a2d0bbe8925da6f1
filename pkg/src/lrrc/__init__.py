"""Repair-bandwidth analysis for locally repairable regenerating codes.

Exact min-cut evaluation of information flow graphs, helper-selection
policies (stationary tables, family-based selection, clique avoidance),
an explicit binary code for (n, k, d, r) = (5, 3, 2, 1), constructive
witness builders and a classifier for helper-selection indifference.
"""

from .errors import (
    ArityError,
    BudgetError,
    ConstructionError,
    DimensionError,
    InvariantViolation,
    ParamError,
    ProtocolError,
    ReconstructionError,
    SearchExhausted,
    UnprotectableError,
    UnsupportedError,
)
from .params import (
    CutCoefficients,
    ExtremePoints,
    SystemParams,
    bhs_mbr_point,
    bhs_mincut_value,
    extreme_points,
    validate_params,
)
from .indifference import Classification, Verdict, classify, scan

__version__ = "0.1.0"

__all__ = [
    "ArityError",
    "BudgetError",
    "Classification",
    "ConstructionError",
    "CutCoefficients",
    "DimensionError",
    "ExtremePoints",
    "InvariantViolation",
    "ParamError",
    "ProtocolError",
    "ReconstructionError",
    "SearchExhausted",
    "SystemParams",
    "UnprotectableError",
    "UnsupportedError",
    "Verdict",
    "bhs_mbr_point",
    "bhs_mincut_value",
    "classify",
    "extreme_points",
    "scan",
    "validate_params",
]
