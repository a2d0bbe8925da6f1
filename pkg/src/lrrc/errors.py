"""Exception types shared across the package."""


class ParamError(ValueError):
    """Parameters outside the admissible (n, k, d, r) range."""


class UnprotectableError(ValueError):
    """No finite operating point exists (all cut coefficients are zero)."""


class DimensionError(ValueError):
    """Packet vectors or subspaces of different dimension were mixed."""


class ProtocolError(ValueError):
    """A repair request broke the failure/unavailability/helper rules."""


class ArityError(ProtocolError):
    """Wrong number of helpers for a repair."""


class ConstructionError(ValueError):
    """A structure (table, family vector, code) could not be built."""


class UnsupportedError(ValueError):
    """The request is outside what this implementation covers."""


class BudgetError(RuntimeError):
    """An enumeration or search would exceed its caller-supplied budget."""


class InvariantViolation(RuntimeError):
    """A guaranteed property failed; indicates a bug or a counterexample."""


class SearchExhausted(InvariantViolation):
    """A witness search ran out of candidates without finding a witness."""


class ReconstructionError(InvariantViolation):
    """The chosen nodes do not hold enough independent packets."""
