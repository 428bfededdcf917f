"""Exception hierarchy for the rinv package."""


class RinvError(Exception):
    """Base class for all rinv errors."""


class ParameterError(RinvError):
    """A scalar parameter is outside its allowed range."""


class DimensionError(RinvError):
    """Matrix/vector shapes are inconsistent or a non-square input was given."""


class SymmetryError(RinvError):
    """A matrix required to be symmetric is not, beyond tolerance."""


class SingularShiftError(RinvError):
    """The requested shift coincides with an eigenvalue of the matrix."""


class SingularUpdateError(RinvError):
    """Rank-one inverse update denominator is too close to zero."""


class ZeroOperatorError(RinvError):
    """An all-zero operator was given where a nonzero one is required."""


class EmptySetError(RinvError):
    """An empty vector collection was given where a nonempty one is required."""


class DecompositionError(RinvError):
    """The vector system fails the resolution-of-identity check."""

    def __init__(self, message, defect=None):
        super().__init__(message)
        self.defect = defect


class ColumnNormError(RinvError):
    """A column fails the unit-norm requirement of classical mode."""

    def __init__(self, message, worst_index=None):
        super().__init__(message)
        self.worst_index = worst_index


class ModeError(RinvError):
    """Input does not satisfy the requested validation mode."""


class InfeasibleFrameError(RinvError):
    """A tight frame with m < n vectors cannot exist."""


class IndexRangeError(RinvError):
    """Subset indices are out of range or repeated."""


class SubsetTooLargeError(RinvError):
    """Exhaustive enumeration would exceed the combinatorial guard."""


class InfeasibilityError(RinvError):
    """No candidate vector passed the feasibility tests at the current step.

    Cannot occur in exact arithmetic; carries the best margins found so a
    failure can be diagnosed.
    """

    def __init__(self, message, best_quadform_margin=None, best_potential_margin=None):
        super().__init__(message)
        self.best_quadform_margin = best_quadform_margin
        self.best_potential_margin = best_potential_margin


class InvariantViolation(RinvError):
    """A runtime invariant of the selection process failed."""
