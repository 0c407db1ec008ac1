"""Exception types shared across the package.

Exit-code mapping used by the CLI: AdmissibilityError and ZeroForm -> 3,
CapacityError -> 4, every other validation failure -> 2.
"""


class LatticeFormsError(Exception):
    """Base class for all package-specific errors."""


class CapacityError(LatticeFormsError):
    """Predicted output size exceeds the configured memory budget."""

    def __init__(self, predicted, budget, what="points"):
        self.predicted = predicted
        self.budget = budget
        super().__init__(
            f"predicted {predicted} {what} exceeds memory budget {budget}"
        )


class AdmissibilityError(LatticeFormsError):
    """A radius with no configurations (or an empty shell) where one is required."""


class DimensionMismatch(LatticeFormsError):
    """Inputs disagree on the ambient dimension or on arity."""


class StrategyUnsupported(LatticeFormsError):
    """A forced evaluation strategy's precondition does not hold for this graph."""


class DimensionFloor(LatticeFormsError):
    """The dimension is below the floor required by the theorem being realized."""

    def __init__(self, needed, got, label):
        self.needed = needed
        self.got = got
        self.label = label
        super().__init__(
            f"{label} requires dimension d >= {needed}, got d = {got}"
        )


class DegenerateFit(LatticeFormsError):
    """Power-law fit impossible: fewer than two distinct radii or non-positive ratios."""


class ZeroForm(LatticeFormsError):
    """Every radius in the requested range produced a zero form value."""
