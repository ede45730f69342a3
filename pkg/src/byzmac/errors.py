"""Exception types shared across the package."""


class ByzmacError(Exception):
    """Base class for all package errors."""


class NonStochastic(ByzmacError):
    def __init__(self, row, deficit):
        self.row = row
        self.deficit = deficit
        super().__init__(f"row {row} does not sum to 1 (deficit {deficit:.3e})")


class NegativeEntry(ByzmacError):
    pass


class UnknownChannel(ByzmacError):
    pass


class LengthMismatch(ByzmacError):
    pass


class SymbolOutOfRange(ByzmacError):
    pass


class AlphabetMismatch(ByzmacError):
    pass


class OverlappingGroups(ByzmacError):
    pass


class Degenerate(ByzmacError):
    pass


class ShapeMismatch(ByzmacError):
    pass


class NonIntegerType(ByzmacError):
    def __init__(self, comp, n):
        self.comp = comp
        self.n = n
        super().__init__(f"composition {list(comp)} has no exact type at n={n}")


class TooLarge(ByzmacError):
    """Raised when an exhaustive enumeration would exceed its cell budget."""

    def __init__(self, what, cells, budget):
        self.cells = cells
        self.budget = budget
        super().__init__(f"{what}: {cells} cells exceeds budget {budget}")


class BudgetExceeded(TooLarge):
    pass


class SizeMismatch(ByzmacError):
    pass


class TrivialCode(ByzmacError):
    pass


class InvalidParams(ByzmacError):
    pass


class InfeasibleConstraintSet(ByzmacError):
    pass


class DeltaOutOfRange(ByzmacError):
    pass


class GridTooCoarse(UserWarning):
    """Warning: a simplex grid has fewer than two steps per coordinate."""
