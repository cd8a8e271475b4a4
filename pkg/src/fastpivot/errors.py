"""Exception hierarchy shared by all modules."""


class FastPivotError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(FastPivotError, ValueError):
    """An instance violates one of its invariants."""


class NonStochasticRow(ValidationError):
    def __init__(self, row: int, deviation: float):
        # row is 1-based, matching file and report numbering
        self.row = row
        self.deviation = deviation
        super().__init__(f"row {row} of P sums to 1{deviation:+.3g}")


class NegativeProbability(ValidationError):
    def __init__(self, i: int, j: int, value: float = float("nan")):
        self.i, self.j, self.value = i, j, value
        super().__init__(f"negative transition probability p[{i},{j}] = {value!r}")


class DimensionMismatch(ValidationError):
    pass


class BadDiscount(FastPivotError, ValueError):
    """Discount factor outside (0, 1] or unsupported by the requested algorithm."""


class ParseError(FastPivotError, ValueError):
    def __init__(self, field: str, detail: str = ""):
        self.field = field
        msg = field if not detail else f"{field}: {detail}"
        super().__init__(msg)


class SingularMatrix(FastPivotError, ArithmeticError):
    pass


class DegeneratePivot(FastPivotError, ArithmeticError):
    def __init__(self, k: int, value: float):
        self.k = k
        self.value = value
        super().__init__(f"degenerate pivot at step {k}: denominator {value!r}")


class InstanceTooLarge(FastPivotError, ValueError):
    pass
