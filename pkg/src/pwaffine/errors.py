"""Exception types shared across the package."""


class Undecidable(ArithmeticError):
    """A comparison involving a digit stream could not be settled within budget."""


class PrecisionExhausted(ArithmeticError):
    """A switching decision fell inside the parameter approximation error band."""


class ConstructionViolation(RuntimeError):
    """A quasi-partition could not be built: some f(J_s) straddles a point of H."""


class BreakpointAnomaly(RuntimeError):
    """The empirical breakpoint scan did not locate exactly three discontinuities."""

    def __init__(self, message, points):
        super().__init__(message)
        self.points = points


class CorrespondenceMismatch(AssertionError):
    """Iterated preimages disagreed with the matching beta-transformation orbit."""
