"""Exception types shared across the package."""


class LatticeError(ValueError):
    """Raised for (N, m) pairs or node labels that do not fit a valid ring lattice."""


class NumericalError(RuntimeError):
    """A numerical routine could not reach its accuracy target."""


class QuadratureError(NumericalError):
    def __init__(self, message: str, achieved_error: float):
        super().__init__(f"{message} (achieved error estimate {achieved_error:.3g})")
        self.achieved_error = achieved_error


class NoMaximumError(NumericalError):
    def __init__(self, message: str, trace):
        super().__init__(message)
        self.trace = trace
