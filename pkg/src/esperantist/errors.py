"""Exception hierarchy shared by all modules."""


class EsperantistError(Exception):
    """Base class for every error raised by this package."""


class CapExceededError(EsperantistError):
    """An enumeration grew past its size cap."""

    def __init__(self, partial_size, cap):
        super().__init__(f"closure exceeded cap={cap} (partial size {partial_size})")
        self.partial_size = partial_size
        self.cap = cap


class SingularMatrixError(EsperantistError, ValueError):
    def __init__(self, index):
        super().__init__(f"generator at index {index} is not invertible")
        self.index = index


class DisconnectedGraphError(EsperantistError):
    """The graph has more than one component, so its spectral gap is zero."""

    def __init__(self, n_components):
        super().__init__(f"graph is disconnected ({n_components} components)")
        self.n_components = n_components


class ConvergenceError(EsperantistError):
    """Iterative eigensolver did not reach tolerance."""

    def __init__(self, estimate, residual, iterations):
        super().__init__(
            f"no convergence after {iterations} matvecs "
            f"(best estimate {estimate!r}, residual {residual:.3e})"
        )
        self.estimate = estimate
        self.residual = residual
        self.iterations = iterations


class ConfigError(EsperantistError, ValueError):
    pass
