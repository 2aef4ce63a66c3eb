"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A parameter set violates a required inequality or schema.

    The message names the violated constraint. The CLI maps this to
    exit code 2.
    """


class ConvergenceError(RuntimeError):
    """A tolerance-controlled numerical routine hit its iteration cap.

    Carries the best estimate obtained so far and the achieved error
    bound, so callers can decide whether the partial result is usable.
    """

    def __init__(self, message: str, estimate: float, error_bound: float):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound
