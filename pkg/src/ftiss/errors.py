"""Exception hierarchy shared by every module."""


class FTISSError(Exception):
    """Base class for all package errors."""


class ParameterError(FTISSError, ValueError):
    """A parameter lies outside its admissible set."""


class DomainError(ParameterError):
    """A function was evaluated outside its domain (e.g. a negative argument)."""


class RangeError(ParameterError):
    """A requested value lies outside the range of a bounded map."""


class PreconditionError(FTISSError, ValueError):
    """An input violates a structural precondition (e.g. a boundary value)."""


class ConfigError(ParameterError):
    """A simulation config failed validation.

    ``problems`` holds one ``(field, message)`` pair per violated invariant.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        lines = "; ".join(f"{field}: {msg}" for field, msg in self.problems)
        super().__init__(f"invalid config: {lines}")


class DivergenceError(FTISSError, RuntimeError):
    """The time integrator produced non-finite values."""

    def __init__(self, step_index, t):
        self.step_index = step_index
        self.t = t
        super().__init__(f"integrator diverged at step {step_index} (t = {t:.6g})")
