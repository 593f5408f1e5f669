"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Malformed or dimensionally inconsistent input."""


class PreconditionError(ValueError):
    """A documented call precondition does not hold (e.g. missing Slater point)."""


class CapabilityError(RuntimeError):
    """The requested instance is outside the supported size envelope."""


class ConvergenceFailureError(RuntimeError):
    """An iterative routine failed to reach its guaranteed state."""


class AssumptionViolation(ValueError):
    """A network or problem assumption required by the algorithm fails.

    ``assumption`` is one of ``"1"`` (non-degeneracy), ``"2"`` (balanced
    communication), ``"3"`` (periodic strong connectivity) or ``"Slater"``.
    """

    def __init__(self, assumption: str, detail: str):
        self.assumption = assumption
        super().__init__(f"assumption {assumption} violated: {detail}")
