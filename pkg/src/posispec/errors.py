"""Exception types shared across the package."""


class PosispecError(Exception):
    """Base class for all errors raised by this package."""


class NegativeEntryError(PosispecError):
    """A matrix/vector entry is negative where nonnegativity is required."""

    def __init__(self, value, index):
        self.value = value
        self.index = index
        super().__init__(f"NegativeEntry at {index}: {value!r}")


class DimensionMismatchError(PosispecError):
    """Operands have incompatible dimensions."""


class SemanticsMismatchError(DimensionMismatchError):
    """Support masks with different dim or semantics were compared."""


class ReducibleOperatorError(PosispecError):
    """An operation that requires irreducibility was called on a reducible operator."""


class PowerUnboundedError(PosispecError):
    """The operator looks power-unbounded, so the requested decomposition is undefined."""


class SolverFailure(PosispecError):
    """A numerical routine did not converge or failed a certificate check.

    ``partial`` carries whatever partial result is available (may be None).
    """

    def __init__(self, message, partial=None):
        self.partial = partial
        super().__init__(message)


class UnknownScenarioError(PosispecError, KeyError):
    """Requested gallery scenario name does not exist."""


class SoundnessViolationError(PosispecError):
    """Hypotheses of an engine all passed but the predicted conclusion failed.

    This is either a tolerance bug or a genuine counterexample; the payload
    holds a JSON-serializable reproduction case.
    """

    def __init__(self, message, payload):
        self.payload = payload
        super().__init__(message)
