"""Exception types shared across the package."""


class UnsupportedConfigurationError(ValueError):
    """A structurally valid input that this implementation does not handle
    (e.g. a lossy gate where a unitary is required, or an odd mode count
    where the closed-form photon distribution is undefined)."""


class ResourceLimitError(RuntimeError):
    """Refusal to allocate a dense Fock space larger than the guard size."""


class NumericalFailureError(ArithmeticError):
    """A numerically meaningless result (non-finite determinant, probability
    below the roundoff clamp window, ...)."""
