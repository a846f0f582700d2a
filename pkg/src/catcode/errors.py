"""Exception hierarchy.

Errors deriving from :class:`NumericalContractError` signal that a numerical
guarantee (norm, trace, truncation) was violated; the CLI maps them to exit
code 3.
"""


class CatCodeError(Exception):
    """Base class for all package errors."""


class NumericalContractError(CatCodeError):
    pass


class TruncationError(NumericalContractError):
    """The Fock cutoff discards more weight than allowed."""


class NormDriftError(NumericalContractError):
    pass


class StepSizeError(NumericalContractError):
    pass


class CompletenessError(NumericalContractError):
    """A truncated Kraus set loses more trace than allowed."""


class DegenerateCatError(CatCodeError, ValueError):
    """The odd cat is undefined at alpha = 0."""


class SpaceMismatchError(CatCodeError, ValueError):
    pass


class NonHermitianError(CatCodeError, ValueError):
    pass


class ZeroProbabilityError(CatCodeError, ValueError):
    pass


class InputError(CatCodeError, ValueError):
    pass


class InsufficientSamplesError(CatCodeError, ValueError):
    pass


class InvalidSyndromeError(CatCodeError):
    """Ancilla record that a single mode-parity flip cannot produce."""

    def __init__(self, syndrome):
        super().__init__(f"syndrome {syndrome} is inconsistent with a mode parity flip")
        self.syndrome = tuple(syndrome)
