"""
Exceptions raised by the Lie model engine.

Engine failures derive from :py:class:`salt.exceptions.CommandExecutionError`
so the execution module can let them propagate to the minion unchanged;
problems with user input derive from
:py:class:`salt.exceptions.SaltInvocationError`.
"""

from salt.exceptions import CommandExecutionError
from salt.exceptions import SaltInvocationError


class LieModelError(CommandExecutionError):
    """
    Base class for engine errors.

    kind
        Stable machine-readable name of the failure, used by reports and
        the console script.

    info
        Dictionary with the data that triggered the failure.
    """

    kind = "engine-error"

    def __init__(self, message="", info=None):
        super().__init__(message, info=info or {})


class CutoffExceeded(LieModelError):
    kind = "cutoff-exceeded"


class UndefinedOnZero(LieModelError):
    kind = "undefined-on-zero"


class MissingGeneratorValue(LieModelError):
    kind = "missing-generator-value"


class NotACycle(LieModelError):
    kind = "not-a-cycle"


class NotAChainMap(LieModelError):
    kind = "not-a-chain-map"


class DegreeMismatch(LieModelError):
    kind = "degree-mismatch"


class SquareNonzero(LieModelError):
    kind = "square-nonzero"


class PresentationInvalid(LieModelError):
    kind = "presentation-invalid"


class InvalidStructureConstants(PresentationInvalid):
    kind = "invalid-structure-constants"


class CutoffTooSmall(LieModelError):
    kind = "cutoff-too-small"


class HomologyMismatch(LieModelError):
    kind = "homology-mismatch"


class NotAnAutomorphism(LieModelError):
    kind = "not-an-automorphism"


class RepresentativeReductionFailed(LieModelError):
    kind = "representative-reduction-failed"


class InputError(SaltInvocationError):
    """
    Raised for documents that cannot be turned into engine values.

    line, column
        1-based position of the failure in the source text, when known.
    """

    kind = "syntax-error"

    def __init__(self, message, line=None, column=None, kind=None):
        if kind is not None:
            self.kind = kind
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)
