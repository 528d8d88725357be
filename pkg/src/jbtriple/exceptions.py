"""Exception hierarchy for jbtriple."""


class JBTripleError(Exception):
    """Base class for every error raised by this package."""


class InputError(JBTripleError, ValueError):
    """Raised for malformed user input (specs, elements, operator descriptions)."""


class SpaceMismatch(InputError):
    """Operands live in different triple spaces."""


class DegenerateBasis(InputError):
    """A subspace basis is linearly dependent."""


class SubspaceNotClosed(InputError):
    """A subspace basis is not closed under the parent triple product."""


class NotATripotent(InputError):
    pass


class NotUnitary(InputError):
    pass


class NotUnitVector(InputError):
    pass


class ZeroElement(InputError):
    pass


class ZeroGenerator(InputError):
    pass


class NotNilpotent(InputError):
    pass


class ResultLeftSpace(JBTripleError):
    """Functional calculus produced a matrix outside the represented space."""


class SearchFailed(JBTripleError):
    """The nilpotent search exhausted its budget on a non-associative algebra."""


class OracleMismatch(JBTripleError):
    """An exact evaluation disagrees with its independent numerical oracle."""


class InternalError(JBTripleError):
    """Two equivalent computations disagree; this signals a bug, not a math outcome."""


class InconsistentCharacterization(InternalError):
    """Commutativity criteria that must agree returned different verdicts."""
