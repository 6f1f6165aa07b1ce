"""Exception taxonomy shared across the package."""


class ArthurkitError(Exception):
    """Base class for everything raised on purpose."""


class ValidationError(ArthurkitError):
    """An invariant of the input data fails (dimension, parity, bounds...)."""


class ParseError(ArthurkitError):
    """A file could not be interpreted at all."""


class UnpairedSummand(ValidationError):
    """A summand that needs a dual partner has none of equal multiplicity."""


class InvalidExchange(ArthurkitError):
    """A row exchange produced out-of-range data.

    Transporting a datum to an adjacent order is always possible for data
    that index a nonzero member, so an invalid transport certifies that the
    member is zero; callers either surface this or fold it into a verdict.
    """


class PreconditionViolated(ArthurkitError):
    """An operation was applied outside its stated hypotheses."""


class TExceedsTn(PreconditionViolated):
    """Expansion amount outside 1..t_n."""


class DepthBudgetExceeded(ArthurkitError):
    """The nonvanishing driver exceeded its event budget; never a verdict."""


class CapacityExceeded(ArthurkitError):
    """A separation check was asked to enumerate too many orders."""


class ClosureBudgetExceeded(ArthurkitError):
    """Operator closure grew past the node cap."""


class NotUnique(ArthurkitError):
    """A graph has several sources or sinks where one was required."""


class PairMismatch(ArthurkitError):
    """A datum pair does not agree outside the operator-affected blocks."""


class AlphaTooSmall(ArthurkitError):
    """A lift was requested below the stabilization bound."""


class StartNotNonzero(ArthurkitError):
    """The chain's stabilization stage came out zero; internal error."""
