"""Exception types shared across the toolkit.

Every error raised by lexiplex derives from :class:`LexiplexError` so callers
(and the CLI) can map failures to stable, module-qualified codes via
:func:`error_code`. Errors that several modules raise (e.g. ``UnknownLayer``)
carry the domain of their canonical owner.
"""


class LexiplexError(Exception):
    """Base class for all lexiplex errors."""

    domain = "lexiplex"


def error_code(exc: LexiplexError) -> str:
    """Stable code for an error, e.g. ``multiplex.BadWeight``."""
    return f"{exc.domain}.{type(exc).__name__}"


# -- network construction / lookup -------------------------------------------

class DuplicateNode(LexiplexError):
    domain = "multiplex"


class DuplicateLayer(LexiplexError):
    domain = "multiplex"


class UnknownNode(LexiplexError):
    domain = "multiplex"


class UnknownLayer(LexiplexError):
    domain = "multiplex"


class MissingEndpoint(LexiplexError):
    domain = "multiplex"


class BadWeight(LexiplexError):
    domain = "multiplex"


class BadEdge(LexiplexError):
    """Edge shape not allowed (self-loop, or a forbidden cross-layer edge)."""

    domain = "multiplex"


class ParseError(LexiplexError):
    """Malformed input file; carries the offending line number."""

    domain = "multiplex"

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


# -- analysis -----------------------------------------------------------------

class TooLarge(LexiplexError):
    domain = "viability"


class BadOrdering(LexiplexError):
    domain = "growth"


class MissingAttribute(LexiplexError):
    domain = "growth"


class EmptySet(LexiplexError):
    domain = "growth"


class EmptyLVC(LexiplexError):
    domain = "null_models"


class BadSeed(LexiplexError):
    domain = "activation"


# -- scoring ------------------------------------------------------------------

class DimMismatch(LexiplexError):
    domain = "scoring"


class ZeroVector(LexiplexError):
    domain = "scoring"


class MissingReference(LexiplexError):
    domain = "scoring"


class EmptyCell(LexiplexError):
    domain = "scoring"


# -- experiment ---------------------------------------------------------------

class UnknownTrial(LexiplexError):
    domain = "experiment"


class MissingImage(LexiplexError):
    domain = "experiment"


class OutOfOrder(LexiplexError):
    domain = "experiment"


class Duplicate(LexiplexError):
    domain = "experiment"


class BadRecord(LexiplexError):
    domain = "experiment"


class StoreError(LexiplexError):
    domain = "experiment"


class UnknownSession(LexiplexError):
    domain = "experiment"
