"""Exception types shared across the toolkit.

Every domain failure raises a subclass of :class:`RefModelError`, so callers
(notably the CLI) can separate domain errors from programming errors.
"""


class RefModelError(Exception):
    """Base class for all domain errors raised by this package."""


class DuplicateId(RefModelError):
    """An element with the same id already exists in the target container."""


class UnknownElement(RefModelError):
    """A referenced block, port, or planner does not exist."""


class IllegalTraceKind(RefModelError):
    """The (source layer, target layer, kind) triple is not a permitted trace."""


class UnknownAsset(RefModelError):
    """The repository holds no asset under the given id."""


class WrongAssetKind(RefModelError):
    """The asset exists but is not of the kind the operation needs."""


class IllegalOverride(RefModelError):
    """An adapt/extend override touches a field that must stay fixed."""


class DuplicatePortId(RefModelError):
    """An added port id clashes with an existing port on the block."""


class ParseError(RefModelError):
    """A persisted document is malformed; the message names line or field."""


class SchemaVersionMismatch(ParseError):
    """The document's schema_version is not one this code understands."""


class TypeMismatch(RefModelError):
    """Two ports cannot be wired: direction or interface type differ."""


class AlreadyBound(RefModelError):
    """The required port already has a provider connected."""


class AnchorUnbound(RefModelError):
    """A pattern anchor has no binding to an existing model block."""


class AnchorKindMismatch(RefModelError):
    """An anchor binding points at a block of the wrong layer or kind."""


class MergeConflict(RefModelError):
    """Pattern application found an existing block with the same id but different content."""


class InvalidViewpoint(RefModelError):
    """The (subject, aspect) pair is not a usable viewpoint."""


class Unsatisfiable(RefModelError):
    """Map generation parameters cannot yield at least one free cell."""


class RaggedRows(ParseError):
    """Map text rows have differing lengths."""


class BadSymbol(ParseError):
    """Map text contains a symbol outside 0-3 and X."""

    def __init__(self, message: str, position=None):
        super().__init__(message)
        self.position = position


class StartBlocked(RefModelError):
    """The requested start cell is an obstacle or out of bounds."""


class InvalidPath(RefModelError):
    """A path is not a valid walk over free cells of the map."""


class NoAlternatives(RefModelError):
    """The slot block cannot be ranked: it is not an exchangeable algorithm block."""
