"""Exception types shared across the toolkit.

Each editing/query failure mode gets its own class so callers (and the
session protocol) can map failures to distinct error codes instead of
string-matching messages.
"""


class EddError(Exception):
    """Base class for all toolkit errors."""

    code = "error"


class BoundsError(EddError):
    """A size or position is outside the allowed range."""

    code = "bounds"


class InvalidBrushError(EddError):
    """Attempt to paint a tile kind that brushes may not place."""

    code = "invalid-brush"


class ParseError(EddError):
    """Malformed room or dungeon text. Carries 1-based line/column."""

    code = "parse"

    def __init__(self, message: str, line: int, col: int = 0):
        super().__init__(f"line {line}, col {col}: {message}" if col else f"line {line}: {message}")
        self.line = line
        self.col = col


class NotFoundError(EddError):
    """Referenced room or connection does not exist."""

    code = "not-found"


class SelfLoopError(EddError):
    """A room cannot be connected to itself."""

    code = "self-loop"


class OccupiedEndpointError(EddError):
    """The border tile already holds a connection."""

    code = "occupied-endpoint"


class InvalidEndpointError(EddError):
    """Connection endpoint is not a passable border tile."""

    code = "invalid-endpoint"


class NoPathError(EddError):
    """No route exists between the requested tiles."""

    code = "no-path"


class PreconditionError(EddError):
    """An operation was called in a state it does not accept."""

    code = "precondition"


class ContractError(EddError):
    """Internal contract violated by the caller (wrong population, etc.)."""

    code = "contract"


class ValidationError(EddError):
    """An experiment or configuration value is out of spec."""

    code = "validation"
