"""Exception hierarchy.

Every contract violation carries a short machine-readable ``code`` and an
optional ``location`` (the offending token, flag or identifier) so the CLI
can report it as structured JSON.
"""


class GraphStarError(ValueError):
    code = "contract_violation"

    def __init__(self, message, location=None):
        super().__init__(message)
        self.message = message
        self.location = location

    def to_dict(self):
        return {"code": self.code, "message": self.message, "location": self.location}


class GraphFormatError(GraphStarError):
    code = "malformed_document"


class DuplicateIdentifierError(GraphStarError):
    code = "duplicate_identifier"


class DanglingEndpointError(GraphStarError):
    code = "dangling_endpoint"


class GraphMismatchError(GraphStarError):
    code = "graph_mismatch"


class DimensionMismatchError(GraphStarError):
    code = "dimension_mismatch"


class PreconditionError(GraphStarError):
    code = "precondition"


class SizeBoundError(GraphStarError):
    code = "size_bound_exceeded"


class InvariantError(RuntimeError):
    """An internal invariant failed; this is a bug, not bad input."""
