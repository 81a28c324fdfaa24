"""Shared exception types."""


class InvariantViolation(RuntimeError):
    """A guarantee that should hold by construction failed.

    Raised only for internal errors (a bug), never for bad user input.
    """


class ConstructionStalled(RuntimeError):
    """A staged construction ran out of surviving indices.

    Carries the stage position and a diagnostics dict (ball sizes, hub
    multiplicities, survivor counts) for post-mortem inspection.
    """

    def __init__(self, message: str, stage=None, diagnostics=None):
        super().__init__(message)
        self.stage = stage
        self.diagnostics = dict(diagnostics or {})
