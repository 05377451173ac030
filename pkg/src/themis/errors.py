"""Exception hierarchy shared across the engine."""


class ThemisError(Exception):
    """Base class for all engine errors."""


class ModelParseError(ThemisError):
    """Raised when a model document or CSV cannot be parsed at all."""


class ModelValidationError(ThemisError):
    """Raised when a parsed document violates a structural invariant.

    ``path`` points at the offending location inside the document,
    e.g. ``actors[2].goals[0].weight``.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class NetworkError(ThemisError):
    """Structural problem in a scenario network (cycle, bad CPT, ...)."""


class InferenceError(ThemisError):
    """Inference cannot produce a marginal (e.g. contradictory evidence)."""


class PipelineError(ThemisError):
    """A pipeline stage failed; ``stage`` names it."""

    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(f"[{stage}] {message}")
