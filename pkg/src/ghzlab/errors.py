"""Exception hierarchy shared by all ghzlab modules."""


class GhzError(Exception):
    """Base class for all ghzlab errors."""


class ValidationError(GhzError):
    """Malformed input: bad parameters, inconsistent dimensions, bad files."""


class DimensionError(GhzError):
    """Resource refusal: the requested n exceeds a desk-scale enumeration bound."""


class InternalCheckError(GhzError):
    """A mathematically guaranteed invariant failed; signals an implementation bug."""


class RetryExhaustedError(InternalCheckError):
    """A randomized retry loop ran out of attempts that should almost surely succeed."""


class StageError(GhzError):
    """Wraps an error raised inside a named pipeline stage."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"pipeline stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause
