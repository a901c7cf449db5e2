"""Exception hierarchy shared by the engine, the CLI and the HTTP service.

Every error carries a stable machine-readable ``code`` so transport layers
(CLI exit codes, HTTP bodies) can map failures without string matching.
"""
from __future__ import annotations


class MorphspaceError(Exception):
    """Base class for all engine errors."""

    code = "error"


class FieldError(MorphspaceError):
    """Malformed morphological field (structure, ids, duplicates)."""

    code = "invalid-field"


class ConstraintError(MorphspaceError):
    """Exclusion constraint references unknown ids or an illegal pair."""

    code = "invalid-constraint"


class ScaleError(MorphspaceError):
    """Malformed rating scale or unknown band label."""

    code = "invalid-scale"


class IngestError(MorphspaceError):
    """Survey response rows that cannot be parsed or do not match the field."""

    code = "ingest-error"


class PairError(MorphspaceError):
    """Pair operations on unknown, same-dimension or unscored conditions."""

    code = "invalid-pair"


class ShapeError(MorphspaceError):
    """Profile vectors disagree on index or are too short to correlate."""

    code = "shape-mismatch"


class ParamError(MorphspaceError):
    """Out-of-range analysis parameter (k, threshold, bins, seed...)."""

    code = "invalid-parameter"


class AssemblyError(MorphspaceError):
    """Scenario assembly cannot satisfy the one-condition-per-dimension rule."""

    code = "assembly-error"


class NotFoundError(MorphspaceError):
    """Store lookup for a document, revision or artifact that does not exist."""

    code = "not-found"


class RevisionConflictError(MorphspaceError):
    """Stale write: the caller's base revision is no longer current."""

    code = "revision-conflict"


class BudgetExceededError(MorphspaceError):
    """Requested computation is larger than the configured compute budget."""

    code = "too-large"


class StageError(MorphspaceError):
    """A pipeline stage failed after configuration validation passed."""

    code = "stage-failure"

    def __init__(self, stage: str, cause: MorphspaceError) -> None:
        super().__init__(f"stage {stage}: {cause}")
        self.stage = stage
        self.cause = cause
