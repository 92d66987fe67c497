class SoftHashError(Exception):
    """Base exception for hashing, retrieval and artifact errors."""


class LabelError(SoftHashError):
    """Raised when a label vector is empty, non-binary or of the wrong length."""


class DimensionError(SoftHashError):
    """Raised when array shapes or code lengths do not line up."""


class NonFiniteError(SoftHashError):
    """Raised when a NaN or infinity appears in activations, parameters or losses."""


class TrainingDivergedError(NonFiniteError):
    """Raised when the training cost becomes non-finite."""

    def __init__(self, iteration: int, detail: str) -> None:
        self.iteration = iteration
        super().__init__(f"Training diverged at iteration {iteration}: {detail}")


class EmptyBatchError(SoftHashError):
    """Raised when a loss is requested for a batch without pairs."""


class NoRelevantItemsError(SoftHashError):
    """Raised when no query has a relevant item, so MAP/WAP are undefined."""


class DatasetError(SoftHashError):
    """Raised when a dataset cannot satisfy a sampling or split request."""


class ArtifactFormatError(SoftHashError):
    """Raised when an artifact file has a bad header or inconsistent body."""


class InvalidArgumentError(SoftHashError, ValueError):
    """Raised when a service is called with an out-of-range argument (cutoff, pair count, chunk size)."""
