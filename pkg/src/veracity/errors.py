"""Exception taxonomy for the pipeline.

Grouped so the CLI can map whole families to exit codes: usage problems,
data/validation problems, and numeric failures.
"""


class VeracityError(Exception):
    """Base class for all pipeline errors."""


class DataError(VeracityError):
    """A problem with input data or file formats (CLI exit code 2)."""


class NumericError(VeracityError):
    """A numeric failure such as divergence (CLI exit code 3)."""


# dataset
class MalformedManifest(DataError):
    pass


class TooFewSamples(DataError):
    pass


# audio
class UnsupportedWav(DataError):
    pass


class CorruptWav(DataError):
    pass


class DomainError(DataError):
    pass


class ConfigError(DataError):
    pass


class SignalTooShort(DataError):
    pass


# visual
class MalformedLandmarks(DataError):
    pass


class DegenerateFace(DataError):
    def __init__(self, message: str, frame: int | None = None):
        super().__init__(message)
        self.frame = frame


# text
class MalformedEmbedding(DataError):
    pass


# fusion
class MissingModality(DataError):
    pass


class DuplicateModality(DataError):
    pass


# neural core / training
class ShapeMismatch(VeracityError):
    pass


class KernelTooLarge(VeracityError):
    pass


class EmptyTrainingSet(DataError):
    pass


class NonFiniteLoss(NumericError):
    def __init__(self, message: str, epoch: int, batch: int):
        super().__init__(message)
        self.epoch = epoch
        self.batch = batch


class BadCheckpoint(DataError):
    pass
