"""Exception types raised across optdt."""


class OptDTError(Exception):
    """Base class for every error raised by this package."""


class InputError(OptDTError):
    """Problem with user-supplied data (CLI maps these to exit code 4)."""


class ParseError(InputError):
    def __init__(self, message: str, row: int | None = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class SchemaError(InputError):
    pass


class EmptyDatasetError(InputError):
    pass


class InfeasibleDatasetError(InputError):
    """Some feature vector carries two different labels; no tree can fit it."""

    def __init__(self, contradictions):
        self.contradictions = list(contradictions)
        super().__init__(f"{len(self.contradictions)} contradictory feature vector(s)")


class DecodeError(InputError):
    pass


class EvaluationError(OptDTError):
    pass


class PruneError(OptDTError):
    pass


class EncodingBug(OptDTError):
    """A solver model violates an invariant the encoding guarantees."""


class StateError(OptDTError):
    pass


class ContradictoryDataset(OptDTError):
    pass


class InferenceTimeout(OptDTError):
    pass


class DepthCapExceeded(OptDTError):
    pass


class GeneratorError(OptDTError):
    pass
