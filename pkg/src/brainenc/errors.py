"""Exception hierarchy.

Every error raised on purpose derives from :class:`BrainencError` and carries
an ``exit_code`` so the command-line front end can map failures to process
exit status (1 = validation, 2 = numeric, 3 = missing upstream output).
"""


class BrainencError(Exception):
    exit_code = 1


class ValidationError(BrainencError):
    """Bad inputs detected at a boundary."""

    exit_code = 1


class NumericError(BrainencError):
    """A numeric routine could not produce a valid result."""

    exit_code = 2


# data_model / pairing
class MismatchedSamples(ValidationError):
    pass


class NonFiniteValues(ValidationError):
    pass


class EmptyMatrix(ValidationError):
    pass


# ingest
class ParseError(ValidationError):
    pass


class MissingFile(ValidationError):
    pass


class SchemaViolation(ValidationError):
    """Manifest schema violation; message starts with the offending field path."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class UnsupportedDtype(ValidationError):
    pass


class UnsupportedRank(ValidationError):
    pass


class CorruptHeader(ValidationError):
    pass


class IoError(BrainencError):
    exit_code = 1


# encoder
class InvalidK(ValidationError):
    pass


class ShapeMismatch(ValidationError):
    pass


class SingularSystem(NumericError):
    pass


# metrics
class ZeroVector(ValidationError):
    pass


class TooFewSamples(ValidationError):
    pass


class ZeroVariance(NumericError):
    pass


# stats
class DegenerateGroups(ValidationError):
    pass


class ZeroWithinVariance(NumericError):
    pass


class OutOfRangeP(ValidationError):
    pass


# taskonomy / exports
class LengthMismatch(ValidationError):
    pass


class EmptyInput(ValidationError):
    pass


# pipeline
class MissingScores(ValidationError):
    pass


class FilterEmpty(ValidationError):
    pass


class MissingUpstream(BrainencError):
    """A pipeline stage was invoked before the stage that feeds it."""

    exit_code = 3
