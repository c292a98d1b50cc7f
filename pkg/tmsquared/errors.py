"""Exceptions raised by tmsquared"""


class TmSquaredError(ValueError):
    """Base class of all tmsquared errors"""


class SchemaError(TmSquaredError):
    """A table does not match the feature schema"""


class ParseError(TmSquaredError):
    """A cell could not be parsed"""

    def __init__(self, message, row=None):
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row


class EmptyInputError(TmSquaredError):
    """Nothing to work on"""


class SeriesInvariantError(TmSquaredError):
    """A series or record breaks one of its invariants"""


class ConfigError(TmSquaredError):
    """Invalid configuration value"""


class StructureError(TmSquaredError):
    """Inconsistent internal structure (shapes, lengths, levels)"""


class LevelError(TmSquaredError):
    """Wavelet level out of range"""


class NoJumpFound(TmSquaredError):
    """No coefficient peak rises above the detection threshold"""


class InconsistentJudgmentError(TmSquaredError):
    """AHP pairwise judgments are too inconsistent"""

    def __init__(self, ratio):
        super().__init__(f"AHP consistency ratio {ratio:.4f} exceeds 0.1")
        self.ratio = ratio


class PressureMatrixError(TmSquaredError):
    """Malformed pressure matrix"""


class UnknownPlayerError(TmSquaredError):
    """A player is missing from a lookup table"""


class UnresolvedTieError(TmSquaredError):
    """Equal momentum and no ranking can break the tie"""


class TrainingDivergedError(TmSquaredError):
    """Training produced a non-finite loss"""

    def __init__(self, epoch):
        super().__init__(f"training diverged at epoch {epoch}")
        self.epoch = epoch


class ModelFileError(TmSquaredError):
    """Unreadable or corrupt model file"""


class ModelVersionError(ModelFileError):
    """Model file written by an unsupported format version"""


class DatasetTooSmallError(TmSquaredError):
    """Not enough matches for the benchmark protocol"""
