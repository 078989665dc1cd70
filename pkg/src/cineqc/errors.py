"""Exception types raised by the cineqc library."""


class CineQCError(Exception):
    """Base class for all cineqc errors."""


class InvalidLength(CineQCError):
    pass


class InvalidBin(CineQCError):
    pass


class InvalidConfig(CineQCError):
    pass


class InsufficientFrames(CineQCError):
    pass


class DegenerateIntensity(CineQCError):
    pass


class NoMotionDetected(CineQCError):
    pass


class NoCircularStructure(CineQCError):
    pass


class InvalidRoi(CineQCError):
    pass


class ShapeMismatch(CineQCError):
    pass


class NonFiniteGradient(CineQCError):
    pass


class EmptyClass(CineQCError):
    pass


class EmptyTrainingSet(CineQCError):
    pass


class InvalidK(CineQCError):
    pass


class EmptyEvaluation(CineQCError):
    pass


class FrameTooSmall(CineQCError):
    pass


class DatasetFormatError(CineQCError):
    pass
