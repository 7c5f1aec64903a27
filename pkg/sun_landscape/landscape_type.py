from enum import IntEnum, auto


class CriticalNature(IntEnum):
    GlobalMax = auto()
    GlobalMin = auto()
    LocalMaxNotGlobal = auto()
    LocalMinNotGlobal = auto()
    Saddle = auto()
    Degenerate = auto()

    def is_trap(self) -> bool:
        return self in (
            CriticalNature.LocalMaxNotGlobal,
            CriticalNature.LocalMinNotGlobal,
        )


class ProbeVerdict(IntEnum):
    Saddle = auto()
    LocalMax = auto()
    LocalMin = auto()
    Flat = auto()


class OptimizeMode(IntEnum):
    Maximize = auto()
    Minimize = auto()

    @staticmethod
    def from_str(name: str) -> "OptimizeMode":
        name = name.lower()
        if name in ("max", "maximize"):
            return OptimizeMode.Maximize
        if name in ("min", "minimize"):
            return OptimizeMode.Minimize
        raise RuntimeError("unknown optimize mode:" + name)


class OptimizerHookPoint(IntEnum):
    BEFORE_RUN = auto()
    BEFORE_ITERATION = auto()
    AFTER_ITERATION = auto()
    AFTER_RUN = auto()


class StopExecutingException(Exception):
    pass


class LandscapeError(RuntimeError):
    pass


class DimensionMismatchError(LandscapeError):
    pass


class NotHermitianError(LandscapeError):
    pass


class NotSkewHermitianError(LandscapeError):
    pass


class NotUnitaryError(LandscapeError):
    pass


class NotSpecialUnitaryError(NotUnitaryError):
    pass


class IrregularPointError(LandscapeError):
    pass


class WestPoleError(LandscapeError):
    pass


class NotTangentError(LandscapeError):
    pass


class NotCriticalError(LandscapeError):
    pass


class AmbiguousMatchError(LandscapeError):
    pass


class InvariantViolationError(LandscapeError):
    pass


class LineSearchError(LandscapeError):
    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace


class MatrixFileError(LandscapeError):
    pass


class VerificationError(LandscapeError):
    pass
