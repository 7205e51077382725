"""Exception types. Each carries a stable machine-readable ``code``."""

from __future__ import annotations


class RenewalError(Exception):
    code = "ERROR"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)


class NonConvergedError(RenewalError):
    code = "NON_CONVERGED"


class StepMismatchError(RenewalError):
    code = "STEP_MISMATCH"


class InnerNotStrictError(RenewalError):
    code = "INNER_NOT_STRICT"


class ZeroConstantTermError(RenewalError):
    code = "ZERO_CONSTANT_TERM"


class BranchDomainError(RenewalError):
    code = "BRANCH_DOMAIN"


class DimMismatchError(RenewalError):
    code = "DIM_MISMATCH"


class NonPositiveSampleError(RenewalError):
    code = "NONPOSITIVE_SAMPLE"


class FNotStrictError(RenewalError):
    code = "F_NOT_STRICT"


class GridMismatchError(RenewalError):
    code = "GRID_MISMATCH"


class DisconnectedError(RenewalError):
    code = "DISCONNECTED"


class BipartiteSpectrumError(RenewalError):
    code = "BIPARTITE_SPECTRUM"


class HorizonShortError(RenewalError):
    code = "HORIZON_SHORT"


class UnsupportedParamsError(RenewalError):
    code = "UNSUPPORTED_PARAMS"


class TailCapExceededError(RenewalError):
    code = "TAIL_CAP_EXCEEDED"


class InvalidParamsError(RenewalError, ValueError):
    code = "INVALID_PARAMS"
