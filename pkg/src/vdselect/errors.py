"""Exception hierarchy shared across the package."""


class VdSelectError(Exception):
    """Base class for all vdselect errors."""


class DimensionMismatch(VdSelectError):
    pass


class DegenerateColumn(VdSelectError):
    """A column collapses to (numerically) zero after centering."""


class DegenerateDirection(VdSelectError):
    """Candidate direction lies in the span of the current basis."""


class DegenerateResidual(VdSelectError):
    """Sampled orthogonal complement vanished twice in a row."""


class ShadowShapeMismatch(VdSelectError):
    pass


class BasisExhausted(VdSelectError):
    """No coordinates left to reveal: the basis already spans the subspace."""


class OutOfOrder(VdSelectError):
    """Projection rows must be appended once per basis extension, in order."""


class AlreadyRealized(VdSelectError):
    pass


class SingularGram(VdSelectError):
    """Active Gram matrix is numerically rank deficient."""


class ZeroResponse(VdSelectError):
    pass


class EmptySample(VdSelectError):
    pass


class RankOutOfRange(VdSelectError):
    pass


class MatrixFileError(VdSelectError):
    """Base class for binary matrix container problems."""


class BadMagic(MatrixFileError):
    pass


class BadVersion(MatrixFileError):
    pass


class TruncatedFile(MatrixFileError):
    pass


class SizeMismatch(MatrixFileError):
    pass


class MemoryBudgetExceeded(VdSelectError):
    pass
