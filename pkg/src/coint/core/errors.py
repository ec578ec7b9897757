from typing import Optional


class CointError(Exception):
    """Base class for every error raised by the toolkit"""

    exit_code: int = 2


class DataError(CointError):
    """The input data cannot support the requested analysis"""

    exit_code = 1


class LoadError(DataError):
    """A data file could not be parsed into a panel"""

    def __init__(
        self, message: str, row: Optional[int] = None, column: Optional[str] = None
    ):
        location = []
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column {column!r}")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)
        self.row = row
        self.column = column


class SampleSizeError(DataError):
    """Not enough observations for the requested transform or fit"""


class InvalidInputError(DataError):
    """Non-finite, mis-shaped or otherwise malformed numeric input"""


class NumericalError(CointError):
    """A computation hit a numerically degenerate configuration"""

    exit_code = 2


class SingularMomentError(NumericalError):
    """A moment matrix that must be positive definite is not"""

    def __init__(self, message: str, pivot: Optional[float] = None):
        if pivot is not None:
            message = f"{message} (smallest pivot {pivot:.3e})"
        super().__init__(message)
        self.pivot = pivot


class SingularRegressionError(NumericalError):
    """Regressors of a least-squares fit are collinear"""


class RankError(NumericalError):
    """A matrix expected to have full column rank does not"""


class DegenerateGeometryError(NumericalError):
    """The loading matrices admit no permanent-transitory decomposition"""

    def __init__(self, message: str, condition: Optional[float] = None):
        if condition is not None:
            message = f"{message} (condition number {condition:.3e})"
        super().__init__(message)
        self.condition = condition


class NoDecompositionError(NumericalError):
    """A rank-zero system has no permanent-transitory decomposition"""


class InvalidEigenvalueError(NumericalError):
    """Squared canonical correlations must lie in [0, 1)"""


class NumericalInconsistencyError(NumericalError):
    """A statistic left its theoretical range by more than round-off"""


class UsageProblem(CointError):
    """The request contradicts the model's hypotheses"""

    exit_code = 2


class InvalidRankError(UsageProblem):
    """Requested rank outside the admissible range"""


class InvalidRestrictionError(UsageProblem):
    """Restriction matrix incompatible with the fitted rank"""
