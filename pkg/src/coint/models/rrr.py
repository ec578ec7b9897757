"""Reduced-rank regression.

For y = C·x + ε with rank(C) = r, the weighted least-squares criterion
tr{Γ·E[(y − ABx)(y − ABx)′]} is minimized by

    A = Σyx·Σxx^{−1/2}·U_(r),   B = U_(r)′·Σxx^{−1/2}

where U_(r) holds the top r eigenvectors of Σxx^{−1/2}·Σxy·Γ·Σyx·Σxx^{−1/2}.
"""

import logging
from typing import Any, Literal, Optional, Tuple

import numpy as np
import scipy.linalg as sla

from ..core.errors import (
    InvalidInputError,
    InvalidRankError,
    SampleSizeError,
    SingularMomentError,
)
from ..core.linalg import RANK_TOLERANCE, cholesky, inv_sqrt, solve_spd, sym_eigen
from ..core.types import ArrayModel, as_matrix

logger = logging.getLogger(__name__)

TIE_TOLERANCE = 1e-10

Weight = Literal["residual", "total", "identity"]


class RrrEstimate(ArrayModel):
    """Rank-r factorization A·B of a coefficient matrix"""

    A: np.ndarray
    B: np.ndarray
    rank: int
    eigenvalues: np.ndarray
    criterion_value: Optional[float] = None
    # λ_r == λ_{r+1}: only the product A·B is identified
    tie: bool = False

    @property
    def coefficient(self) -> np.ndarray:
        return self.A @ self.B


def _check_rank(r: int, m: int, n: int) -> None:
    if not 0 <= r <= min(m, n):
        raise InvalidRankError(f"rank must be in 0..{min(m, n)}, got {r}")


def low_rank_approx(S: Any, r: int) -> Tuple[np.ndarray, float]:
    """Best rank-r approximation of S in Frobenius norm and its squared error."""
    S = as_matrix(S, "S")
    m, n = S.shape
    _check_rank(r, m, n)
    left, singular, right_t = sla.svd(S, full_matrices=False)
    P = (left[:, :r] * singular[:r]) @ right_t[:r]
    error = float(np.sum(singular[r:] ** 2))
    return P, error


def rrr_ls(
    Syx: Any,
    Sxx: Any,
    Gamma: Any,
    r: int,
    Syy: Optional[Any] = None,
) -> RrrEstimate:
    """Weighted least-squares reduced-rank coefficient from second moments.

    Raises:
        SingularMomentError: if Sxx or Gamma is not positive definite.
        InvalidRankError: if r is outside 0..min(m, n).
    """
    Syx = as_matrix(Syx, "Syx")
    m, n = Syx.shape
    _check_rank(r, m, n)
    Gamma = as_matrix(Gamma, "Gamma")
    if Gamma.shape != (m, m) or np.shape(Sxx) != (n, n):
        raise InvalidInputError(
            f"Syx {Syx.shape} is inconsistent with Gamma {Gamma.shape} and Sxx {np.shape(Sxx)}"
        )
    cholesky(Gamma, "Gamma")
    R = inv_sqrt(Sxx)
    weighted = R @ Syx.T @ Gamma @ Syx @ R
    eigen = sym_eigen((weighted + weighted.T) / 2.0)
    U = eigen.vectors[:, :r]
    A = Syx @ R @ U
    B = U.T @ R

    tie = False
    if 0 < r < n:
        scale = max(float(eigen.values[0]), 1.0)
        if abs(eigen.values[r - 1] - eigen.values[r]) <= TIE_TOLERANCE * scale:
            tie = True
            logger.warning(
                f"eigenvalues {r} and {r + 1} coincide; the rank-{r} factorization is not unique"
            )

    criterion = None
    if Syy is not None:
        Syy = as_matrix(Syy, "Syy")
        criterion = float(np.trace(Gamma @ Syy) - eigen.values[:r].sum())
    return RrrEstimate(
        A=A, B=B, rank=r, eigenvalues=eigen.values, criterion_value=criterion, tie=tie
    )


def rrr_ml(Y: Any, X: Any, r: int, weight: Weight = "residual") -> RrrEstimate:
    """Reduced-rank fit of Y (m×T) on X (n×T) from uncentered sample moments.

    `weight` selects Γ: the inverse full-rank residual covariance (the
    Gaussian ML choice), the inverse of Syy, or the identity. The first two
    give the same product A·B.
    """
    Y = as_matrix(Y, "Y")
    X = as_matrix(X, "X")
    m, T = Y.shape
    n = X.shape[0]
    if X.shape[1] != T:
        raise InvalidInputError(f"Y has {T} observations but X has {X.shape[1]}")
    if T <= m + n:
        raise SampleSizeError(f"need T > m + n = {m + n}, got {T}")
    Syy = Y @ Y.T / T
    Syx = Y @ X.T / T
    Sxx = X @ X.T / T
    if weight == "residual":
        resid = Syy - Syx @ solve_spd(Sxx, Syx.T, "Sxx")
        smallest = float(np.linalg.eigvalsh((resid + resid.T) / 2.0).min())
        if smallest <= RANK_TOLERANCE * float(np.linalg.eigvalsh(Syy).max()):
            raise SingularMomentError("residual covariance is singular", pivot=smallest)
        Gamma = solve_spd((resid + resid.T) / 2.0, np.eye(m), "residual covariance")
    elif weight == "total":
        Gamma = solve_spd(Syy, np.eye(m), "Syy")
    elif weight == "identity":
        Gamma = np.eye(m)
    else:
        raise InvalidInputError(f"unknown weight {weight!r}")
    return rrr_ls(Syx, Sxx, (Gamma + Gamma.T) / 2.0, r, Syy=Syy)
