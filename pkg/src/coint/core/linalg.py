"""Dense real-matrix kernels shared by every estimator.

All functions are pure: inputs are never modified and outputs are fresh
read-only arrays. Eigenvector and singular-vector columns follow one sign
convention (largest-magnitude entry positive) so printed tables are
reproducible across LAPACK builds.
"""

import logging
from typing import Tuple

import numpy as np
import scipy.linalg as sla

from .errors import (
    InvalidInputError,
    RankError,
    SingularMomentError,
    SingularRegressionError,
)
from .types import ArrayModel, EigenSystem, as_matrix

logger = logging.getLogger(__name__)

RANK_TOLERANCE = 1e-10
SYMMETRY_TOLERANCE = 1e-8


def _readonly(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array, dtype=float)
    array.setflags(write=False)
    return array


def sign_normalize(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so that its largest-magnitude entry is positive."""
    vectors = np.array(vectors, dtype=float)
    if vectors.size == 0:
        return vectors
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _symmetrize(A: np.ndarray, name: str) -> np.ndarray:
    A = as_matrix(A, name)
    if A.shape[0] != A.shape[1]:
        raise InvalidInputError(f"{name} must be square, got shape {A.shape}")
    if np.linalg.norm(A - A.T) > SYMMETRY_TOLERANCE * np.linalg.norm(A):
        raise InvalidInputError(f"{name} is not symmetric")
    return (A + A.T) / 2.0


def cholesky(M: np.ndarray, name: str = "M") -> np.ndarray:
    """Lower Cholesky factor of a symmetric positive-definite matrix.

    Raises:
        SingularMomentError: if M is not positive definite. The error carries
            the smallest eigenvalue of M as its pivot diagnostic.
    """
    M = _symmetrize(M, name)
    try:
        C = sla.cholesky(M, lower=True)
    except sla.LinAlgError:
        pivot = float(np.linalg.eigvalsh(M).min()) if M.size else 0.0
        raise SingularMomentError(f"{name} is not positive definite", pivot=pivot)
    diagonal = np.abs(np.diag(C))
    if diagonal.size and diagonal.min() <= RANK_TOLERANCE * max(diagonal.max(), 1e-300):
        raise SingularMomentError(
            f"{name} is numerically singular", pivot=float(diagonal.min() ** 2)
        )
    return C


def svd(S: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin singular value decomposition S = V·D·U′ for an m×n matrix, m ≤ n.

    Returns:
        (V, D, U) with V m×m orthogonal, D m×m diagonal non-increasing and
        non-negative, U n×m with orthonormal columns.
    """
    S = as_matrix(S, "S")
    m, n = S.shape
    if m > n:
        raise InvalidInputError(f"svd expects rows <= columns, got shape {S.shape}")
    left, singular, right_t = sla.svd(S, full_matrices=False)
    V = sign_normalize(left)
    flips = np.sign(np.sum(V * left, axis=0))
    U = right_t.T * flips
    return _readonly(V), _readonly(np.diag(singular)), _readonly(U)


def sym_eigen(A: np.ndarray) -> EigenSystem:
    """Eigendecomposition A = P·diag(λ)·P′ of a symmetric matrix, λ descending."""
    A = _symmetrize(A, "A")
    values, vectors = sla.eigh(A)
    order = np.argsort(values)[::-1]
    return EigenSystem(
        values=_readonly(values[order]),
        vectors=_readonly(sign_normalize(vectors[:, order])),
    )


def gen_eigen(L: np.ndarray, M: np.ndarray) -> EigenSystem:
    """Solve L·x = λ²·M·x for symmetric L and positive-definite M.

    M is whitened with its Cholesky factor (M = CC′), the standard symmetric
    problem C⁻¹·L·C⁻ᵀ is solved, and eigenvectors are mapped back so that
    W′·M·W = I.
    """
    L = _symmetrize(L, "L")
    C = cholesky(M, "M")
    if L.shape != C.shape:
        raise InvalidInputError(f"shape mismatch between L {L.shape} and M {C.shape}")
    half = sla.solve_triangular(C, L, lower=True)
    whitened = sla.solve_triangular(C, half.T, lower=True)
    standard = sym_eigen((whitened + whitened.T) / 2.0)
    W = sla.solve_triangular(C.T, standard.vectors, lower=False)
    values = np.array(standard.values)
    scale = max(float(np.abs(values).max()) if values.size else 0.0, 1.0)
    values[(values < 0) & (values > -1e-10 * scale)] = 0.0
    return EigenSystem(values=_readonly(values), vectors=_readonly(sign_normalize(W)))


def inv_sqrt(M: np.ndarray) -> np.ndarray:
    """Symmetric inverse square root R with R·M·R = I."""
    M = _symmetrize(M, "M")
    values, vectors = sla.eigh(M)
    if values.size and values.min() <= RANK_TOLERANCE * max(values.max(), 1e-300):
        raise SingularMomentError(
            "matrix is not positive definite", pivot=float(values.min())
        )
    R = (vectors / np.sqrt(values)) @ vectors.T
    return _readonly((R + R.T) / 2.0)


def perp(M: np.ndarray) -> np.ndarray:
    """Orthonormal basis Q of the orthogonal complement of span(M), Q′M = 0."""
    M = as_matrix(M, "M")
    p, r = M.shape
    if r >= p:
        raise RankError(f"orthogonal complement needs fewer columns than rows, got {M.shape}")
    if r == 0:
        return _readonly(np.eye(p))
    left, singular, _ = sla.svd(M, full_matrices=True)
    if singular[-1] <= RANK_TOLERANCE * singular[0]:
        raise RankError(
            f"matrix of shape {M.shape} is rank deficient "
            f"(smallest singular value {singular[-1]:.3e})"
        )
    return _readonly(sign_normalize(left[:, r:]))


class LeastSquaresFit(ArrayModel):
    """Coefficients, residuals and (X′X)⁻¹ of an equation-wise OLS fit"""

    coef: np.ndarray
    resid: np.ndarray
    xtx_inv: np.ndarray

    @property
    def nobs(self) -> int:
        return self.resid.shape[0]


def least_squares(y: np.ndarray, X: np.ndarray) -> LeastSquaresFit:
    """Regress every column of y on the columns of X by QR-based least squares.

    Raises:
        SingularRegressionError: if X is rank deficient.
    """
    y = np.asarray(y, dtype=float)
    squeeze = y.ndim == 1
    y2 = y.reshape(len(y), -1)
    X = np.asarray(X, dtype=float)
    if X.shape[0] != y2.shape[0]:
        raise InvalidInputError(
            f"regressand has {y2.shape[0]} rows but regressors have {X.shape[0]}"
        )
    if X.shape[1] == 0:
        coef = np.zeros((0, y2.shape[1]))
        return LeastSquaresFit(
            coef=_readonly(coef[:, 0] if squeeze else coef),
            resid=_readonly(y2[:, 0] if squeeze else y2),
            xtx_inv=_readonly(np.zeros((0, 0))),
        )
    if X.shape[0] < X.shape[1]:
        raise SingularRegressionError(
            f"{X.shape[1]} regressors but only {X.shape[0]} observations"
        )
    Q, R = sla.qr(X, mode="economic")
    diagonal = np.abs(np.diag(R))
    if diagonal.min() <= RANK_TOLERANCE * max(diagonal.max(), 1e-300):
        raise SingularRegressionError(
            f"regressors are collinear (column {int(np.argmin(diagonal))})"
        )
    coef = sla.solve_triangular(R, Q.T @ y2, lower=False)
    resid = y2 - X @ coef
    r_inv = sla.solve_triangular(R, np.eye(R.shape[0]), lower=False)
    xtx_inv = r_inv @ r_inv.T
    if squeeze:
        coef, resid = coef[:, 0], resid[:, 0]
    return LeastSquaresFit(
        coef=_readonly(coef), resid=_readonly(resid), xtx_inv=_readonly(xtx_inv)
    )


def solve_spd(M: np.ndarray, B: np.ndarray, name: str = "M") -> np.ndarray:
    """Solve M·X = B for positive-definite M."""
    C = cholesky(M, name)
    return _readonly(sla.cho_solve((C, True), np.asarray(B, dtype=float)))
