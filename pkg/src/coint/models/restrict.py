"""Likelihood-ratio tests of linear restrictions α⊥ = Gθ on the common trends.

Under H0 the k = p − r common-trend loadings lie in the span of the m
columns of G (k ≤ m < p). The restricted problem

    (G′S01S11⁻¹S10G)·y = λ²(G′S00G)·y

is solved and its k smallest eigenvalues are compared with the k smallest
unrestricted ones; the statistic is χ² with k(p − m) degrees of freedom.
"""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.special import gammaincc, gammainccinv

from ..core.errors import (
    InvalidEigenvalueError,
    InvalidInputError,
    InvalidRestrictionError,
    NumericalInconsistencyError,
)
from ..core.linalg import gen_eigen, solve_spd
from ..core.types import ArrayModel, as_matrix
from .johansen import JohansenFit

logger = logging.getLogger(__name__)

ROUND_OFF = 1e-8
SIGNIFICANCE = 0.05


def chi_square_sf(x: float, df: int) -> float:
    """P(χ²_df > x) through the regularized upper incomplete gamma function."""
    if x < 0:
        raise InvalidInputError(f"chi-square statistic must be >= 0, got {x}")
    if df == 0:
        if x == 0:
            return 1.0
        raise InvalidInputError("zero degrees of freedom only admit a zero statistic")
    if df < 0:
        raise InvalidInputError(f"degrees of freedom must be >= 0, got {df}")
    return float(gammaincc(df / 2.0, x / 2.0))


def chi_square_quantile(q: float, df: int) -> float:
    """x with P(χ²_df ≤ x) = q."""
    if not 0.0 < q < 1.0:
        raise InvalidInputError(f"probability must be in (0, 1), got {q}")
    if df < 1:
        raise InvalidInputError(f"degrees of freedom must be >= 1, got {df}")
    return float(2.0 * gammainccinv(df / 2.0, 1.0 - q))


class RestrictionTest(ArrayModel):
    G: np.ndarray
    m: int
    theta_hat: np.ndarray
    alpha_perp_restricted: np.ndarray
    restricted_eigenvalues: np.ndarray
    lr_stat: float
    df: int
    p_value: float
    critical_value: float
    excluded: Tuple[str, ...] = ()

    @property
    def rejected(self) -> bool:
        return self.p_value < SIGNIFICANCE


class ExclusionScanRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    excluded: Tuple[str, ...]
    test: RestrictionTest


def selection_matrix(names: Sequence[str], excluded: Sequence[str]) -> np.ndarray:
    """Canonical basis vectors of every series not excluded, in panel order."""
    names = list(names)
    unknown = [name for name in excluded if name not in names]
    if unknown:
        raise InvalidInputError(f"unknown series {unknown}; have {names}")
    if len(set(excluded)) != len(excluded):
        raise InvalidInputError(f"series excluded twice: {list(excluded)}")
    keep = [i for i, name in enumerate(names) if name not in excluded]
    return np.eye(len(names))[:, keep]


def test_alpha_perp(
    fit: JohansenFit, G: np.ndarray, excluded: Sequence[str] = ()
) -> RestrictionTest:
    """Test H0: α⊥ = Gθ for the fitted rank.

    Raises:
        InvalidRestrictionError: unless p − r ≤ m < p and G has full column rank.
        SingularMomentError: if G′S00G is singular.
        NumericalInconsistencyError: if the statistic is clearly negative.
    """
    p, r = fit.p, fit.r
    k = p - r
    G = as_matrix(G, "G")
    if G.shape[0] != p:
        raise InvalidRestrictionError(f"G must have {p} rows, got {G.shape[0]}")
    m = G.shape[1]
    if not k <= m < p:
        raise InvalidRestrictionError(
            f"restriction needs p - r = {k} <= m < p = {p} columns, got m = {m}"
        )
    if np.linalg.matrix_rank(G) < m:
        raise InvalidRestrictionError("G must have full column rank")

    S = fit.moments
    L = G.T @ S.S01 @ solve_spd(S.S11, S.S10 @ G, "S11")
    restricted = gen_eigen(L, G.T @ S.S00 @ G)
    values = restricted.values
    if values.max() >= 1.0:
        raise InvalidEigenvalueError(f"restricted eigenvalue {values.max():.6g} >= 1")
    theta_hat = restricted.vectors[:, m - k :]

    unrestricted = fit.eigenvalues
    lr = 0.0
    for j in range(k):
        lr += np.log1p(-values[m - k + j]) - np.log1p(-unrestricted[r + j])
    lr = float(-S.nobs * lr)
    if lr < 0.0:
        if lr < -ROUND_OFF:
            raise NumericalInconsistencyError(f"likelihood-ratio statistic {lr:.3e} is negative")
        logger.warning(f"clamping round-off likelihood ratio {lr:.3e} to zero")
        lr = 0.0

    df = k * (p - m)
    return RestrictionTest(
        G=G,
        m=m,
        theta_hat=theta_hat,
        alpha_perp_restricted=G @ theta_hat,
        restricted_eigenvalues=values,
        lr_stat=lr,
        df=df,
        p_value=chi_square_sf(lr, df),
        critical_value=chi_square_quantile(1.0 - SIGNIFICANCE, df),
        excluded=tuple(excluded),
    )


def exclusion_scan(
    fit: JohansenFit, max_excluded: int, workers: int = 1
) -> List[ExclusionScanRow]:
    """Test the exclusion of every set of 1..max_excluded series.

    Rows come back sorted by p-value, largest first; equal p-values keep
    enumeration order (by subset size, then lexicographically).
    """
    p, r = fit.p, fit.r
    if not 1 <= max_excluded <= r:
        raise InvalidRestrictionError(
            f"can exclude between 1 and r = {r} series at a time, got {max_excluded}"
        )
    if workers < 1:
        raise InvalidInputError(f"workers must be >= 1, got {workers}")
    subsets = [
        tuple(fit.names[i] for i in combo)
        for size in range(1, max_excluded + 1)
        for combo in itertools.combinations(range(p), size)
    ]

    def run(excluded: Tuple[str, ...]) -> ExclusionScanRow:
        G = selection_matrix(fit.names, excluded)
        return ExclusionScanRow(excluded=excluded, test=test_alpha_perp(fit, G, excluded))

    logger.info(f"testing {len(subsets)} exclusion sets with {workers} worker(s)")
    if workers == 1:
        rows = [run(excluded) for excluded in subsets]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run, subsets))
    return sorted(rows, key=lambda row: -row.test.p_value)
