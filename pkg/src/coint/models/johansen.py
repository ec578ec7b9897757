"""Johansen reduced-rank estimation of a cointegrated VAR.

Steps:
    1-2. concentrate ∇X_t and X_{t−1} on a constant and lagged differences
    3.   form the residual moment matrices S00, S01, S11
    4.   solve the primal and dual generalized eigenproblems
    5.   read α̂, β̂, α̂⊥, β̂⊥ off the eigenvectors for a chosen rank r
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from ..core.errors import (
    InvalidEigenvalueError,
    InvalidInputError,
    InvalidRankError,
    SampleSizeError,
)
from ..core.linalg import gen_eigen, least_squares, solve_spd
from ..core.series import SeriesPanel, build_vecm_blocks
from ..core.types import ArrayModel, as_matrix
from .var import VecmModel

logger = logging.getLogger(__name__)


class TraceTable(BaseModel):
    """95% trace critical values indexed by p − r = 1, 2, …"""

    model_config = ConfigDict(frozen=True)

    values: Tuple[float, ...]

    @field_validator("values")
    @classmethod
    def _increasing(cls, values: Tuple[float, ...]) -> Tuple[float, ...]:
        if not values:
            raise ValueError("trace table is empty")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("trace critical values must increase with p - r")
        return values

    def critical_value(self, n_trends: int) -> float:
        if not 1 <= n_trends <= len(self.values):
            raise InvalidInputError(
                f"no trace critical value for p - r = {n_trends}; "
                f"table covers 1..{len(self.values)}"
            )
        return self.values[n_trends - 1]


# unrestricted constant
DEFAULT_TRACE_TABLE = TraceTable(
    values=(3.84, 15.41, 29.8, 47.71, 69.61, 95.51, 125.42, 159.32, 197.22)
)


class MomentSet(ArrayModel):
    S00: np.ndarray
    S01: np.ndarray
    S11: np.ndarray
    nobs: int

    @property
    def S10(self) -> np.ndarray:
        return self.S01.T

    @property
    def p(self) -> int:
        return self.S00.shape[0]


class EigenSolution(ArrayModel):
    """Shared spectrum λ² with primal (W′S11W = I) and dual (Z′S00Z = I) vectors"""

    eigenvalues: np.ndarray
    W: np.ndarray
    Z: np.ndarray


class TraceTest(BaseModel):
    model_config = ConfigDict(frozen=True)

    trace_stats: Tuple[float, ...]
    critical_values: Tuple[float, ...]
    rank: int


class JohansenFit(ArrayModel):
    names: Tuple[str, ...]
    k: int
    r: int
    eigenvalues: np.ndarray
    W: np.ndarray
    Z: np.ndarray
    moments: MomentSet
    alpha: np.ndarray
    beta: np.ndarray
    alpha_perp: np.ndarray
    beta_perp: np.ndarray
    trace: TraceTest

    @property
    def p(self) -> int:
        return len(self.eigenvalues)

    @property
    def nobs(self) -> int:
        return self.moments.nobs

    @property
    def long_run(self) -> np.ndarray:
        return self.alpha @ self.beta.T

    def display(self, matrix: np.ndarray) -> np.ndarray:
        """Eigenvector-based matrices rescaled by 1/√nobs for tables."""
        return np.asarray(matrix) / np.sqrt(self.nobs)


def concentrate(panel: SeriesPanel, k: int) -> Tuple[np.ndarray, np.ndarray, int]:
    """Residuals R0 of ∇X_t and R1 of X_{t−1} on [1, ∇X_{t−1}, …, ∇X_{t−k+1}]."""
    if panel.T < k + panel.p + 2:
        raise SampleSizeError(
            f"Johansen with k={k} on {panel.p} series needs T >= {k + panel.p + 2}, got {panel.T}"
        )
    blocks = build_vecm_blocks(panel, k)
    regressors = np.hstack([np.ones((blocks.effective_sample, 1)), blocks.w])
    R0 = least_squares(blocks.y, regressors).resid
    R1 = least_squares(blocks.xlag, regressors).resid
    return R0, R1, blocks.effective_sample


def moments(R0: np.ndarray, R1: np.ndarray) -> MomentSet:
    R0 = as_matrix(R0, "R0")
    R1 = as_matrix(R1, "R1")
    if R0.shape != R1.shape:
        raise InvalidInputError(f"residual blocks differ in shape: {R0.shape} vs {R1.shape}")
    nobs = R0.shape[0]
    S00 = R0.T @ R0 / nobs
    S11 = R1.T @ R1 / nobs
    return MomentSet(
        S00=(S00 + S00.T) / 2.0, S01=R0.T @ R1 / nobs, S11=(S11 + S11.T) / 2.0, nobs=nobs
    )


def _check_unit_interval(values: np.ndarray) -> None:
    if values.size and (values.min() < 0.0 or values.max() >= 1.0):
        raise InvalidEigenvalueError(
            f"squared canonical correlations must lie in [0, 1), got "
            f"[{values.min():.6g}, {values.max():.6g}]"
        )


def solve_eigenproblems(m: MomentSet) -> EigenSolution:
    """Primal S10S00⁻¹S01·w = λ²S11·w and dual S01S11⁻¹S10·z = λ²S00·z.

    Raises:
        SingularMomentError: if S00 or S11 is not positive definite.
        InvalidEigenvalueError: if a squared correlation leaves [0, 1).
    """
    primal = gen_eigen(m.S10 @ solve_spd(m.S00, m.S01, "S00"), m.S11)
    dual = gen_eigen(m.S01 @ solve_spd(m.S11, m.S10, "S11"), m.S00)
    _check_unit_interval(primal.values)
    gap = float(np.abs(primal.values - dual.values).max()) if primal.size else 0.0
    if gap > 1e-8:
        logger.warning(f"primal and dual spectra differ by {gap:.3e}")
    return EigenSolution(eigenvalues=primal.values, W=primal.vectors, Z=dual.vectors)


def select_rank(trace_stats: Sequence[float], critical_values: Sequence[float]) -> int:
    """First r whose trace statistic falls below its critical value, else p."""
    for r, (stat, cv) in enumerate(zip(trace_stats, critical_values)):
        if stat < cv:
            return r
    return len(trace_stats)


def trace_test(
    eigenvalues: Sequence[float], nobs: int, table: TraceTable = DEFAULT_TRACE_TABLE
) -> TraceTest:
    """Trace statistics −nobs·Σ_{i>r} ln(1 − λ²_i) for r = 0..p−1."""
    values = np.asarray(eigenvalues, dtype=float)
    _check_unit_interval(values)
    p = len(values)
    logs = np.log1p(-values)
    trace_stats = tuple(float(-nobs * logs[r:].sum()) for r in range(p))
    critical_values = tuple(table.critical_value(p - r) for r in range(p))
    rank = select_rank(trace_stats, critical_values)
    logger.info(f"trace test selects rank {rank} of {p}")
    return TraceTest(trace_stats=trace_stats, critical_values=critical_values, rank=rank)


def assemble_fit(
    moments: MomentSet,
    solution: EigenSolution,
    k: int,
    r: Optional[int] = None,
    table: TraceTable = DEFAULT_TRACE_TABLE,
    names: Optional[Sequence[str]] = None,
) -> JohansenFit:
    """Estimators for rank r from precomputed moments and eigenvectors.

    With r omitted the trace test chooses it.

    Raises:
        InvalidRankError: if r (given or selected) is not in 0..p−1.
    """
    p = moments.p
    trace = trace_test(solution.eigenvalues, moments.nobs, table)
    if r is None:
        r = trace.rank
        if r == p:
            raise InvalidRankError(
                f"the trace test rejects every rank below {p}; the system looks "
                f"stationary, force a rank to continue"
            )
    if not 0 <= r < p:
        raise InvalidRankError(f"cointegrating rank must be in 0..{p - 1}, got {r}")
    names = tuple(names) if names is not None else tuple(f"x{i + 1}" for i in range(p))
    W, Z = solution.W, solution.Z
    return JohansenFit(
        names=names,
        k=k,
        r=r,
        eigenvalues=solution.eigenvalues,
        W=W,
        Z=Z,
        moments=moments,
        alpha=moments.S01 @ W[:, :r],
        beta=W[:, :r],
        alpha_perp=Z[:, r:],
        beta_perp=moments.S10 @ Z[:, r:],
        trace=trace,
    )


def fit_johansen(
    panel: SeriesPanel,
    k: int,
    r: Optional[int] = None,
    table: TraceTable = DEFAULT_TRACE_TABLE,
) -> JohansenFit:
    R0, R1, _ = concentrate(panel, k)
    moment_set = moments(R0, R1)
    solution = solve_eigenproblems(moment_set)
    return assemble_fit(moment_set, solution, k, r, table, panel.names)


def estimate_vecm(panel: SeriesPanel, fit: JohansenFit) -> VecmModel:
    """Least-squares error-correction model given the fitted β̂.

    Regresses ∇X_t on [1, β̂′X_{t−1}, ∇X_{t−1}, …, ∇X_{t−k+1}].
    """
    if panel.p != fit.p:
        raise InvalidInputError(f"panel has {panel.p} series but the fit has {fit.p}")
    p, r, k = fit.p, fit.r, fit.k
    blocks = build_vecm_blocks(panel, k)
    regressors = np.hstack(
        [np.ones((blocks.effective_sample, 1)), blocks.xlag @ fit.beta, blocks.w]
    )
    ols = least_squares(blocks.y, regressors)
    coef = ols.coef
    alpha = coef[1 : 1 + r].T
    short_run = np.zeros((0, p, p))
    if k > 1:
        short_run = np.stack(
            [coef[1 + r + i * p : 1 + r + (i + 1) * p].T for i in range(k - 1)]
        )
    resid_cov = ols.resid.T @ ols.resid / ols.nobs
    return VecmModel(
        intercept=coef[0],
        long_run=alpha @ fit.beta.T,
        short_run=short_run,
        resid_cov=(resid_cov + resid_cov.T) / 2.0,
        nobs=ols.nobs,
    )
