"""Level VAR(k) estimation and its error-correction reparameterization.

    X_t  = Π₀ + Π₁X_{t−1} + … + Π_kX_{t−k} + ε_t
    ∇X_t = Γ₀ + ΓX_{t−1} + Γ₁∇X_{t−1} + … + Γ_{k−1}∇X_{t−k+1} + ε_t

with Γ₀ = Π₀, Γ = Π₁ + … + Π_k − I and Γ_i = −(Π_{i+1} + … + Π_k).
"""

import logging
import math
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
from pydantic import field_validator, model_validator

from ..core.errors import InvalidInputError, SampleSizeError
from ..core.linalg import cholesky, least_squares, sym_eigen
from ..core.series import Period, SeriesPanel, build_var_blocks
from ..core.types import ArrayModel, as_matrix, as_vector

logger = logging.getLogger(__name__)

DEFAULT_BURN_IN = 100
EXPLOSIVE_TOLERANCE = 1e-6


def _stack(matrices: Any, name: str) -> np.ndarray:
    array = np.array(matrices, dtype=float)
    if array.size == 0 and array.ndim < 3:
        array = array.reshape(0, 0, 0)
    if array.ndim != 3 or array.shape[1] != array.shape[2]:
        raise InvalidInputError(f"{name} must be a stack of square matrices, got {array.shape}")
    if not np.isfinite(array).all():
        raise InvalidInputError(f"{name} contains non-finite entries")
    array.setflags(write=False)
    return array


class VarModel(ArrayModel):
    """Level VAR(k): intercept Π₀ and coefficient stack Π₁..Π_k"""

    intercept: np.ndarray
    coeffs: np.ndarray
    resid_cov: Optional[np.ndarray] = None
    nobs: int = 0

    @field_validator("intercept", mode="before")
    @classmethod
    def _coerce_intercept(cls, value: Any) -> np.ndarray:
        return as_vector(value, "intercept")

    @field_validator("coeffs", mode="before")
    @classmethod
    def _coerce_coeffs(cls, value: Any) -> np.ndarray:
        return _stack(value, "coeffs")

    @field_validator("resid_cov", mode="before")
    @classmethod
    def _coerce_cov(cls, value: Any) -> Optional[np.ndarray]:
        return None if value is None else as_matrix(value, "resid_cov")

    @model_validator(mode="after")
    def _check_shapes(self) -> "VarModel":
        if self.coeffs.shape[0] < 1:
            raise InvalidInputError("a VAR needs at least one lag")
        if self.coeffs.shape[1] != len(self.intercept):
            raise InvalidInputError(
                f"intercept of length {len(self.intercept)} for {self.coeffs.shape[1]} series"
            )
        if self.resid_cov is not None and self.resid_cov.shape != (self.p, self.p):
            raise InvalidInputError(f"resid_cov must be {self.p}x{self.p}")
        return self

    @property
    def p(self) -> int:
        return self.coeffs.shape[1]

    @property
    def k(self) -> int:
        return self.coeffs.shape[0]

    def companion(self) -> np.ndarray:
        """The kp×kp companion matrix of the lag polynomial."""
        p, k = self.p, self.k
        top = np.hstack(list(self.coeffs))
        if k == 1:
            return top
        shift = np.hstack([np.eye(p * (k - 1)), np.zeros((p * (k - 1), p))])
        return np.vstack([top, shift])


class VecmModel(ArrayModel):
    """Error-correction form: Γ₀, long-run Γ and short-run Γ₁..Γ_{k−1}"""

    intercept: np.ndarray
    long_run: np.ndarray
    short_run: np.ndarray
    resid_cov: Optional[np.ndarray] = None
    nobs: int = 0

    @field_validator("intercept", mode="before")
    @classmethod
    def _coerce_intercept(cls, value: Any) -> np.ndarray:
        return as_vector(value, "intercept")

    @field_validator("long_run", mode="before")
    @classmethod
    def _coerce_long_run(cls, value: Any) -> np.ndarray:
        return as_matrix(value, "long_run")

    @field_validator("short_run", mode="before")
    @classmethod
    def _coerce_short_run(cls, value: Any) -> np.ndarray:
        return _stack(value, "short_run")

    @field_validator("resid_cov", mode="before")
    @classmethod
    def _coerce_cov(cls, value: Any) -> Optional[np.ndarray]:
        return None if value is None else as_matrix(value, "resid_cov")

    @model_validator(mode="after")
    def _check_shapes(self) -> "VecmModel":
        p = len(self.intercept)
        if self.long_run.shape != (p, p):
            raise InvalidInputError(f"long_run must be {p}x{p}, got {self.long_run.shape}")
        if self.short_run.shape[0] and self.short_run.shape[1] != p:
            raise InvalidInputError(f"short_run matrices must be {p}x{p}")
        return self

    @property
    def p(self) -> int:
        return len(self.intercept)

    @property
    def k(self) -> int:
        return self.short_run.shape[0] + 1

    @classmethod
    def from_loadings(
        cls,
        alpha: Any,
        beta: Any,
        intercept: Optional[Any] = None,
        short_run: Optional[Any] = None,
    ) -> "VecmModel":
        """Build Γ = αβ′ from loadings and cointegrating vectors."""
        alpha = as_matrix(alpha, "alpha")
        beta = as_matrix(beta, "beta")
        if alpha.shape != beta.shape:
            raise InvalidInputError(f"alpha {alpha.shape} and beta {beta.shape} differ in shape")
        p = alpha.shape[0]
        return cls(
            intercept=np.zeros(p) if intercept is None else intercept,
            long_run=alpha @ beta.T,
            short_run=np.zeros((0, p, p)) if short_run is None else short_run,
        )


class LagSelection(ArrayModel):
    """Information criteria for VAR orders 1..k_max on one common sample"""

    aic: Tuple[float, ...]
    sbc: Tuple[float, ...]
    chosen_k: int
    nobs: int

    @property
    def orders(self) -> Tuple[int, ...]:
        return tuple(range(1, len(self.aic) + 1))


def fit_var(panel: SeriesPanel, k: int, trim: Optional[int] = None) -> VarModel:
    """Equation-wise least squares fit of a VAR(k) with a constant.

    Rows before `trim` (default k) are used only as presample values.

    Raises:
        SampleSizeError: when T < p·k + p + 2.
        SingularRegressionError: when the lagged levels are collinear.
    """
    p, T = panel.p, panel.T
    if k < 1:
        raise InvalidInputError(f"VAR order must be >= 1, got {k}")
    if T < p * k + p + 2:
        raise SampleSizeError(f"VAR({k}) on {p} series needs T >= {p * k + p + 2}, got {T}")
    block = build_var_blocks(panel, k, trim)
    fit = least_squares(block.y, block.regressors)
    coef = fit.coef
    coeffs = np.stack([coef[1 + i * p : 1 + (i + 1) * p].T for i in range(k)])
    resid_cov = fit.resid.T @ fit.resid / fit.nobs
    return VarModel(
        intercept=coef[0],
        coeffs=coeffs,
        resid_cov=(resid_cov + resid_cov.T) / 2.0,
        nobs=fit.nobs,
    )


def info_criteria(log_det: float, p: int, k: int, nobs: float) -> Tuple[float, float]:
    """(AIC, SBC) from ln|Σ̂| with p²k + p free parameters."""
    n_params = p * p * k + p
    fit_term = nobs * log_det
    return fit_term + 2.0 * n_params, fit_term + n_params * math.log(nobs)


def _log_det(model: VarModel) -> float:
    if model.resid_cov is None:
        raise InvalidInputError("model carries no residual covariance")
    C = cholesky(model.resid_cov, "residual covariance")
    return float(2.0 * np.log(np.diag(C)).sum())


def aic(model: VarModel) -> float:
    return info_criteria(_log_det(model), model.p, model.k, model.nobs)[0]


def sbc(model: VarModel) -> float:
    return info_criteria(_log_det(model), model.p, model.k, model.nobs)[1]


def select_lag(panel: SeriesPanel, k_max: int) -> LagSelection:
    """Fit orders 1..k_max after trimming k_max rows and pick the minimum AIC."""
    if k_max < 1:
        raise InvalidInputError(f"k_max must be >= 1, got {k_max}")
    if panel.T <= panel.p * k_max + panel.p + 2:
        raise SampleSizeError(
            f"lag selection up to {k_max} on {panel.p} series needs "
            f"T > {panel.p * k_max + panel.p + 2}, got {panel.T}"
        )
    aics, sbcs = [], []
    nobs = panel.T - k_max
    for k in range(1, k_max + 1):
        model = fit_var(panel, k, trim=k_max)
        criteria = info_criteria(_log_det(model), model.p, k, model.nobs)
        aics.append(criteria[0])
        sbcs.append(criteria[1])
        logger.debug(f"VAR({k}): aic={criteria[0]:.4f} sbc={criteria[1]:.4f}")
    chosen = int(np.argmin(aics)) + 1
    logger.info(f"lag selection over 1..{k_max} chose k={chosen}")
    return LagSelection(aic=tuple(aics), sbc=tuple(sbcs), chosen_k=chosen, nobs=nobs)


def vecm_from_var(model: VarModel) -> VecmModel:
    p, k = model.p, model.k
    coeffs = model.coeffs
    long_run = coeffs.sum(axis=0) - np.eye(p)
    short_run = np.zeros((0, p, p))
    if k > 1:
        short_run = np.stack([-coeffs[i + 1 :].sum(axis=0) for i in range(k - 1)])
    return VecmModel(
        intercept=model.intercept,
        long_run=long_run,
        short_run=short_run,
        resid_cov=model.resid_cov,
        nobs=model.nobs,
    )


def var_from_vecm(model: VecmModel) -> VarModel:
    p, k = model.p, model.k
    gammas = list(model.short_run) + [np.zeros((p, p))]
    coeffs = [np.eye(p) + model.long_run + gammas[0]]
    for i in range(1, k):
        coeffs.append(gammas[i] - gammas[i - 1])
    return VarModel(
        intercept=model.intercept,
        coeffs=np.stack(coeffs),
        resid_cov=model.resid_cov,
        nobs=model.nobs,
    )


def spectral_radius(model: VarModel) -> float:
    return float(np.abs(np.linalg.eigvals(model.companion())).max())


def _noise_factor(noise_cov: np.ndarray) -> np.ndarray:
    """F with F·F′ = noise_cov; positive semi-definite covariances are allowed."""
    eigen = sym_eigen(noise_cov)
    scale = max(float(np.abs(eigen.values).max()), 1.0)
    if eigen.values.min() < -1e-10 * scale:
        raise InvalidInputError("noise covariance must be positive semi-definite")
    return eigen.vectors * np.sqrt(np.clip(eigen.values, 0.0, None))


def simulate_var(
    model: VarModel,
    T: int,
    burn_in: int = DEFAULT_BURN_IN,
    seed: int = 0,
    noise_cov: Optional[Any] = None,
    initial: Optional[Any] = None,
    names: Optional[Sequence[str]] = None,
    start: Optional[Period] = None,
) -> SeriesPanel:
    """Run the VAR recursion with Gaussian noise and return the last T rows.

    The presample (k rows, oldest first) is zero unless `initial` is given.
    Noise defaults to the model's residual covariance, else the identity.
    Explosive dynamics are simulated anyway and flagged in the panel meta.
    """
    p, k = model.p, model.k
    if T < 1 or burn_in < 0:
        raise InvalidInputError(f"need T >= 1 and burn_in >= 0, got T={T}, burn_in={burn_in}")
    if noise_cov is None:
        noise_cov = model.resid_cov if model.resid_cov is not None else np.eye(p)
    noise_cov = as_matrix(noise_cov, "noise_cov")
    if noise_cov.shape != (p, p):
        raise InvalidInputError(f"noise_cov must be {p}x{p}, got {noise_cov.shape}")
    presample = np.zeros((k, p)) if initial is None else as_matrix(initial, "initial")
    if presample.shape != (k, p):
        raise InvalidInputError(f"initial values must be {k}x{p}, got {presample.shape}")

    radius = spectral_radius(model)
    explosive = radius > 1.0 + EXPLOSIVE_TOLERANCE
    if explosive:
        logger.warning(f"simulating explosive dynamics (spectral radius {radius:.6f})")

    rng = np.random.default_rng(seed)
    steps = burn_in + T
    shocks = rng.standard_normal((steps, p)) @ _noise_factor(noise_cov).T
    X = np.zeros((k + steps, p))
    X[:k] = presample
    for t in range(k, k + steps):
        value = model.intercept + shocks[t - k]
        for i in range(k):
            value = value + model.coeffs[i] @ X[t - 1 - i]
        X[t] = value

    meta: Dict[str, Any] = {
        "seed": seed,
        "explosive": explosive,
        "spectral_radius": radius,
    }
    return SeriesPanel.from_array(X[k + burn_in :], names=names, start=start, meta=meta)


def simulate_vecm(
    model: VecmModel,
    T: int,
    burn_in: int = DEFAULT_BURN_IN,
    seed: int = 0,
    noise_cov: Optional[Any] = None,
    names: Optional[Sequence[str]] = None,
    start: Optional[Period] = None,
) -> SeriesPanel:
    """Simulate an error-correction process through its level-VAR form."""
    return simulate_var(
        var_from_vecm(model),
        T,
        burn_in=burn_in,
        seed=seed,
        noise_cov=noise_cov,
        names=names,
        start=start,
    )
