"""Order-of-integration diagnostics.

The differencing search reports the sample standard deviation of
∇_s^d(x_t) over a grid of lags s and orders d; the augmented Dickey-Fuller
test regresses ∇x_t on a constant, x_{t−1} and lagged differences, choosing
the number of lagged differences by AIC over one fixed effective sample.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from ..core.errors import InvalidInputError, SampleSizeError
from ..core.linalg import least_squares
from ..core.series import SeriesPanel
from ..core.types import ArrayModel, as_vector

logger = logging.getLogger(__name__)

DEFAULT_MAX_LAGS = 3


class CriticalValues(BaseModel):
    """Dickey-Fuller critical values at the 1%, 5% and 10% levels"""

    model_config = ConfigDict(frozen=True)

    one: float = -3.46
    five: float = -2.88
    ten: float = -2.57

    def by_level(self) -> List[Tuple[float, float]]:
        return [(0.01, self.one), (0.05, self.five), (0.10, self.ten)]


class DiffSearchRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    s: int
    d: int
    sigma: float

    @field_validator("sigma")
    @classmethod
    def _non_negative(cls, sigma: float) -> float:
        if sigma < 0:
            raise ValueError("standard deviation cannot be negative")
        return sigma


class DiffSearch(BaseModel):
    """Every (s, d) row of the search plus the row of minimal sigma"""

    model_config = ConfigDict(frozen=True)

    rows: Tuple[DiffSearchRow, ...]
    optimum: DiffSearchRow


class AdfResult(ArrayModel):
    chosen_lags: int
    aic_by_lag: Tuple[float, ...]
    statistic: float
    critical_values: CriticalValues
    reject_at: Optional[float] = None
    nobs: int

    @property
    def rejects_unit_root(self) -> bool:
        return self.reject_at is not None


def sample_std(x: np.ndarray) -> float:
    """Sample standard deviation with the T−1 divisor."""
    x = np.asarray(x, dtype=float)
    if len(x) < 2:
        raise SampleSizeError("standard deviation needs at least two observations")
    return float(np.std(x, ddof=1))


def difference(x: np.ndarray, s: int, d: int) -> np.ndarray:
    """∇_s^d applied to a single series."""
    x = np.asarray(x, dtype=float)
    if len(x) <= s * d:
        raise SampleSizeError(f"{len(x)} observations cannot support {d} differences at lag {s}")
    for _ in range(d):
        x = x[s:] - x[:-s]
    return x


def diff_search(
    x: Sequence[float], max_s: int, max_d: int, min_d: int = 0
) -> DiffSearch:
    """Enumerate ∇_s^d(x) for s ≤ max_s, d ≤ max_d and pick the least dispersed.

    The untransformed series appears once as the (s=0, d=0) baseline row.
    Ties are broken by smaller d, then smaller s.
    """
    x = as_vector(x, "series")
    if max_s < 1 or max_d < 0 or min_d < 0:
        raise InvalidInputError(f"invalid search bounds max_s={max_s}, max_d={max_d}")
    if len(x) < max_s * max_d + 2:
        raise SampleSizeError(
            f"{len(x)} observations are too few for s <= {max_s}, d <= {max_d}"
        )
    rows = []
    if min_d == 0:
        rows.append(DiffSearchRow(s=0, d=0, sigma=sample_std(x)))
    for d in range(max(min_d, 1), max_d + 1):
        for s in range(1, max_s + 1):
            rows.append(DiffSearchRow(s=s, d=d, sigma=sample_std(difference(x, s, d))))
    if not rows:
        raise InvalidInputError("search range is empty")
    optimum = min(rows, key=lambda row: (row.sigma, row.d, row.s))
    return DiffSearch(rows=tuple(rows), optimum=optimum)


def two_stage_search(
    x: Sequence[float], max_s: int, max_d: int
) -> Tuple[DiffSearch, Optional[DiffSearch]]:
    """Optimal transform, then a further forced transform of the result.

    The second stage searches d ≥ 1 on ∇_{s₁}^{d₁}(x) to show how much
    dispersion an extra difference adds once the series is stationary. Its
    bounds shrink to what the shortened series supports, keeping d before s;
    it is None when not even one first difference fits.
    """
    x = as_vector(x, "series")
    first = diff_search(x, max_s, max_d)
    transformed = difference(x, first.optimum.s, first.optimum.d) if first.optimum.d else x
    room = len(transformed) - 2
    max_d2 = min(max(max_d, 1), room)
    if max_d2 < 1:
        logger.info(f"{len(transformed)} transformed observations leave no second stage")
        return first, None
    max_s2 = min(max_s, room // max_d2)
    if (max_s2, max_d2) != (max_s, max(max_d, 1)):
        logger.debug(f"second stage narrowed to s <= {max_s2}, d <= {max_d2}")
    second = diff_search(transformed, max_s2, max_d2, min_d=1)
    return first, second


def _adf_design(x: np.ndarray, lags: int, trim: int) -> Tuple[np.ndarray, np.ndarray]:
    """∇x_t on [1, x_{t−1}, ∇x_{t−1..t−lags}] for t = trim+1..T−1."""
    T = len(x)
    dx = np.diff(x)
    y = dx[trim:]
    columns = [np.ones(T - 1 - trim), x[trim : T - 1]]
    columns += [dx[trim - j : T - 1 - j] for j in range(1, lags + 1)]
    return y, np.column_stack(columns)


def _adf_regression(x: np.ndarray, lags: int, trim: int) -> Tuple[float, float]:
    """Return (t-ratio on x_{t−1}, AIC) of one ADF regression."""
    y, X = _adf_design(x, lags, trim)
    fit = least_squares(y, X)
    nobs, n_params = X.shape
    rss = float(fit.resid @ fit.resid)
    s2 = rss / (nobs - n_params)
    statistic = float(fit.coef[1] / np.sqrt(s2 * fit.xtx_inv[1, 1]))
    aic = nobs * np.log(rss / nobs) + 2.0 * n_params
    return statistic, float(aic)


def reject_level(statistic: float, cv: CriticalValues) -> Optional[float]:
    """Smallest significance level whose critical value the statistic falls below."""
    return next((level for level, value in cv.by_level() if statistic < value), None)


def adf_test(
    x: Sequence[float],
    max_lags: int = DEFAULT_MAX_LAGS,
    cv: Optional[CriticalValues] = None,
) -> AdfResult:
    """Augmented Dickey-Fuller test with a constant and AIC lag choice.

    Every candidate lag count 0..max_lags is fitted on the sample that remains
    after dropping max_lags + 1 leading observations, so the criteria compare.

    Raises:
        SampleSizeError: if the common sample cannot identify the largest model.
        SingularRegressionError: for degenerate (e.g. constant) series.
    """
    x = as_vector(x, "series")
    cv = cv or CriticalValues()
    if max_lags < 0:
        raise InvalidInputError(f"max_lags must be >= 0, got {max_lags}")
    nobs = len(x) - 1 - max_lags
    if len(x) <= max_lags + 2 or nobs <= max_lags + 2:
        raise SampleSizeError(
            f"{len(x)} observations are too few for an ADF test with {max_lags} lags"
        )
    results = [_adf_regression(x, lags, max_lags) for lags in range(max_lags + 1)]
    aic_by_lag = tuple(aic for _, aic in results)
    chosen = int(np.argmin(aic_by_lag))
    statistic = results[chosen][0]
    reject_at = reject_level(statistic, cv)
    logger.debug(f"ADF lags={chosen} statistic={statistic:.4f} reject_at={reject_at}")
    return AdfResult(
        chosen_lags=chosen,
        aic_by_lag=aic_by_lag,
        statistic=statistic,
        critical_values=cv,
        reject_at=reject_at,
        nobs=nobs,
    )


def adf_scan(x: Sequence[float], max_lags: int = DEFAULT_MAX_LAGS) -> Tuple[float, ...]:
    """ADF statistic at every fixed lag count 0..max_lags on the common sample."""
    x = as_vector(x, "series")
    if len(x) - 1 - max_lags <= max_lags + 2:
        raise SampleSizeError(
            f"{len(x)} observations are too few for an ADF scan up to {max_lags} lags"
        )
    return tuple(_adf_regression(x, lags, max_lags)[0] for lags in range(max_lags + 1))


class SeriesExploration(BaseModel):
    """Differencing search and ADF diagnostics of one series"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    first: DiffSearch
    second: Optional[DiffSearch]
    adf: AdfResult
    adf_by_lag: Tuple[float, ...]


def explore(
    panel: SeriesPanel, max_s: int, max_d: int, max_lags: int = DEFAULT_MAX_LAGS
) -> Tuple[SeriesExploration, ...]:
    """Order-of-integration diagnostics for every series of a panel."""
    rows = []
    for name in panel.names:
        x = panel.column(name)
        first, second = two_stage_search(x, max_s, max_d)
        rows.append(
            SeriesExploration(
                name=name,
                first=first,
                second=second,
                adf=adf_test(x, max_lags),
                adf_by_lag=adf_scan(x, max_lags),
            )
        )
    return tuple(rows)
