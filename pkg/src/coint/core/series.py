import logging
import re
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from .errors import InvalidInputError, SampleSizeError
from .types import ArrayModel, as_matrix

logger = logging.getLogger(__name__)

_PERIOD_PATTERN = re.compile(r"^(\d{4})-(\d{2})$")


class Period(BaseModel):
    """A monthly period stamp"""

    model_config = ConfigDict(frozen=True)

    year: int
    month: int

    @field_validator("month")
    @classmethod
    def _check_month(cls, month: int) -> int:
        if not 1 <= month <= 12:
            raise ValueError(f"month must be in 1..12, got {month}")
        return month

    @classmethod
    def parse(cls, text: str) -> "Period":
        match = _PERIOD_PATTERN.match(text.strip())
        if not match:
            raise ValueError(f"expected YYYY-MM, got {text!r}")
        return cls(year=int(match.group(1)), month=int(match.group(2)))

    @property
    def ordinal(self) -> int:
        return self.year * 12 + self.month - 1

    @classmethod
    def from_ordinal(cls, ordinal: int) -> "Period":
        return cls(year=ordinal // 12, month=ordinal % 12 + 1)

    def shift(self, months: int) -> "Period":
        return Period.from_ordinal(self.ordinal + months)

    def __str__(self) -> str:
        return f"{self.year:04d}-{self.month:02d}"


def monthly_range(start: Period, count: int) -> Tuple[Period, ...]:
    return tuple(start.shift(i) for i in range(count))


class SeriesPanel(ArrayModel):
    """T×p labeled monthly multivariate time series, the X_t matrix"""

    names: Tuple[str, ...]
    periods: Tuple[Period, ...]
    values: np.ndarray
    meta: Dict[str, Any] = {}

    @field_validator("values", mode="before")
    @classmethod
    def _coerce_values(cls, values: Any) -> np.ndarray:
        return as_matrix(values, "panel values")

    @model_validator(mode="after")
    def _check_shape(self) -> "SeriesPanel":
        T, p = self.values.shape
        if T < 1:
            raise InvalidInputError("a panel needs at least one observation")
        if len(self.names) != p:
            raise InvalidInputError(f"{len(self.names)} names for {p} series")
        if len(set(self.names)) != len(self.names):
            raise InvalidInputError(f"series names must be unique: {self.names}")
        if len(self.periods) != T:
            raise InvalidInputError(f"{len(self.periods)} periods for {T} rows")
        for previous, current in zip(self.periods, self.periods[1:]):
            if current.ordinal != previous.ordinal + 1:
                raise InvalidInputError(
                    f"periods are not contiguous: {previous} followed by {current}"
                )
        return self

    @classmethod
    def from_array(
        cls,
        values: Any,
        names: Optional[Sequence[str]] = None,
        start: Optional[Period] = None,
        meta: Optional[Dict[str, Any]] = None,
    ) -> "SeriesPanel":
        matrix = as_matrix(values, "panel values")
        if names is None:
            names = [f"x{i + 1}" for i in range(matrix.shape[1])]
        start = start or Period(year=2000, month=1)
        return cls(
            names=tuple(names),
            periods=monthly_range(start, matrix.shape[0]),
            values=matrix,
            meta=meta or {},
        )

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise InvalidInputError(f"unknown series {name!r}; have {list(self.names)}")

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.index(name)]

    def select(self, names: Sequence[str]) -> "SeriesPanel":
        columns = [self.index(name) for name in names]
        return self.model_copy(
            update={"names": tuple(names), "values": as_matrix(self.values[:, columns])}
        )

    def tail(self, count: int) -> "SeriesPanel":
        if not 1 <= count <= self.T:
            raise SampleSizeError(f"cannot keep {count} of {self.T} observations")
        return self.model_copy(
            update={
                "periods": self.periods[self.T - count :],
                "values": as_matrix(self.values[self.T - count :]),
            }
        )

    def hstack(self, other: "SeriesPanel") -> "SeriesPanel":
        if self.periods != other.periods:
            raise InvalidInputError("panels must cover identical periods to be stacked")
        return SeriesPanel(
            names=self.names + other.names,
            periods=self.periods,
            values=np.hstack([self.values, other.values]),
        )


class LagBlock(ArrayModel):
    """Left-hand block y and regressors sharing one effective sample"""

    effective_sample: int
    y: np.ndarray
    regressors: np.ndarray


class VecmBlocks(ArrayModel):
    """Aligned ∇X_t, X_{t−1} and stacked lagged differences"""

    effective_sample: int
    y: np.ndarray
    xlag: np.ndarray
    w: np.ndarray


def diff(panel: SeriesPanel, s: int = 1, d: int = 1) -> SeriesPanel:
    """Apply d passes of the lag-s difference x_t − x_{t−s}."""
    if s < 1 or d < 0:
        raise InvalidInputError(f"difference lag must be >= 1 and order >= 0, got s={s}, d={d}")
    if panel.T <= s * d:
        raise SampleSizeError(
            f"{panel.T} observations cannot support {d} differences at lag {s}"
        )
    values = np.array(panel.values)
    for _ in range(d):
        values = values[s:] - values[:-s]
    return panel.model_copy(
        update={"periods": panel.periods[s * d :], "values": as_matrix(values)}
    )


def center(block: np.ndarray) -> np.ndarray:
    """Subtract each column's mean."""
    block = np.asarray(block, dtype=float)
    if block.shape[0] == 0:
        return block.copy()
    return block - block.mean(axis=0)


def build_vecm_blocks(panel: SeriesPanel, k: int) -> VecmBlocks:
    """Aligned regression blocks for the error-correction form of a VAR(k).

    Row t of every block refers to the same date t = k..T−1 (0-based): y holds
    ∇X_t, xlag holds X_{t−1} and w holds [∇X_{t−1}, …, ∇X_{t−k+1}].
    """
    if k < 1:
        raise InvalidInputError(f"VAR order must be >= 1, got {k}")
    T = panel.T
    if T < k + 2:
        raise SampleSizeError(f"VAR({k}) error-correction form needs T >= {k + 2}, got {T}")
    X = panel.values
    dX = X[1:] - X[:-1]
    y = dX[k - 1 :]
    xlag = X[k - 1 : T - 1]
    lags = [dX[k - 1 - j : T - 1 - j] for j in range(1, k)]
    w = np.hstack(lags) if lags else np.zeros((T - k, 0))
    return VecmBlocks(
        effective_sample=T - k,
        y=as_matrix(y),
        xlag=as_matrix(xlag),
        w=as_matrix(w),
    )


def build_var_blocks(panel: SeriesPanel, k: int, trim: Optional[int] = None) -> LagBlock:
    """Level-VAR design: y = X_t, regressors = [1, X_{t−1}, …, X_{t−k}] for t ≥ trim."""
    trim = k if trim is None else trim
    if k < 1 or trim < k:
        raise InvalidInputError(f"need 1 <= k <= trim, got k={k}, trim={trim}")
    T = panel.T
    if T <= trim:
        raise SampleSizeError(f"cannot drop {trim} of {T} observations")
    X = panel.values
    columns = [np.ones((T - trim, 1))]
    columns += [X[trim - i : T - i] for i in range(1, k + 1)]
    return LagBlock(
        effective_sample=T - trim,
        y=as_matrix(X[trim:]),
        regressors=as_matrix(np.hstack(columns)),
    )