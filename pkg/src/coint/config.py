"""Validated configuration: simulation specs read from YAML and session parameters."""

import logging
from pathlib import Path
from typing import List, Literal, Optional, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .core.errors import InvalidInputError, LoadError
from .core.series import Period, SeriesPanel
from .models.ggdecomp import LoadingsMethod
from .models.var import (
    DEFAULT_BURN_IN,
    VarModel,
    VecmModel,
    simulate_var,
    simulate_vecm,
)

logger = logging.getLogger(__name__)


def _reshape(values: Optional[List[float]], shape: tuple, name: str) -> np.ndarray:
    expected = int(np.prod(shape))
    if values is None or len(values) != expected:
        got = "nothing" if values is None else f"{len(values)} entries"
        raise ValueError(f"{name} needs {expected} entries (row-major {shape}), got {got}")
    return np.asarray(values, dtype=float).reshape(shape)


class SimulationSpec(BaseModel):
    """Synthetic VECM or VAR process; matrices are flat row-major lists"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    model: Literal["vecm", "var"] = "vecm"
    dimension: int = Field(ge=1)
    rank: int = Field(default=0, ge=0)
    lags: int = Field(default=1, ge=1)
    alpha: Optional[List[float]] = None
    beta: Optional[List[float]] = None
    short_run: Optional[List[float]] = None
    coefficients: Optional[List[float]] = None
    intercept: Optional[List[float]] = None
    noise_scale: float = Field(default=1.0, ge=0.0)
    length: int = Field(default=144, ge=1)
    burn_in: int = Field(default=DEFAULT_BURN_IN, ge=0)
    names: Optional[List[str]] = None
    start: str = "2000-01"

    @model_validator(mode="after")
    def _check_matrices(self) -> "SimulationSpec":
        p, r, k = self.dimension, self.rank, self.lags
        if self.model == "vecm":
            if r >= p:
                raise ValueError(f"rank must be below the dimension {p}, got {r}")
            if r > 0:
                _reshape(self.alpha, (p, r), "alpha")
                _reshape(self.beta, (p, r), "beta")
            if k > 1 and self.short_run is not None:
                _reshape(self.short_run, (k - 1, p, p), "short_run")
        else:
            _reshape(self.coefficients, (k, p, p), "coefficients")
        if self.intercept is not None:
            _reshape(self.intercept, (p,), "intercept")
        if self.names is not None and len(self.names) != p:
            raise ValueError(f"{len(self.names)} names for {p} series")
        Period.parse(self.start)
        return self

    def build_model(self) -> Union[VarModel, VecmModel]:
        p, r, k = self.dimension, self.rank, self.lags
        intercept = np.zeros(p) if self.intercept is None else np.asarray(self.intercept)
        if self.model == "var":
            return VarModel(
                intercept=intercept, coeffs=_reshape(self.coefficients, (k, p, p), "coefficients")
            )
        short_run = np.zeros((k - 1, p, p))
        if k > 1 and self.short_run is not None:
            short_run = _reshape(self.short_run, (k - 1, p, p), "short_run")
        if r == 0:
            return VecmModel(intercept=intercept, long_run=np.zeros((p, p)), short_run=short_run)
        return VecmModel.from_loadings(
            _reshape(self.alpha, (p, r), "alpha"),
            _reshape(self.beta, (p, r), "beta"),
            intercept=intercept,
            short_run=short_run,
        )

    def noise_cov(self) -> np.ndarray:
        return self.noise_scale**2 * np.eye(self.dimension)

    def simulate(self, seed: int) -> SeriesPanel:
        model = self.build_model()
        kwargs = dict(
            burn_in=self.burn_in,
            seed=seed,
            noise_cov=self.noise_cov(),
            names=self.names,
            start=Period.parse(self.start),
        )
        if isinstance(model, VecmModel):
            return simulate_vecm(model, self.length, **kwargs)
        return simulate_var(model, self.length, **kwargs)


def load_simulation_spec(path: Union[str, Path]) -> SimulationSpec:
    """Read and validate a YAML simulation spec.

    Raises:
        LoadError: if the file cannot be read or is not a YAML mapping.
        InvalidInputError: if the mapping does not describe a valid process.
    """
    try:
        with open(path, encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except (OSError, yaml.YAMLError) as e:
        raise LoadError(f"cannot read simulation spec {path}: {e}")
    if not isinstance(data, dict):
        raise LoadError(f"simulation spec {path} must be a mapping of keys to values")
    try:
        return SimulationSpec.model_validate(data)
    except ValidationError as e:
        raise InvalidInputError(f"invalid simulation spec {path}: {e}")


class SessionParams(BaseModel):
    """Knobs of an analysis session"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    lags: int = Field(default=2, ge=1)
    rank: Optional[int] = Field(default=None, ge=0)
    k_max: int = Field(default=4, ge=1)
    max_s: int = Field(default=12, ge=1)
    max_d: int = Field(default=2, ge=0)
    adf_lags: int = Field(default=3, ge=0)
    loadings: LoadingsMethod = "dual"
    max_excluded: int = Field(default=1, ge=1)
    workers: int = Field(default=1, ge=1)

    def updated(self, **changes) -> "SessionParams":
        try:
            return SessionParams.model_validate({**self.model_dump(), **changes})
        except ValidationError as e:
            raise InvalidInputError(f"invalid session parameters: {e}")
