"""Permanent-transitory decomposition of a cointegrated system.

    X_t = A1·f_t + A2·z_t,   f_t = α⊥′X_t,   z_t = β′X_t
    A1 = β⊥(α⊥′β⊥)⁻¹,        A2 = α(β′α)⁻¹
"""

import logging
from typing import Literal, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import scipy.linalg as sla

from ..core.errors import (
    DegenerateGeometryError,
    InvalidInputError,
    NoDecompositionError,
)
from ..core.linalg import perp
from ..core.series import Period, SeriesPanel
from ..core.types import ArrayModel, as_matrix
from .johansen import JohansenFit

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e12

LoadingsMethod = Literal["dual", "orthogonal"]


class Loadings(ArrayModel):
    alpha: np.ndarray
    beta: np.ndarray
    alpha_perp: np.ndarray
    beta_perp: np.ndarray


class PtDecomposition(ArrayModel):
    """Loadings, factor series and component series; P + T reconstructs X"""

    names: Tuple[str, ...]
    periods: Tuple[Period, ...]
    A1: np.ndarray
    A2: np.ndarray
    f: np.ndarray
    z: np.ndarray
    P: np.ndarray
    T: np.ndarray
    loadings: Loadings

    def component_frame(self, name: str) -> pd.DataFrame:
        """Plot data for one series: period, observed, permanent and transitory values."""
        if name not in self.names:
            raise InvalidInputError(f"unknown series {name!r}; have {list(self.names)}")
        i = self.names.index(name)
        permanent = self.P[:, i]
        transitory = self.T[:, i]
        return pd.DataFrame(
            {
                "period": [str(period) for period in self.periods],
                "series": permanent + transitory,
                "permanent": permanent,
                "transitory": transitory,
            }
        )

    def factor_frame(self) -> pd.DataFrame:
        """Permanent factors f1.. and transitory factors z1.. by period."""
        frame = pd.DataFrame(
            np.hstack([self.f, self.z]),
            columns=[f"f{i + 1}" for i in range(self.f.shape[1])]
            + [f"z{i + 1}" for i in range(self.z.shape[1])],
        )
        frame.insert(0, "period", [str(period) for period in self.periods])
        return frame


def fit_loadings(fit: JohansenFit, method: LoadingsMethod = "dual") -> Loadings:
    """α, β, α⊥, β⊥ of a fit.

    "dual" takes all four from the eigenvectors; "orthogonal" keeps β̂ and
    α̂⊥ and completes them with orthonormal complements.
    """
    if method == "dual":
        return Loadings(
            alpha=fit.alpha,
            beta=fit.beta,
            alpha_perp=fit.alpha_perp,
            beta_perp=fit.beta_perp,
        )
    if method == "orthogonal":
        if fit.r == 0:
            raise NoDecompositionError("a rank-zero fit has no cointegrating vectors")
        return Loadings(
            alpha=perp(fit.alpha_perp),
            beta=fit.beta,
            alpha_perp=fit.alpha_perp,
            beta_perp=perp(fit.beta),
        )
    raise InvalidInputError(f"unknown loadings method {method!r}")


def _inverse_checked(M: np.ndarray, name: str) -> np.ndarray:
    condition = float(np.linalg.cond(M)) if M.size else 1.0
    if not np.isfinite(condition) or condition > CONDITION_LIMIT:
        raise DegenerateGeometryError(f"{name} is singular", condition=condition)
    return sla.inv(M)


def pt_loadings(
    alpha: np.ndarray,
    beta: np.ndarray,
    alpha_perp: np.ndarray,
    beta_perp: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray]:
    """(A1, A2) with A1·α⊥′ + A2·β′ = I.

    Raises:
        DegenerateGeometryError: if β′α or α⊥′β⊥ is (near) singular.
    """
    alpha = as_matrix(alpha, "alpha")
    beta = as_matrix(beta, "beta")
    alpha_perp = as_matrix(alpha_perp, "alpha_perp")
    beta_perp = as_matrix(beta_perp, "beta_perp")
    if alpha.shape != beta.shape or alpha_perp.shape != beta_perp.shape:
        raise InvalidInputError("loadings and their complements must pair in shape")
    if alpha.shape[1] + alpha_perp.shape[1] != alpha.shape[0]:
        raise InvalidInputError("loadings and complements must together span the whole space")
    A1 = beta_perp @ _inverse_checked(alpha_perp.T @ beta_perp, "alpha_perp' beta_perp")
    A2 = alpha @ _inverse_checked(beta.T @ alpha, "beta' alpha")
    return A1, A2


def decompose(
    panel: SeriesPanel, fit: JohansenFit, method: LoadingsMethod = "dual"
) -> PtDecomposition:
    """Split every series into permanent and transitory components.

    Raises:
        NoDecompositionError: for a rank-zero fit.
        DegenerateGeometryError: if the loadings admit no decomposition.
    """
    if fit.r == 0:
        raise NoDecompositionError(
            "no permanent-transitory decomposition exists without cointegration (r = 0)"
        )
    if panel.p != fit.p:
        raise InvalidInputError(f"panel has {panel.p} series but the fit has {fit.p}")
    loadings = fit_loadings(fit, method)
    A1, A2 = pt_loadings(loadings.alpha, loadings.beta, loadings.alpha_perp, loadings.beta_perp)
    X = panel.values
    f = X @ loadings.alpha_perp
    z = X @ loadings.beta
    P = f @ A1.T
    T = z @ A2.T
    error = float(np.abs(P + T - X).max())
    if error > 1e-8 * max(1.0, float(np.abs(X).max())):
        logger.warning(f"components reconstruct the panel only to {error:.3e}")
    return PtDecomposition(
        names=panel.names,
        periods=panel.periods,
        A1=A1,
        A2=A2,
        f=f,
        z=z,
        P=P,
        T=T,
        loadings=loadings,
    )


def permanent_factors(
    panel: SeriesPanel, fit: JohansenFit, prefix: Optional[str] = None
) -> SeriesPanel:
    """The common-trend series α̂⊥′X_t; defined for every rank including zero."""
    if panel.p != fit.p:
        raise InvalidInputError(f"panel has {panel.p} series but the fit has {fit.p}")
    values = panel.values @ fit.alpha_perp
    label = f"{prefix}_" if prefix else ""
    return SeriesPanel(
        names=tuple(f"{label}f{i + 1}" for i in range(values.shape[1])),
        periods=panel.periods,
        values=values,
    )


def stack_factors(groups: Sequence[Tuple[str, SeriesPanel, JohansenFit]]) -> SeriesPanel:
    """Permanent factors of several systems side by side for a second-stage fit."""
    if not groups:
        raise InvalidInputError("no groups to stack")
    stacked = None
    for name, panel, fit in groups:
        factors = permanent_factors(panel, fit, prefix=name)
        logger.debug(f"group {name}: {factors.p} permanent factors")
        stacked = factors if stacked is None else stacked.hstack(factors)
    return stacked
