import hypothesis
import numpy as np
import pytest

from coint.core.series import SeriesPanel
from coint.models.var import VecmModel, simulate_vecm

np.seterr(all="warn")

hypothesis.settings.register_profile("default", max_examples=25, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.load_profile("default")


def cointegrated_vecm(p: int, r: int, speed: float = 0.3, drift: float = 0.1) -> VecmModel:
    """Relations x_{2j} − x_{2j+1} corrected at `speed`; every series drifts."""
    alpha = np.zeros((p, r))
    beta = np.zeros((p, r))
    for j in range(r):
        beta[2 * j, j] = 1.0
        beta[2 * j + 1, j] = -1.0
        alpha[2 * j, j] = -speed
    return VecmModel.from_loadings(alpha, beta, intercept=np.full(p, drift))


def simulate_cointegrated(p: int, r: int, T: int, seed: int) -> SeriesPanel:
    return simulate_vecm(cointegrated_vecm(p, r), T, seed=seed)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


@pytest.fixture
def panel_r1() -> SeriesPanel:
    """p = 3 with one cointegrating relation"""
    return simulate_cointegrated(3, 1, 500, seed=7)


@pytest.fixture
def panel_r2() -> SeriesPanel:
    """p = 4 with two cointegrating relations"""
    return simulate_cointegrated(4, 2, 600, seed=11)


@pytest.fixture
def panel_p9() -> SeriesPanel:
    """Nine monthly series over twelve years, three relations"""
    return simulate_cointegrated(9, 3, 144, seed=3)


@pytest.fixture
def random_panel(rng) -> SeriesPanel:
    return SeriesPanel.from_array(rng.standard_normal((60, 3)).cumsum(axis=0))
