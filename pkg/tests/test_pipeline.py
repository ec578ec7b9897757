from collections import Counter

import numpy as np
import pytest

from coint.config import SessionParams
from coint.core.errors import InvalidInputError
from coint.models.johansen import fit_johansen
from coint.models.var import select_lag
from coint.pipeline import AnalysisSession


@pytest.fixture
def session(panel_r1):
    return AnalysisSession(panel_r1, SessionParams(lags=2, rank=1, k_max=3))


def count_recomputations(session, stages):
    counts = Counter()
    for name in stages:
        session.on_change(name, "counter", lambda change, name=name: counts.update([name]))
    return counts


def test_session_matches_direct_fit(session, panel_r1):
    fit = session.fit()
    direct = fit_johansen(panel_r1, 2, r=1)
    np.testing.assert_allclose(fit.eigenvalues, direct.eigenvalues)
    np.testing.assert_allclose(fit.beta, direct.beta)
    assert fit.names == panel_r1.names
    assert session.lag_selection().chosen_k == select_lag(panel_r1, 3).chosen_k


def test_rank_change_reuses_the_eigenproblem(session):
    counts = count_recomputations(session, ["moments", "eigen", "fit"])
    session.fit()
    assert counts == Counter(moments=1, eigen=1, fit=1)

    assert session.update(rank=0) == ["rank"]
    assert session.fit().r == 0
    assert counts == Counter(moments=1, eigen=1, fit=2)

    assert session.update(lags=1) == ["lags"]
    assert session.fit().k == 1
    assert counts == Counter(moments=2, eigen=2, fit=3)


def test_unchanged_update_touches_nothing(session):
    session.fit()
    assert session.update(rank=1) == []
    assert not session.graph.get_node_status("fit").invalidated


def test_new_panel_invalidates_everything(session, panel_r2):
    session.fit()
    session.update(rank=2)
    session.set_panel(panel_r2)
    assert session.fit().p == 4
    assert session.trace().trace_stats[0] > 0


def test_derived_results(session):
    assert session.decomposition().A1.shape == (3, 2)
    assert len(session.scan()) == 3
    assert session.vecm().long_run.shape == (3, 3)
    assert session.moments().nobs == session.panel.T - 2
    assert len(session.eigen().eigenvalues) == 3
    session.update(max_s=3, max_d=1, adf_lags=2)
    assert len(session.exploration()) == 3


def test_invalid_parameters(session):
    with pytest.raises(InvalidInputError):
        session.update(lags=0)
    with pytest.raises(InvalidInputError):
        session.update(unknown=1)
    with pytest.raises(InvalidInputError):
        session.stage("nope")
    assert session.params.lags == 2
