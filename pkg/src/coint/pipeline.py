"""An analysis session: every step of the workflow as a lazily computed stage.

Source stages hold the panel and the session parameters; derived stages
recompute only when something upstream of them changed and they are read.
Changing the rank therefore refits α̂, β̂ without re-solving the eigenproblem,
while changing the lag order redoes the concentration step as well.
"""

import logging
from typing import Any, Callable, Dict, List, Optional, Tuple

from .config import SessionParams
from .core.errors import InvalidInputError
from .core.graph import AnalysisGraph, ComputedStage
from .core.series import SeriesPanel
from .core.types import StageChange
from .models.ggdecomp import PtDecomposition, decompose
from .models.johansen import (
    EigenSolution,
    JohansenFit,
    MomentSet,
    TraceTest,
    assemble_fit,
    concentrate,
    estimate_vecm,
    moments,
    solve_eigenproblems,
    trace_test,
)
from .models.restrict import ExclusionScanRow, exclusion_scan
from .models.unitroot import SeriesExploration, explore
from .models.var import LagSelection, VecmModel, select_lag

logger = logging.getLogger(__name__)

# source stage name -> the SessionParams fields it carries
_PARAM_SOURCES: Dict[str, Tuple[str, ...]] = {
    "lags": ("lags",),
    "rank": ("rank",),
    "loadings": ("loadings",),
    "k_max": ("k_max",),
    "explore_options": ("max_s", "max_d", "adf_lags"),
    "scan_options": ("max_excluded", "workers"),
}


class AnalysisSession:
    def __init__(self, panel: SeriesPanel, params: Optional[SessionParams] = None):
        self._params = params or SessionParams()
        self._graph = AnalysisGraph()
        self._stages: Dict[str, ComputedStage] = {}

        source = self._add_source
        panel_stage = source("panel", panel)
        params_stages = {
            name: source(name, self._param_values(name)) for name in _PARAM_SOURCES
        }
        lags = params_stages["lags"]
        rank = params_stages["rank"]

        derived = self._add_derived
        derived(
            "exploration",
            lambda: explore(panel_stage.peek(), *params_stages["explore_options"].peek()),
            panel_stage,
            params_stages["explore_options"],
        )
        derived(
            "lag_selection",
            lambda: select_lag(panel_stage.peek(), params_stages["k_max"].peek()[0]),
            panel_stage,
            params_stages["k_max"],
        )
        moment_stage = derived(
            "moments",
            lambda: moments(*concentrate(panel_stage.peek(), lags.peek()[0])[:2]),
            panel_stage,
            lags,
        )
        eigen_stage = derived(
            "eigen", lambda: solve_eigenproblems(moment_stage.peek()), moment_stage
        )
        derived(
            "trace",
            lambda: trace_test(eigen_stage.peek().eigenvalues, moment_stage.peek().nobs),
            moment_stage,
            eigen_stage,
        )
        fit_stage = derived(
            "fit",
            lambda: assemble_fit(
                moment_stage.peek(),
                eigen_stage.peek(),
                lags.peek()[0],
                rank.peek()[0],
                names=panel_stage.peek().names,
            ),
            panel_stage,
            lags,
            rank,
            moment_stage,
            eigen_stage,
        )
        derived(
            "vecm",
            lambda: estimate_vecm(panel_stage.peek(), fit_stage.peek()),
            panel_stage,
            fit_stage,
        )
        derived(
            "decomposition",
            lambda: decompose(
                panel_stage.peek(), fit_stage.peek(), params_stages["loadings"].peek()[0]
            ),
            panel_stage,
            fit_stage,
            params_stages["loadings"],
        )
        derived(
            "scan",
            lambda: exclusion_scan(fit_stage.peek(), *params_stages["scan_options"].peek()),
            fit_stage,
            params_stages["scan_options"],
        )

    def _param_values(self, source: str) -> Tuple[Any, ...]:
        return tuple(getattr(self._params, field) for field in _PARAM_SOURCES[source])

    def _add_source(self, name: str, value: Any) -> ComputedStage:
        stage = ComputedStage(name, self._graph)
        stage.set(value)
        self._stages[name] = stage
        return stage

    def _add_derived(
        self, name: str, func: Callable[[], Any], *dependencies: ComputedStage
    ) -> ComputedStage:
        stage = ComputedStage(name, self._graph, func=func, dependencies=dependencies)
        self._stages[name] = stage
        return stage

    @property
    def graph(self) -> AnalysisGraph:
        return self._graph

    @property
    def params(self) -> SessionParams:
        return self._params

    @property
    def panel(self) -> SeriesPanel:
        return self._stages["panel"].peek()

    def set_panel(self, panel: SeriesPanel) -> None:
        self._stages["panel"].set(panel)

    def update(self, **changes: Any) -> List[str]:
        """Change session parameters; returns the source stages that changed.

        Raises:
            InvalidInputError: if the new parameters do not validate.
        """
        self._params = self._params.updated(**changes)
        changed = []
        for name in _PARAM_SOURCES:
            value = self._param_values(name)
            if value != self._stages[name].peek():
                self._stages[name].set(value)
                changed.append(name)
        logger.debug(f"parameter update touched {changed}")
        return changed

    def stage(self, name: str) -> ComputedStage:
        if name not in self._stages:
            raise InvalidInputError(f"unknown stage {name!r}; have {sorted(self._stages)}")
        return self._stages[name]

    def on_change(
        self, stage: str, subscriber_id: str, callback: Callable[[StageChange], None]
    ) -> None:
        self.stage(stage).add_change_callback(subscriber_id, callback)

    def exploration(self) -> Tuple[SeriesExploration, ...]:
        return self._stages["exploration"].value()

    def lag_selection(self) -> LagSelection:
        return self._stages["lag_selection"].value()

    def moments(self) -> MomentSet:
        return self._stages["moments"].value()

    def eigen(self) -> EigenSolution:
        return self._stages["eigen"].value()

    def trace(self) -> TraceTest:
        return self._stages["trace"].value()

    def fit(self) -> JohansenFit:
        return self._stages["fit"].value()

    def vecm(self) -> VecmModel:
        return self._stages["vecm"].value()

    def decomposition(self) -> PtDecomposition:
        return self._stages["decomposition"].value()

    def scan(self) -> List[ExclusionScanRow]:
        return self._stages["scan"].value()
