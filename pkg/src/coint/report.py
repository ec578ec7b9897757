"""Report documents shared by the text and JSON renderers.

A document holds raw values; both renderers round them to the same number
of decimals, so the two outputs agree value for value.
"""

import json
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel

from . import __version__
from .core.series import SeriesPanel
from .core.types import Json
from .models.ggdecomp import PtDecomposition
from .models.johansen import JohansenFit, TraceTest
from .models.restrict import ExclusionScanRow, RestrictionTest
from .models.unitroot import SeriesExploration
from .models.var import LagSelection

SCHEMA_VERSION = "1.0"
DEFAULT_PRECISION = 4

Cell = Union[int, float, str, None]


class Table(BaseModel):
    title: str
    columns: List[str]
    rows: List[List[Cell]] = []


class Section(BaseModel):
    title: str
    lines: List[str] = []
    tables: List[Table] = []


class ReportDocument(Json):
    schema_version: str = SCHEMA_VERSION
    command: str
    meta: Dict[str, Cell] = {}
    sections: List[Section] = []

    def rounded(self, precision: int) -> "ReportDocument":
        def round_cell(cell: Cell) -> Cell:
            return round(cell, precision) if isinstance(cell, float) else cell

        data = self.model_dump()
        data["meta"] = {key: round_cell(value) for key, value in data["meta"].items()}
        for section in data["sections"]:
            for table in section["tables"]:
                table["rows"] = [[round_cell(cell) for cell in row] for row in table["rows"]]
        return ReportDocument.model_validate(data)

    def render_json(self, precision: int = DEFAULT_PRECISION) -> str:
        return json.dumps(self.rounded(precision).model_dump(), indent=2)

    def render_text(self, precision: int = DEFAULT_PRECISION, banner: bool = True) -> str:
        out = []
        if banner:
            out.append(f"coint {__version__}")
        if self.meta:
            pairs = (f"{key}={_format(value, precision)}" for key, value in self.meta.items())
            out.append("  ".join(pairs))
        for section in self.sections:
            out.append("")
            out.append(f"== {section.title}")
            out.extend(section.lines)
            for table in section.tables:
                out.append("")
                out.append(f"-- {table.title}")
                out.append(_table_text(table, precision))
        return "\n".join(out) + "\n"


def _format(cell: Cell, precision: int) -> str:
    if cell is None:
        return ""
    if isinstance(cell, float):
        return f"{cell:.{precision}f}"
    return str(cell)


def _table_text(table: Table, precision: int) -> str:
    if not table.rows:
        return "(empty)"
    formatted = [[_format(cell, precision) for cell in row] for row in table.rows]
    return pd.DataFrame(formatted, columns=table.columns).to_string(index=False)


def matrix_table(
    title: str,
    matrix: np.ndarray,
    row_labels: Sequence[str],
    column_prefix: str,
    corner: str = "series",
) -> Table:
    matrix = np.asarray(matrix)
    columns = [corner] + [f"{column_prefix}{j + 1}" for j in range(matrix.shape[1])]
    rows = [
        [label] + [float(value) for value in matrix[i]] for i, label in enumerate(row_labels)
    ]
    return Table(title=title, columns=columns, rows=rows)


def panel_meta(panel: SeriesPanel) -> Dict[str, Cell]:
    return {
        "sample": f"{panel.periods[0]}..{panel.periods[-1]}",
        "T": panel.T,
        "p": panel.p,
    }


def exploration_report(
    rows: Sequence[SeriesExploration], meta: Dict[str, Cell]
) -> ReportDocument:
    search = Table(
        title="Differencing search (sigma of the transformed series)",
        columns=["series", "sigma", "s1", "d1", "sigma1", "s2", "d2", "sigma2"],
    )
    adf = Table(
        title="Augmented Dickey-Fuller (constant, AIC lag choice)",
        columns=["series", "lags", "statistic", "1%", "5%", "10%", "unit root"],
    )
    scan_columns = []
    scan_rows = []
    for row in rows:
        baseline = next(r for r in row.first.rows if r.d == 0)
        first = row.first.optimum
        second = [None, None, None]
        if row.second is not None:
            best = row.second.optimum
            second = [best.s, best.d, best.sigma]
        search.rows.append([row.name, baseline.sigma, first.s, first.d, first.sigma, *second])
        cv = row.adf.critical_values
        decision = "not rejected"
        if row.adf.reject_at is not None:
            decision = f"rejected at {row.adf.reject_at:.0%}"
        adf.rows.append(
            [row.name, row.adf.chosen_lags, row.adf.statistic, cv.one, cv.five, cv.ten, decision]
        )
        scan_columns = ["series"] + [f"ADF({lags})" for lags in range(len(row.adf_by_lag))]
        scan_columns.append("AIC lags")
        scan_rows.append([row.name, *row.adf_by_lag, row.adf.chosen_lags])
    by_lag = Table(title="ADF statistic by lag count", columns=scan_columns, rows=scan_rows)
    return ReportDocument(
        command="explore",
        meta=meta,
        sections=[Section(title="Order of integration", tables=[search, adf, by_lag])],
    )


def lag_report(selection: LagSelection, meta: Dict[str, Cell]) -> ReportDocument:
    table = Table(
        title=f"Information criteria on a common sample of {selection.nobs} observations",
        columns=["k", "AIC", "SBC"],
        rows=[[k, a, s] for k, a, s in zip(selection.orders, selection.aic, selection.sbc)],
    )
    return ReportDocument(
        command="select-lags",
        meta=meta,
        sections=[
            Section(
                title="Lag order",
                lines=[f"k = {selection.chosen_k} (minimum AIC)"],
                tables=[table],
            )
        ],
    )


def trace_table(eigenvalues: np.ndarray, trace: TraceTest) -> Table:
    rows = []
    triples = zip(eigenvalues, trace.trace_stats, trace.critical_values)
    for r, (value, stat, cv) in enumerate(triples):
        rows.append([f"r <= {r}", float(value), stat, cv, "reject" if stat >= cv else "accept"])
    return Table(
        title="Trace test", columns=["H0", "eigenvalue", "trace", "95% cv", "decision"], rows=rows
    )


def johansen_report(
    eigenvalues: np.ndarray,
    trace: TraceTest,
    meta: Dict[str, Cell],
    fit: Optional[JohansenFit] = None,
) -> ReportDocument:
    p = len(eigenvalues)
    if fit is None:
        line = f"r = {p}: every rank below {p} is rejected"
    elif fit.r == trace.rank:
        line = f"r = {fit.r}"
    else:
        line = f"r = {fit.r} (forced; the trace test selects {trace.rank})"
    tables = [trace_table(eigenvalues, trace)]
    if fit is not None and fit.r > 0:
        scaled = fit.display(fit.beta)
        tables.append(matrix_table("beta (scaled by 1/sqrt(nobs))", scaled, fit.names, "beta"))
        tables.append(matrix_table("alpha", fit.alpha, fit.names, "alpha"))
    return ReportDocument(
        command="johansen",
        meta=meta,
        sections=[Section(title="Cointegrating rank", lines=[line], tables=tables)],
    )


def decomposition_report(
    decomposition: PtDecomposition, fit: JohansenFit, meta: Dict[str, Cell]
) -> ReportDocument:
    loadings = decomposition.loadings
    names = decomposition.names
    tables = [
        matrix_table(
            "alpha_perp (scaled by 1/sqrt(nobs))", fit.display(loadings.alpha_perp), names, "f"
        ),
        matrix_table("beta_perp", loadings.beta_perp, names, "f"),
        matrix_table("A1", decomposition.A1, names, "f"),
        matrix_table("A2", decomposition.A2, names, "z"),
    ]
    lines = [f"{fit.p - fit.r} permanent and {fit.r} transitory factors"]
    return ReportDocument(
        command="decompose",
        meta=meta,
        sections=[Section(title="Permanent-transitory decomposition", lines=lines, tables=tables)],
    )


_TEST_COLUMNS = ["excluded", "m", "df", "LR", "95% cv", "p-value", "decision"]


def _test_row(test: RestrictionTest) -> List[Cell]:
    return [
        ",".join(test.excluded) or "-",
        test.m,
        test.df,
        test.lr_stat,
        test.critical_value,
        test.p_value,
        "reject" if test.rejected else "accept",
    ]


def restriction_report(test: RestrictionTest, meta: Dict[str, Cell]) -> ReportDocument:
    table = Table(title="H0: alpha_perp = G theta", columns=_TEST_COLUMNS, rows=[_test_row(test)])
    return ReportDocument(
        command="test",
        meta=meta,
        sections=[Section(title="Restriction test", tables=[table])],
    )


def scan_report(
    rows: Sequence[ExclusionScanRow], meta: Dict[str, Cell], top: Optional[int] = None
) -> ReportDocument:
    shown = list(rows if top is None else rows[:top])
    table = Table(
        title="Exclusion scan, largest p-value first",
        columns=_TEST_COLUMNS,
        rows=[_test_row(row.test) for row in shown],
    )
    return ReportDocument(
        command="scan",
        meta=meta,
        sections=[
            Section(
                title="Exclusion scan",
                lines=[f"{len(shown)} of {len(rows)} exclusion sets shown"],
                tables=[table],
            )
        ],
    )


def simulation_report(panel: SeriesPanel, out: str) -> ReportDocument:
    meta = panel_meta(panel)
    meta.update(
        seed=panel.meta.get("seed"),
        explosive=str(panel.meta.get("explosive")),
        spectral_radius=panel.meta.get("spectral_radius"),
    )
    return ReportDocument(
        command="simulate",
        meta=meta,
        sections=[Section(title="Simulation", lines=[f"wrote {panel.T} rows to {out}"])],
    )


def factors_report(
    groups: Sequence[Dict[str, Cell]], stacked: SeriesPanel, out: str
) -> ReportDocument:
    table = Table(
        title="Permanent factors by group",
        columns=["group", "series", "k", "r", "factors"],
        rows=[[g["group"], g["series"], g["k"], g["r"], g["factors"]] for g in groups],
    )
    return ReportDocument(
        command="factors",
        meta=panel_meta(stacked),
        sections=[
            Section(
                title="Stacked factors",
                lines=[f"wrote {stacked.p} factor series to {out}"],
                tables=[table],
            )
        ],
    )
