"""Command-line front end.

Reports go to stdout, logs to stderr. Exit codes: 0 on success, 1 for data
errors, 2 for numerical failures and usage errors.
"""

import functools
import logging
import sys
from pathlib import Path
from typing import Any, Callable, List, Optional

import click
from pydantic import BaseModel, ConfigDict

from . import __version__
from .config import SessionParams, load_simulation_spec
from .core.errors import CointError, InvalidInputError, InvalidRankError, UsageProblem
from .core.series import SeriesPanel
from .io import load_csv, save_csv, write_tsv
from .models.ggdecomp import stack_factors
from .models.johansen import fit_johansen
from .models.restrict import selection_matrix, test_alpha_perp
from .pipeline import AnalysisSession
from .report import (
    DEFAULT_PRECISION,
    ReportDocument,
    decomposition_report,
    exploration_report,
    factors_report,
    johansen_report,
    lag_report,
    panel_meta,
    restriction_report,
    scan_report,
    simulation_report,
)

logger = logging.getLogger(__name__)


class Settings(BaseModel):
    model_config = ConfigDict(frozen=True)

    as_json: bool = False
    precision: int = DEFAULT_PRECISION
    banner: bool = True


class ReportedError(click.ClickException):
    """A library error rendered as `Error: ...` with its own exit code"""

    def __init__(self, error: CointError):
        super().__init__(str(error))
        self.exit_code = error.exit_code


def reports_errors(func: Callable) -> Callable:
    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except UsageProblem as e:
            raise click.UsageError(str(e))
        except CointError as e:
            logger.debug("command failed", exc_info=True)
            raise ReportedError(e)

    return wrapper


def emit(ctx: click.Context, document: ReportDocument) -> None:
    settings: Settings = ctx.obj
    if settings.as_json:
        click.echo(document.render_json(settings.precision))
    else:
        click.echo(document.render_text(settings.precision, banner=settings.banner), nl=False)


def _configure_logging(verbose: int) -> None:
    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    elif verbose > 1:
        level = logging.DEBUG
    logging.basicConfig(
        stream=sys.stderr,
        level=level,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


def _session(csv: str, **params: Any) -> AnalysisSession:
    panel = load_csv(csv)
    return AnalysisSession(panel, SessionParams().updated(**params))


def _meta(session: AnalysisSession, **extra: Any) -> dict:
    meta = panel_meta(session.panel)
    meta.update(extra)
    return meta


csv_argument = click.argument("csv", type=click.Path(exists=True, dir_okay=False))
lags_option = click.option(
    "--lags", "-k", type=click.IntRange(min=1), required=True, help="VAR order k."
)


@click.group()
@click.option("--json", "as_json", is_flag=True, help="Emit the JSON report instead of text.")
@click.option(
    "--precision",
    type=click.IntRange(0, 15),
    default=DEFAULT_PRECISION,
    envvar="COINT_PRECISION",
    show_default=True,
    help="Decimals shown in reports.",
)
@click.option("--no-banner", is_flag=True, help="Omit the version banner from text reports.")
@click.option("-v", "--verbose", count=True, help="Log INFO (-v) or DEBUG (-vv) to stderr.")
@click.version_option(version=__version__, prog_name="coint")
@click.pass_context
def cli(ctx: click.Context, as_json: bool, precision: int, no_banner: bool, verbose: int) -> None:
    """Cointegration analysis of monthly multivariate series."""
    _configure_logging(verbose)
    ctx.obj = Settings(as_json=as_json, precision=precision, banner=not no_banner)


@cli.command()
@csv_argument
@click.option("--max-s", type=click.IntRange(min=1), default=12, show_default=True)
@click.option("--max-d", type=click.IntRange(min=0), default=2, show_default=True)
@click.option("--adf-lags", type=click.IntRange(min=0), default=3, show_default=True)
@click.pass_context
@reports_errors
def explore(ctx: click.Context, csv: str, max_s: int, max_d: int, adf_lags: int) -> None:
    """Differencing search and ADF tests for every series."""
    session = _session(csv, max_s=max_s, max_d=max_d, adf_lags=adf_lags)
    emit(ctx, exploration_report(session.exploration(), _meta(session)))


@cli.command("select-lags")
@csv_argument
@click.option("--kmax", type=click.IntRange(min=1), default=4, show_default=True)
@click.pass_context
@reports_errors
def select_lags(ctx: click.Context, csv: str, kmax: int) -> None:
    """AIC and SBC for VAR orders 1..kmax on a common sample."""
    session = _session(csv, k_max=kmax)
    emit(ctx, lag_report(session.lag_selection(), _meta(session, k_max=kmax)))


@cli.command()
@csv_argument
@lags_option
@click.option("--rank", "-r", type=click.IntRange(min=0), default=None, help="Force the rank.")
@click.pass_context
@reports_errors
def johansen(ctx: click.Context, csv: str, lags: int, rank: Optional[int]) -> None:
    """Eigenvalues, trace test and cointegrating vectors."""
    session = _session(csv, lags=lags, rank=rank)
    eigen, trace = session.eigen(), session.trace()
    fit = None
    if rank is not None or trace.rank < session.panel.p:
        fit = session.fit()
    meta = _meta(session, k=lags, nobs=session.moments().nobs)
    emit(ctx, johansen_report(eigen.eigenvalues, trace, meta, fit))


@cli.command()
@csv_argument
@lags_option
@click.option("--rank", "-r", type=click.IntRange(min=0), required=True)
@click.option(
    "--loadings",
    type=click.Choice(["dual", "orthogonal"]),
    default="dual",
    show_default=True,
    help="How alpha and beta_perp are completed.",
)
@click.option(
    "--plot-dir",
    type=click.Path(file_okay=False),
    default=None,
    help="Write per-series component TSV files here.",
)
@click.pass_context
@reports_errors
def decompose(
    ctx: click.Context,
    csv: str,
    lags: int,
    rank: int,
    loadings: str,
    plot_dir: Optional[str],
) -> None:
    """Permanent-transitory decomposition for a given rank."""
    session = _session(csv, lags=lags, rank=rank, loadings=loadings)
    decomposition = session.decomposition()
    fit = session.fit()
    if plot_dir:
        directory = Path(plot_dir)
        for name in decomposition.names:
            write_tsv(decomposition.component_frame(name), directory / f"{name}.tsv")
        write_tsv(decomposition.factor_frame(), directory / "factors.tsv")
        logger.info(f"wrote plot data for {len(decomposition.names)} series to {directory}")
    emit(ctx, decomposition_report(decomposition, fit, _meta(session, k=lags, r=rank)))


def _split_names(text: str) -> List[str]:
    return [name.strip() for name in text.split(",") if name.strip()]


@cli.command()
@csv_argument
@lags_option
@click.option("--rank", "-r", type=click.IntRange(min=0), required=True)
@click.option("--exclude", default="", help="Comma-separated series excluded from alpha_perp.")
@click.pass_context
@reports_errors
def test(ctx: click.Context, csv: str, lags: int, rank: int, exclude: str) -> None:
    """Likelihood-ratio test that some series drop out of the common trends."""
    session = _session(csv, lags=lags, rank=rank)
    fit = session.fit()
    excluded = _split_names(exclude)
    result = test_alpha_perp(fit, selection_matrix(fit.names, excluded), excluded)
    emit(ctx, restriction_report(result, _meta(session, k=lags, r=rank)))


@cli.command()
@csv_argument
@lags_option
@click.option("--rank", "-r", type=click.IntRange(min=0), required=True)
@click.option("--max-excluded", "-j", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--top", type=click.IntRange(min=1), default=None, help="Show only the first N rows.")
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True)
@click.pass_context
@reports_errors
def scan(
    ctx: click.Context,
    csv: str,
    lags: int,
    rank: int,
    max_excluded: int,
    top: Optional[int],
    workers: int,
) -> None:
    """Exclusion tests over every set of up to J series."""
    session = _session(csv, lags=lags, rank=rank, max_excluded=max_excluded, workers=workers)
    meta = _meta(session, k=lags, r=rank, max_excluded=max_excluded)
    emit(ctx, scan_report(session.scan(), meta, top))


@cli.command()
@click.option("--spec", "spec_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.pass_context
@reports_errors
def simulate(ctx: click.Context, spec_path: str, seed: int, out: str) -> None:
    """Generate a synthetic panel from a YAML process spec."""
    panel = load_simulation_spec(spec_path).simulate(seed)
    save_csv(panel, out)
    emit(ctx, simulation_report(panel, out))


def _parse_group(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 4:
        raise click.BadParameter(f"expected NAME:COL,COL,...:K:R, got {text!r}")
    name, columns, k, r = parts
    try:
        return name, _split_names(columns), int(k), int(r)
    except ValueError:
        raise click.BadParameter(f"K and R must be integers in {text!r}")


@cli.command()
@csv_argument
@click.option(
    "--group",
    "groups",
    multiple=True,
    required=True,
    help="NAME:COL,COL,...:K:R, one per subsystem.",
)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.pass_context
@reports_errors
def factors(ctx: click.Context, csv: str, groups: List[str], out: str) -> None:
    """Stack the permanent factors of several subsystems into one panel."""
    panel = load_csv(csv)
    fitted = []
    summary = []
    for text in groups:
        name, columns, k, r = _parse_group(text)
        if not columns:
            raise InvalidInputError(f"group {name!r} names no series")
        subpanel: SeriesPanel = panel.select(columns)
        if r >= subpanel.p:
            raise InvalidRankError(f"group {name!r}: rank must be below {subpanel.p}, got {r}")
        fit = fit_johansen(subpanel, k, r)
        fitted.append((name, subpanel, fit))
        summary.append(
            {"group": name, "series": ",".join(columns), "k": k, "r": r, "factors": subpanel.p - r}
        )
    stacked = stack_factors(fitted)
    save_csv(stacked, out)
    emit(ctx, factors_report(summary, stacked, out))


def main() -> None:
    cli(prog_name="coint")


if __name__ == "__main__":
    main()
