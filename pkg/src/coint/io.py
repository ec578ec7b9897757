"""CSV ingestion and TSV emission for monthly panels.

Input files carry a header `date,name1,...,namep` and one row per month with
dates written `YYYY-MM`. Row numbers in error messages are file line numbers
(the header is line 1).
"""

import logging
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from .core.errors import LoadError
from .core.series import Period, SeriesPanel

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

DATE_COLUMN = "date"
FLOAT_FORMAT = "%.17g"


def _read_raw(path: PathLike) -> pd.DataFrame:
    try:
        raw = pd.read_csv(
            path, header=None, dtype=str, keep_default_na=False, encoding="utf-8-sig"
        )
    except FileNotFoundError:
        raise LoadError(f"no such file: {path}")
    except pd.errors.EmptyDataError:
        raise LoadError(f"{path} is empty")
    except (pd.errors.ParserError, UnicodeDecodeError, OSError) as e:
        raise LoadError(f"cannot parse {path}: {e}")
    # short rows leave NaN behind even with keep_default_na=False
    return raw.fillna("")


def _to_float(text: str) -> float:
    # correctly rounded, so values written with %.17g read back exactly
    try:
        return float(text)
    except ValueError:
        return np.nan


def _parse_periods(dates: pd.Series) -> list:
    periods = []
    for offset, text in enumerate(dates):
        row = offset + 2
        try:
            period = Period.parse(text)
        except ValueError:
            raise LoadError(f"invalid date {text!r}, expected YYYY-MM", row=row, column=DATE_COLUMN)
        if periods:
            expected = periods[-1].shift(1)
            if period == periods[-1] or period.ordinal < expected.ordinal:
                raise LoadError(
                    f"duplicate or out-of-order date {period}", row=row, column=DATE_COLUMN
                )
            if period != expected:
                raise LoadError(
                    f"gap in the monthly sequence: {expected} is missing",
                    row=row,
                    column=DATE_COLUMN,
                )
        periods.append(period)
    return periods


def load_csv(path: PathLike) -> SeriesPanel:
    """Read a panel, validating dates, contiguity and every numeric cell.

    Raises:
        LoadError: naming the offending row and column.
    """
    raw = _read_raw(path)
    header = [str(name).strip() for name in raw.iloc[0]]
    if header[0].lower() != DATE_COLUMN:
        raise LoadError(f"first column must be {DATE_COLUMN!r}, got {header[0]!r}", row=1)
    names = header[1:]
    if not names:
        raise LoadError("no series columns after the date column", row=1)
    duplicates = sorted({name for name in names if names.count(name) > 1})
    if duplicates:
        raise LoadError(f"duplicate series names {duplicates}", row=1)
    if any(not name for name in names):
        raise LoadError("empty series name in header", row=1)

    body = raw.iloc[1:].reset_index(drop=True)
    if body.empty:
        raise LoadError(f"{path} has a header but no observations")
    periods = _parse_periods(body[0].str.strip())

    columns = []
    for index, name in enumerate(names, start=1):
        cells = body[index].str.strip()
        numeric = cells.map(_to_float).to_numpy(dtype=float)
        bad = ~np.isfinite(numeric)
        if bad.any():
            offset = int(np.argmax(bad))
            text = cells.iloc[offset]
            problem = "missing value" if text == "" else f"non-numeric value {text!r}"
            raise LoadError(problem, row=offset + 2, column=name)
        columns.append(numeric)

    logger.info(f"loaded {len(periods)} observations of {len(names)} series from {path}")
    return SeriesPanel(
        names=tuple(names), periods=tuple(periods), values=np.column_stack(columns)
    )


def panel_frame(panel: SeriesPanel) -> pd.DataFrame:
    frame = pd.DataFrame(panel.values, columns=list(panel.names))
    frame.insert(0, DATE_COLUMN, [str(period) for period in panel.periods])
    return frame


def save_csv(panel: SeriesPanel, path: PathLike) -> None:
    """Write a panel so that load_csv reads back identical values."""
    panel_frame(panel).to_csv(
        path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n"
    )


def write_tsv(frame: pd.DataFrame, path: PathLike) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, sep="\t", index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
