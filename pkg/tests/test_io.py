import numpy as np
import pandas as pd
import pytest

from coint.core.errors import LoadError
from coint.io import load_csv, panel_frame, save_csv, write_tsv


@pytest.fixture
def write(tmp_path):
    def _write(text: str, name: str = "panel.csv"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write


def test_load_well_formed(write):
    panel = load_csv(write("date,gdp,cpi\n2001-11,1.5,2\n2001-12,1.25,3\n2002-01,-5e-1,4\n"))
    assert panel.names == ("gdp", "cpi")
    assert [str(p) for p in panel.periods] == ["2001-11", "2001-12", "2002-01"]
    np.testing.assert_array_equal(panel.values, [[1.5, 2.0], [1.25, 3.0], [-0.5, 4.0]])


def test_byte_order_mark_is_ignored(tmp_path):
    path = tmp_path / "excel.csv"
    path.write_text("date,gdp\n2001-11,1.5\n2001-12,2\n", encoding="utf-8-sig")
    assert path.read_bytes().startswith(b"\xef\xbb\xbf")
    panel = load_csv(path)
    assert panel.names == ("gdp",)
    np.testing.assert_array_equal(panel.values[:, 0], [1.5, 2.0])


def test_gap_names_the_missing_month(write):
    with pytest.raises(LoadError) as info:
        load_csv(write("date,a\n2000-01,1\n2000-03,2\n"))
    assert info.value.row == 3
    assert "2000-02 is missing" in str(info.value)


@pytest.mark.parametrize("dates", [("2000-02", "2000-02"), ("2000-02", "2000-01")])
def test_duplicate_or_backward_dates(write, dates):
    with pytest.raises(LoadError) as info:
        load_csv(write(f"date,a\n{dates[0]},1\n{dates[1]},2\n"))
    assert info.value.row == 3
    assert info.value.column == "date"


def test_invalid_date(write):
    with pytest.raises(LoadError) as info:
        load_csv(write("date,a\n2000-1,1\n"))
    assert info.value.row == 2


def test_non_numeric_cell(write):
    with pytest.raises(LoadError) as info:
        load_csv(write("date,a,b\n2000-01,1,2\n2000-02,3,abc\n"))
    assert (info.value.row, info.value.column) == (3, "b")
    assert "non-numeric value 'abc'" in str(info.value)


def test_missing_cells(write):
    with pytest.raises(LoadError) as info:
        load_csv(write("date,a,b\n2000-01,1,\n"))
    assert "missing value" in str(info.value)
    assert info.value.column == "b"
    with pytest.raises(LoadError) as info:
        load_csv(write("date,a,b\n2000-01,1,2\n2000-02,1\n"))
    assert (info.value.row, info.value.column) == (3, "b")


@pytest.mark.parametrize(
    "text",
    [
        "",
        "month,a\n2000-01,1\n",
        "date\n2000-01\n",
        "date,a,a\n2000-01,1,2\n",
        "date,a\n",
    ],
)
def test_malformed_files(write, text):
    with pytest.raises(LoadError):
        load_csv(write(text))


def test_missing_file(tmp_path):
    with pytest.raises(LoadError):
        load_csv(tmp_path / "absent.csv")


def test_save_and_load_preserve_values(panel_p9, tmp_path):
    path = tmp_path / "panel.csv"
    save_csv(panel_p9, path)
    loaded = load_csv(path)
    assert loaded.names == panel_p9.names
    assert loaded.periods == panel_p9.periods
    np.testing.assert_array_equal(loaded.values, panel_p9.values)

    again = tmp_path / "again.csv"
    save_csv(loaded, again)
    assert again.read_bytes() == path.read_bytes()


def test_panel_frame_and_tsv(random_panel, tmp_path):
    frame = panel_frame(random_panel)
    assert list(frame.columns) == ["date", "x1", "x2", "x3"]
    target = tmp_path / "nested" / "dir" / "x.tsv"
    write_tsv(frame, target)
    read = pd.read_csv(target, sep="\t")
    assert list(read.columns) == list(frame.columns)
    assert len(read) == random_panel.T
