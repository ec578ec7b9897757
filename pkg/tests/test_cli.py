import json

import pytest
import yaml
from click.testing import CliRunner

from coint.cli import cli
from coint.io import load_csv


def relation_spec(p: int, r: int, length: int) -> dict:
    alpha = [[0.0] * r for _ in range(p)]
    beta = [[0.0] * r for _ in range(p)]
    for j in range(r):
        alpha[2 * j][j] = -0.3
        beta[2 * j][j] = 1.0
        beta[2 * j + 1][j] = -1.0
    return {
        "dimension": p,
        "rank": r,
        "alpha": [value for row in alpha for value in row],
        "beta": [value for row in beta for value in row],
        "intercept": [0.1] * p,
        "length": length,
        "start": "2008-01",
    }


@pytest.fixture
def runner():
    return CliRunner(mix_stderr=False)


@pytest.fixture
def simulate(runner, tmp_path):
    def _simulate(p: int, r: int, length: int, seed: int = 0) -> str:
        spec = tmp_path / f"spec_{p}_{r}.yaml"
        spec.write_text(yaml.safe_dump(relation_spec(p, r, length)), encoding="utf-8")
        out = tmp_path / f"panel_{p}_{r}_{seed}.csv"
        result = runner.invoke(
            cli, ["simulate", "--spec", str(spec), "--seed", str(seed), "--out", str(out)]
        )
        assert result.exit_code == 0, result.output + result.stderr
        return str(out)

    return _simulate


def test_full_workflow_on_nine_series(runner, simulate, tmp_path):
    csv = simulate(9, 3, 144, seed=3)
    panel = load_csv(csv)
    assert (panel.T, panel.p) == (144, 9)
    assert str(panel.periods[0]) == "2008-01"

    johansen = runner.invoke(cli, ["johansen", csv, "-k", "2"])
    assert johansen.exit_code == 0, johansen.stderr
    assert "Trace test" in johansen.output
    assert runner.invoke(cli, ["johansen", csv, "-k", "2"]).output == johansen.output

    plots = tmp_path / "plots"
    decompose = runner.invoke(
        cli, ["decompose", csv, "-k", "2", "-r", "3", "--plot-dir", str(plots)]
    )
    assert decompose.exit_code == 0, decompose.stderr
    assert "6 permanent and 3 transitory factors" in decompose.output
    assert (plots / "x1.tsv").exists()
    assert (plots / "factors.tsv").exists()

    scan = runner.invoke(cli, ["scan", csv, "-k", "2", "-r", "3", "-j", "3", "--top", "5"])
    assert scan.exit_code == 0, scan.stderr
    assert "5 of 129 exclusion sets shown" in scan.output


def test_trace_test_finds_one_relation(runner, simulate):
    found = 0
    for seed in range(5):
        result = runner.invoke(cli, ["johansen", simulate(3, 1, 300, seed), "-k", "2"])
        assert result.exit_code == 0, result.stderr
        found += "r = 1\n" in result.output
    assert found >= 3


def test_forced_rank_is_reported(runner, simulate):
    csv = simulate(3, 1, 300)
    result = runner.invoke(cli, ["--no-banner", "johansen", csv, "-k", "2", "-r", "2"])
    assert result.exit_code == 0, result.stderr
    assert "r = 2" in result.output
    assert not result.output.startswith("coint")


def test_json_scan(runner, simulate):
    result = runner.invoke(cli, ["--json", "scan", simulate(3, 1, 300), "-k", "2", "-r", "1"])
    assert result.exit_code == 0, result.stderr
    data = json.loads(result.output)
    assert data["schema_version"] == "1.0"
    assert data["command"] == "scan"
    rows = data["sections"][0]["tables"][0]["rows"]
    assert len(rows) == 3
    p_values = [row[5] for row in rows]
    assert p_values == sorted(p_values, reverse=True)


def test_precision_from_environment(runner, simulate):
    csv = simulate(3, 1, 300)
    result = runner.invoke(
        cli,
        ["--json", "test", csv, "-k", "2", "-r", "1", "--exclude", "x3"],
        env={"COINT_PRECISION": "2"},
    )
    assert result.exit_code == 0, result.stderr
    row = json.loads(result.output)["sections"][0]["tables"][0]["rows"][0]
    assert row[0] == "x3"
    assert row[4] == 5.99


def test_other_commands(runner, simulate, tmp_path):
    csv = simulate(3, 1, 300)
    explore = runner.invoke(cli, ["explore", csv, "--max-s", "3", "--max-d", "1"])
    assert explore.exit_code == 0, explore.stderr
    assert "Augmented Dickey-Fuller" in explore.output

    lags = runner.invoke(cli, ["select-lags", csv, "--kmax", "3"])
    assert lags.exit_code == 0, lags.stderr
    assert "(minimum AIC)" in lags.output

    out = tmp_path / "factors.csv"
    factors = runner.invoke(
        cli,
        ["factors", csv, "--group", "a:x1,x2:1:1", "--group", "b:x3:1:0", "--out", str(out)],
    )
    assert factors.exit_code == 0, factors.stderr
    assert load_csv(out).names == ("a_f1", "b_f1")


def test_usage_errors_exit_two(runner, simulate):
    csv = simulate(3, 1, 300)
    missing = runner.invoke(cli, ["test", csv, "-k", "2", "-r", "1"])
    assert missing.exit_code == 2
    too_big = runner.invoke(cli, ["johansen", csv, "-k", "2", "-r", "3"])
    assert too_big.exit_code == 2
    bad_group = runner.invoke(cli, ["factors", csv, "--group", "a:x1", "--out", "x.csv"])
    assert bad_group.exit_code == 2


def test_numerical_errors_exit_two(runner, simulate):
    result = runner.invoke(cli, ["decompose", simulate(3, 1, 300), "-k", "2", "-r", "0"])
    assert result.exit_code == 2
    assert "Error:" in result.stderr


def test_data_errors_exit_one(runner, tmp_path):
    csv = tmp_path / "gap.csv"
    csv.write_text("date,a,b\n2000-01,1,2\n2000-03,3,4\n", encoding="utf-8")
    result = runner.invoke(cli, ["johansen", str(csv), "-k", "1"])
    assert result.exit_code == 1
    assert "2000-02 is missing" in result.stderr


def test_version(runner):
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert "0.1.0" in result.output


def text_tables(output: str) -> dict:
    tables = {}
    lines = output.splitlines()
    for i, line in enumerate(lines):
        if line.startswith("-- "):
            body = []
            for row in lines[i + 2 :]:
                if not row.strip():
                    break
                body.append(row.split())
            tables[line[3:]] = body
    return tables


def json_tables(output: str, precision: int) -> dict:
    def cell_text(cell) -> str:
        return f"{cell:.{precision}f}" if isinstance(cell, float) else str(cell)

    return {
        table["title"]: [[cell_text(cell) for cell in row] for row in table["rows"]]
        for section in json.loads(output)["sections"]
        for table in section["tables"]
    }


@pytest.mark.parametrize(
    "arguments",
    [
        ["decompose", "-k", "2", "-r", "1"],
        ["test", "-k", "2", "-r", "1", "--exclude", "x3"],
    ],
)
@pytest.mark.parametrize("precision", [2, 4, 6])
def test_text_and_json_report_the_same_values(runner, simulate, arguments, precision):
    csv = simulate(3, 1, 300)
    command = [arguments[0], csv, *arguments[1:]]
    text = runner.invoke(cli, ["--precision", str(precision), *command])
    data = runner.invoke(cli, ["--json", "--precision", str(precision), *command])
    assert text.exit_code == 0, text.stderr
    assert data.exit_code == 0, data.stderr
    expected = json_tables(data.output, precision)
    assert expected
    assert text_tables(text.output) == expected
