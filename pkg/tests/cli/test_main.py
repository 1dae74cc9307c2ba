"""Tests for the gcore command line"""

import json

import pytest
import yaml
from typer.testing import CliRunner

from gcore_engine.cli.main import EXIT_PARSE, EXIT_RUNTIME, app

runner = CliRunner()


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    for variable in ("GCORE_CATALOG", "GCORE_DEFAULT_GRAPH", "GCORE_SEED", "GCORE_LOG_LEVEL"):
        monkeypatch.delenv(variable, raising=False)
    return tmp_path


@pytest.fixture
def social_args(fixtures_dir):
    return [
        "--graph", f"social_graph={fixtures_dir / 'fig3.json'}",
        "--graph", f"company_graph={fixtures_dir / 'company_graph.json'}",
        "--default", "social_graph",
    ]


def query_file(directory, text, name="query.gcore"):
    path = directory / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def node_ids(path):
    return [n["id"] for n in json.loads(path.read_text(encoding="utf-8"))["nodes"]]


def test_run_writes_json(workdir, fixtures_dir, social_args):
    out = workdir / "results" / "acme.json"
    result = runner.invoke(
        app, ["run", str(fixtures_dir / "queries" / "acme_employees.gcore"), *social_args, "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert node_ids(out) == ["Alice", "John"]


@pytest.mark.parametrize("output_format, marker", [("dot", "digraph"), ("table", "Nodes")])
def test_run_other_formats(workdir, fixtures_dir, social_args, output_format, marker):
    result = runner.invoke(
        app,
        ["run", str(fixtures_dir / "queries" / "acme_employees.gcore"), *social_args, "--format", output_format],
    )
    assert result.exit_code == 0, result.output
    assert marker in result.output


def test_run_prints_bindings_and_plan(workdir, fixtures_dir, social_args):
    result = runner.invoke(
        app,
        [
            "run", str(fixtures_dir / "queries" / "acme_employees.gcore"), *social_args,
            "--format", "table", "--bindings", "--explain",
        ],
    )
    assert result.exit_code == 0, result.output
    assert "#Alice" in result.output
    assert "CONSTRUCT" in result.output


def test_exit_codes(workdir, fixtures_dir, social_args):
    syntax = runner.invoke(app, ["run", str(fixtures_dir / "queries" / "invalid_syntax.gcore"), *social_args])
    assert syntax.exit_code == EXIT_PARSE

    static = runner.invoke(app, ["run", query_file(workdir, "CONSTRUCT (x GROUP z) MATCH (n)"), *social_args])
    assert static.exit_code == EXIT_PARSE

    missing = runner.invoke(app, ["run", query_file(workdir, "CONSTRUCT (n) MATCH (n) ON nowhere"), *social_args])
    assert missing.exit_code == EXIT_RUNTIME

    bad_format = runner.invoke(
        app, ["run", query_file(workdir, "CONSTRUCT (n) MATCH (n)"), *social_args, "--format", "xml"]
    )
    assert bad_format.exit_code == EXIT_RUNTIME

    bad_pair = runner.invoke(app, ["run", query_file(workdir, "CONSTRUCT (n) MATCH (n)"), "--graph", "oops"])
    assert bad_pair.exit_code == EXIT_RUNTIME


def test_run_with_table(workdir, fixtures_dir):
    out = workdir / "alice.json"
    query = query_file(workdir, "CONSTRUCT (o) MATCH (o:orders) WHERE o.customer = 'Alice'")
    result = runner.invoke(
        app, ["run", query, "--table", f"orders={fixtures_dir / 'orders.csv'}", "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert node_ids(out) == ["orders:0"]


def test_init(workdir):
    result = runner.invoke(app, ["init", "demo"])
    assert result.exit_code == 0, result.output
    config = yaml.safe_load((workdir / ".gcore-config.yaml").read_text())
    assert config["project"]["name"] == "demo"
    assert (workdir / ".gcore-catalog").is_dir()


def test_catalog_commands(workdir, fixtures_dir, load_query):
    catalog = ["--catalog", str(workdir / "cat")]
    assert runner.invoke(app, ["catalog", "load", "social_graph", str(fixtures_dir / "fig3.json"), *catalog]).exit_code == 0
    assert runner.invoke(app, ["catalog", "default", "social_graph", *catalog]).exit_code == 0
    imported = runner.invoke(
        app,
        ["catalog", "import", "orders", str(fixtures_dir / "orders.csv"), "--column-type", "amount=float", *catalog],
    )
    assert imported.exit_code == 0, imported.output

    view = query_file(workdir, "CONSTRUCT (c) MATCH (c:City) ON social_graph", "cities.gcore")
    assert runner.invoke(app, ["catalog", "view", "cities", view, *catalog]).exit_code == 0
    clash = runner.invoke(app, ["catalog", "view", "social_graph", view, *catalog])
    assert clash.exit_code == EXIT_RUNTIME

    listing = runner.invoke(app, ["catalog", "list", *catalog])
    assert listing.exit_code == 0
    for name in ("social_graph", "orders", "cities"):
        assert name in listing.output

    out = workdir / "houston.json"
    result = runner.invoke(
        app, ["run", query_file(workdir, "CONSTRUCT (n) MATCH (n) ON cities"), *catalog, "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert node_ids(out) == ["Houston"]

    unknown = runner.invoke(app, ["catalog", "default", "nowhere", *catalog])
    assert unknown.exit_code == EXIT_RUNTIME


def test_empty_catalog_listing(workdir):
    result = runner.invoke(app, ["catalog", "list", "--catalog", str(workdir / "empty")])
    assert result.exit_code == 0
    assert "empty" in result.output
