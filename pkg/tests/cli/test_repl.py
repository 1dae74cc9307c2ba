"""Tests for the interactive session"""

from io import StringIO

from rich.console import Console

from gcore_engine.cli.repl import LAST, QueryRepl
from gcore_engine.graph.model import node_id


def scripted(lines):
    remaining = iter(lines)

    def read_line(prompt):
        try:
            return next(remaining)
        except StopIteration:
            raise EOFError

    return read_line


def session(catalog, engine, lines):
    output = StringIO()
    repl = QueryRepl(catalog, engine, Console(file=output, width=200), scripted(lines))
    repl.loop()
    return output.getvalue()


def test_multi_line_query_is_stored_as_last(catalog, engine):
    text = session(
        catalog,
        engine,
        ["CONSTRUCT (n)", "  MATCH (n:Person)", "  WHERE n.employer = 'Acme';"],
    )
    assert catalog.resolve(LAST).nodes == frozenset({node_id("Alice"), node_id("John")})
    assert "2 nodes" in text
    assert "Bye" in text


def test_results_can_be_queried_again(catalog, engine):
    session(
        catalog,
        engine,
        ["CONSTRUCT (n) MATCH (n:Person) WHERE n.employer = 'Acme';", "CONSTRUCT (n) MATCH (n:Manager) ON _last;"],
    )
    assert catalog.resolve(LAST).nodes == frozenset({node_id("John")})


def test_commands(catalog, engine, fixtures_dir):
    text = session(
        catalog,
        engine,
        [
            f"\\load toy {fixtures_dir / 'fig1.json'}",
            f"\\import orders {fixtures_dir / 'orders.csv'} Order",
            "\\default toy",
            "\\graphs",
            "\\view cities",
            "CONSTRUCT (c) MATCH (c:City);",
            "\\help",
        ],
    )
    assert catalog.default_name == "toy"
    assert catalog.resolve("orders").labels_of(node_id("orders:0")) == frozenset({"Order"})
    assert catalog.resolve("cities").nodes == frozenset({node_id("106")})
    assert "toy: 6 nodes, 7 edges, 1 paths" in text
    assert "Registered graph view cities" in text
    assert "\\quit" in text


def test_errors_do_not_end_the_session(catalog, engine):
    text = session(
        catalog,
        engine,
        [
            "\\bogus",
            "\\load onlyname",
            "\\default nowhere",
            "CONSTRUCT (n MATCH (n);",
            "CONSTRUCT (n) MATCH (n) ON nowhere;",
            "CONSTRUCT (c) MATCH (c:City);",
        ],
    )
    assert "Unknown command \\bogus" in text
    assert "Usage: \\load NAME FILE" in text
    assert text.count("❌") == 5
    assert catalog.resolve(LAST).nodes == frozenset({node_id("Houston")})


def test_quit_stops_reading(catalog, engine):
    session(catalog, engine, ["\\quit", "CONSTRUCT (n) MATCH (n);"])
    assert not catalog.has(LAST)
