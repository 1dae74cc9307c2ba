"""Shared fixtures: the toy graph, the social network and an in-memory catalog"""

from pathlib import Path

import pytest

from gcore_engine.catalog.manager import CatalogManager
from gcore_engine.catalog.storage import load_graph_file
from gcore_engine.core.context import EvalSettings
from gcore_engine.core.engine import QueryEngine

FIXTURES = Path(__file__).parent / "fixtures"
QUERIES = FIXTURES / "queries"


def query_text(name: str) -> str:
    return (QUERIES / f"{name}.gcore").read_text(encoding="utf-8")


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def load_query():
    return query_text


@pytest.fixture
def toy_graph():
    return load_graph_file(FIXTURES / "fig1.json")


@pytest.fixture
def social_graph():
    return load_graph_file(FIXTURES / "fig3.json")


@pytest.fixture
def company_graph():
    return load_graph_file(FIXTURES / "company_graph.json")


@pytest.fixture
def catalog(social_graph, company_graph, toy_graph):
    manager = CatalogManager(settings=EvalSettings(seed=7))
    manager.add_graph("social_graph", social_graph)
    manager.add_graph("company_graph", company_graph)
    manager.add_graph("toy_graph", toy_graph)
    manager.set_default("social_graph")
    return manager


@pytest.fixture
def engine(catalog):
    return QueryEngine(catalog, catalog.settings)


@pytest.fixture
def toy_engine():
    return QueryEngine(settings=EvalSettings(seed=7))


@pytest.fixture
def views(catalog):
    """Catalog with the two social network views registered"""
    catalog.register_view("social_graph1", _view_body("social_graph1"))
    catalog.register_view("social_graph2", _view_body("social_graph2"))
    return catalog


def _view_body(name: str) -> str:
    text = query_text(name)
    start = text.index("AS (") + len("AS (")
    return text[start:text.rindex(")")]

