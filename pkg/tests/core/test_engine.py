"""End-to-end query evaluation over the social network catalog"""

import pytest

from gcore_engine.core.context import EvalSettings
from gcore_engine.core.engine import QueryEngine
from gcore_engine.core.exporter import export_graph
from gcore_engine.graph.model import GraphBuilder, edge_id, node_id, validate
from gcore_engine.utils.errors import (
    DuplicateNameError,
    ExpressionTypeError,
    ParseError,
    PathCostError,
    UnknownGraphError,
)


def names(graph):
    return sorted(n.value for n in graph.nodes)


def test_acme_employees(engine, load_query):
    result = engine.execute(load_query("acme_employees"))
    assert names(result.graph) == ["Alice", "John"]
    assert result.graph.edges == frozenset()
    assert result.execution_time >= 0
    assert result.to_dict()["graph"] == {"nodes": 2, "edges": 0, "paths": 0}


@pytest.mark.parametrize(
    "query, nodes, edges",
    [("works_at_equi_join", 11, 20), ("works_at_in", 13, 22), ("works_at_unrolled", 13, 22)],
)
def test_works_at_integration(engine, load_query, query, nodes, edges):
    graph = engine.execute(load_query(query)).graph
    assert graph.summary() == {"nodes": nodes, "edges": edges, "paths": 0}
    assert validate(graph) == []


def test_frank_works_at_both_companies(engine, load_query):
    graph = engine.execute(load_query("works_at_in")).graph
    employers = sorted(
        graph.endpoints[e][1].value
        for e in graph.edges
        if "worksAt" in graph.labels_of(e) and graph.endpoints[e][0] == node_id("Frank")
    )
    assert employers == ["CWI", "MIT"]


def test_implicit_and_explicit_exists_agree(engine, load_query):
    implicit = engine.execute(load_query("reachable_people")).graph
    explicit = engine.execute(load_query("explicit_exists")).graph
    assert names(implicit) == ["Celine", "Frank", "John", "Peter"]
    assert implicit.nodes == explicit.nodes


def test_all_paths_on_social_graph(engine, load_query):
    graph = engine.execute(load_query("all_paths")).graph
    assert names(graph) == ["Alice", "Celine", "Frank", "John", "Peter"]
    assert all("knows" in graph.labels_of(e) for e in graph.edges)
    assert graph.paths == frozenset()


def test_social_graph1_counts_messages(views):
    engine = QueryEngine(views, views.settings)
    graph = views.resolve("social_graph1")
    assert graph.summary() == {"nodes": 9, "edges": 17, "paths": 0}
    counts = {e.value: graph.values_of(e, "nr_messages") for e in graph.edges if "knows" in graph.labels_of(e)}
    assert counts == {f"k{i}": frozenset({1}) for i in range(1, 9)}
    assert engine.execute("CONSTRUCT (n) MATCH (n:Person) ON social_graph1").graph.summary()["nodes"] == 5


def test_social_graph2_stores_wagner_paths(views):
    graph = views.resolve("social_graph2")
    paths = sorted(graph.paths)
    assert len(paths) == 2
    ends = sorted(graph.path_nodes(p)[-1].value for p in paths)
    assert ends == ["Celine", "Frank"]
    for path in paths:
        assert graph.labels_of(path) == frozenset({"toWagner"})
        assert graph.path_nodes(path)[:2] == [node_id("John"), node_id("Peter")]


def test_wagner_friend(views, load_query):
    engine = QueryEngine(views, views.settings)
    graph = engine.execute(load_query("wagner_friend")).graph
    friends = [e for e in graph.edges if "wagnerFriend" in graph.labels_of(e)]
    assert len(friends) == 1
    assert graph.endpoints[friends[0]] == (node_id("John"), node_id("Peter"))
    assert graph.values_of(friends[0], "score") == frozenset({2})


def test_graph_view_clause_registers_view(catalog, load_query):
    engine = QueryEngine(catalog, catalog.settings)
    result = engine.execute(load_query("social_graph1"))
    assert result.views == ["social_graph1"]
    assert result.graph.is_empty()
    assert catalog.has("social_graph1")
    # identical definition again is accepted
    engine.execute(load_query("social_graph1"))
    with pytest.raises(DuplicateNameError):
        engine.execute("GRAPH VIEW social_graph1 AS (CONSTRUCT (n) MATCH (n))")


def test_local_graph_clause(engine):
    graph = engine.execute(
        "GRAPH cities AS (CONSTRUCT (c) MATCH (c:City)) "
        "CONSTRUCT (x) MATCH (x) ON cities"
    ).graph
    assert names(graph) == ["Houston"]


def test_set_operations(toy_engine, toy_graph):
    people = "(CONSTRUCT (n) MATCH (n:Person))"
    managers = "(CONSTRUCT (n) MATCH (n:Manager))"
    assert names(toy_engine.execute(f"{people} MINUS {managers}", toy_graph).graph) == ["103", "104", "105"]
    assert names(toy_engine.execute(f"{people} INTERSECT {managers}", toy_graph).graph) == ["102"]
    assert len(toy_engine.execute(f"{people} UNION {managers}", toy_graph).graph.nodes) == 4


def test_path_view_cost_and_where(engine):
    result = engine.execute(
        "PATH wKnows = (x)-[e:knows]->(y) WHERE NOT 'Acme' IN y.employer COST 2 "
        "CONSTRUCT (n)-/@p:viaNonAcme/->(m) "
        "MATCH (n:Person)-/p<~wKnows*> COST c/->(m:Person) "
        "WHERE n.firstName = 'John' AND m.firstName = 'Frank'"
    )
    rows = result.bindings
    assert len(rows) == 1
    assert rows.rows[0]["c"] == 4
    (path,) = result.graph.paths
    assert result.graph.path_edges(path) == [edge_id("k1"), edge_id("k7")]


def test_path_view_rejects_non_positive_cost(engine):
    with pytest.raises(PathCostError):
        engine.execute(
            "PATH bad = (x)-[e:knows]->(y) COST 0 "
            "CONSTRUCT (n) MATCH (n)-/<~bad>/->(m)"
        )


def test_nodes_and_length_of_computed_paths(engine):
    result = engine.execute(
        "CONSTRUCT (m {hops := length(p)}) "
        "MATCH (n:Person)-/p<:knows*>/->(m:Person) "
        "WHERE n.firstName = 'John' AND nodes(p)[1] = m"
    )
    assert names(result.graph) == ["Alice", "Peter"]
    assert all(result.graph.values_of(n, "hops") == frozenset({1}) for n in result.graph.nodes)


def test_labels_function(engine):
    graph = engine.execute(
        "CONSTRUCT (n) MATCH (n) WHERE 'Manager' IN labels(n)"
    ).graph
    assert names(graph) == ["John"]


def test_case_expression(engine):
    graph = engine.execute(
        "CONSTRUCT (n {kind := CASE WHEN n:Manager THEN 'boss' ELSE 'staff' END}) MATCH (n:Person)"
    ).graph
    assert graph.values_of(node_id("John"), "kind") == frozenset({"boss"})
    assert graph.values_of(node_id("Peter"), "kind") == frozenset({"staff"})


def test_type_errors_surface(engine):
    with pytest.raises(ExpressionTypeError):
        engine.execute("CONSTRUCT (n) MATCH (n:Person) WHERE n.firstName < 3")


def test_function_errors_keep_their_cause(engine):
    with pytest.raises(ExpressionTypeError, match=r"upper takes 1 argument\(s\), got 2"):
        engine.execute("CONSTRUCT (n {x := upper(n.firstName, 'b')}) MATCH (n:Person)")
    with pytest.raises(ExpressionTypeError, match="upper expects a string, got int"):
        engine.execute("CONSTRUCT (n {x := upper(1)}) MATCH (n:Person)")


def test_unknown_graph(engine):
    with pytest.raises(UnknownGraphError):
        engine.execute("CONSTRUCT (n) MATCH (n) ON nowhere")


def test_parse_errors_are_raised(engine, load_query):
    with pytest.raises(ParseError) as info:
        engine.execute(load_query("invalid_syntax"))
    assert info.value.line == 2


def test_no_default_graph():
    with pytest.raises(UnknownGraphError):
        QueryEngine().execute("CONSTRUCT (n) MATCH (n)")


def test_empty_graph_gives_empty_result():
    result = QueryEngine().execute("CONSTRUCT (n) MATCH (n)", GraphBuilder().build())
    assert result.graph.is_empty()
    assert len(result.bindings) == 0


def test_output_is_deterministic(catalog, load_query):
    runs = [
        export_graph(QueryEngine(catalog, EvalSettings(seed=11)).execute(load_query(q)).graph, "json")
        for q in ("company_aggregation", "local_people")
        for _ in range(2)
    ]
    assert runs[0] == runs[1]
    assert runs[2] == runs[3]
