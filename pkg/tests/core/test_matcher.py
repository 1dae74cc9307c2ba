"""Tests for MATCH: patterns, locations, WHERE and OPTIONAL"""

from gcore_engine.core.engine import QueryEngine
from gcore_engine.graph.model import GraphBuilder, edge_id, node_id, path_id


def bindings_of(engine, text, graph=None):
    return engine.execute(text, graph).bindings


def test_stored_path_pattern_with_regex(toy_engine, toy_graph, load_query):
    result = toy_engine.execute(load_query("houston_pairs"), toy_graph)
    assert result.bindings.project(["x", "y", "w", "z"]).to_records() == [
        {"w": "#106", "x": "#105", "y": "#102", "z": "#301"}
    ]
    same_city = [e for e in result.graph.edges if "sameCity" in result.graph.labels_of(e)]
    assert [result.graph.endpoints[e] for e in same_city] == [(node_id("105"), node_id("102"))]


def test_stored_path_must_conform_to_regex(toy_engine, toy_graph):
    rows = bindings_of(toy_engine, "CONSTRUCT (x) MATCH (x)-/@z<:knows*>/->(y)", toy_graph)
    assert len(rows) == 0


def test_stored_path_binds_hop_count(toy_engine, toy_graph):
    rows = bindings_of(toy_engine, "CONSTRUCT (x) MATCH (x)-/@z:toWagner COST c/->(y)", toy_graph)
    assert rows.to_records() == [{"c": 2, "x": "#105", "y": "#102", "z": "#301"}]


def test_label_disjunction(toy_engine, toy_graph):
    rows = bindings_of(toy_engine, "CONSTRUCT (n) MATCH (n:Tag|City)", toy_graph)
    assert rows.values_of("n") == [node_id("101"), node_id("106")]


def test_label_conjunction(toy_engine, toy_graph):
    rows = bindings_of(toy_engine, "CONSTRUCT (n) MATCH (n:Person:Manager)", toy_graph)
    assert rows.values_of("n") == [node_id("102")]


def test_undirected_edge_pattern(toy_engine, toy_graph):
    rows = bindings_of(
        toy_engine, "CONSTRUCT (a) MATCH (a)-[e:knows]-(b) WHERE a.name = 'Frank Gold'", toy_graph
    )
    assert {(r["e"].value, r["b"].value) for r in rows} == {
        ("202", "102"),
        ("203", "105"),
        ("204", "104"),
        ("207", "105"),
    }


def test_constant_property_predicate(toy_engine, toy_graph):
    rows = bindings_of(toy_engine, "CONSTRUCT (c) MATCH (c {name = 'Houston'})", toy_graph)
    assert rows.values_of("c") == [node_id("106")]


def test_property_binding_unrolls_values(engine):
    rows = bindings_of(engine, "CONSTRUCT (n) MATCH (n:Person {employer=e})")
    assert {(r["n"].value, r["e"]) for r in rows} == {
        ("Alice", "Acme"),
        ("Celine", "HAL"),
        ("Frank", "CWI"),
        ("Frank", "MIT"),
        ("John", "Acme"),
    }


def test_cartesian_product_over_two_graphs(engine):
    rows = bindings_of(engine, "CONSTRUCT (c) MATCH (c:Company) ON company_graph, (n:Person) ON social_graph")
    assert len(rows) == 20


def test_equality_join_over_two_graphs(engine, load_query):
    assert len(bindings_of(engine, load_query("works_at_equi_join"))) == 3
    assert len(bindings_of(engine, load_query("works_at_in"))) == 5
    assert len(bindings_of(engine, load_query("works_at_unrolled"))) == 5


def test_unlocated_pattern_uses_next_location(engine):
    rows = bindings_of(engine, "CONSTRUCT (c) MATCH (c:Company), (d:Company) ON company_graph WHERE c = d")
    assert len(rows) == 4


def test_location_can_be_a_subquery(toy_engine, toy_graph):
    rows = bindings_of(
        toy_engine,
        "CONSTRUCT (n) MATCH (n) ON (CONSTRUCT (m) MATCH (m:City))",
        toy_graph,
    )
    assert rows.values_of("n") == [node_id("106")]


def test_optional_block_keeps_unmatched_rows(toy_engine, toy_graph):
    rows = bindings_of(
        toy_engine,
        "CONSTRUCT (n) MATCH (n:Person) OPTIONAL (n)-[:hasInterest]->(t)",
        toy_graph,
    )
    assert len(rows) == 4
    with_tag = [r for r in rows if "t" in r]
    assert [(r["n"], r["t"]) for r in with_tag] == [(node_id("102"), node_id("101"))]


def test_optional_where_filters_only_the_block(toy_engine, toy_graph):
    rows = bindings_of(
        toy_engine,
        "CONSTRUCT (n) MATCH (n:Person) OPTIONAL (n)-[:knows]->(m) WHERE m.name = 'Peter Smith'",
        toy_graph,
    )
    assert len(rows) == 4
    assert {r["n"].value: r.value("m") for r in rows if "m" in r} == {"103": node_id("105")}


def test_optional_blocks_commute(engine):
    located = "OPTIONAL (n)-[:isLocatedIn]->(c) WHERE c.name = 'Houston'"
    interest = "OPTIONAL (n)-[e:hasInterest]->(t)"
    forward = bindings_of(engine, f"CONSTRUCT (n) MATCH (n:Person) {located} {interest}")
    backward = bindings_of(engine, f"CONSTRUCT (n) MATCH (n:Person) {interest} {located}")
    assert forward == backward
    assert set(forward.values_of("n")) == set(backward.values_of("n"))
    assert len(set(forward.values_of("n"))) == 5
    assert any("t" in row for row in forward) and any("t" not in row for row in forward)
    assert any("c" in row for row in forward)


def test_where_with_unbound_property_is_not_true(toy_engine, toy_graph):
    rows = bindings_of(toy_engine, "CONSTRUCT (n) MATCH (n:Person) WHERE n.employer = 'Acme'", toy_graph)
    assert len(rows) == 0
    rows = bindings_of(toy_engine, "CONSTRUCT (n) MATCH (n:Person) WHERE NOT n.employer = 'Acme'", toy_graph)
    assert len(rows) == 4


def test_pattern_predicate_in_where(engine):
    rows = bindings_of(
        engine, "CONSTRUCT (n) MATCH (n:Person) WHERE (n)-[:hasInterest]->(:Tag {name='Wagner'})"
    )
    assert [n.value for n in rows.values_of("n")] == ["Celine", "Frank"]


def test_not_exists(engine):
    rows = bindings_of(
        engine,
        "CONSTRUCT (n) MATCH (n:Person) WHERE NOT EXISTS (CONSTRUCT () MATCH (n)-[:isLocatedIn]->())",
    )
    assert [n.value for n in rows.values_of("n")] == ["Alice"]


def test_shortest_walk_with_cost(toy_engine, toy_graph):
    rows = bindings_of(
        toy_engine,
        "CONSTRUCT (x) MATCH (x)-/p<(knows + ^knows)*> COST c/->(y) "
        "WHERE x.name = 'Peter Smith' AND y.name = 'John Doe'",
        toy_graph,
    )
    assert len(rows) == 1
    assert rows.rows[0]["c"] == 2


def test_k_shortest_walks(toy_engine, toy_graph):
    rows = bindings_of(
        toy_engine,
        "CONSTRUCT (x) MATCH (x)-/3 SHORTEST p<(knows + ^knows)*> COST c/->(y) "
        "WHERE x.name = 'Peter Smith' AND y.name = 'John Doe'",
        toy_graph,
    )
    assert sorted(r["c"] for r in rows) == [2, 2, 4]
    assert len({r["p"] for r in rows}) == 3


def test_label_on_computed_path_matches_nothing(toy_engine, toy_graph):
    assert len(bindings_of(toy_engine, "CONSTRUCT (x) MATCH (x)-/p:toWagner<:knows*>/->(y)", toy_graph)) == 0


def test_unreachable_target(toy_engine, toy_graph):
    rows = bindings_of(
        toy_engine,
        "CONSTRUCT (x) MATCH (x:Tag)-/p<:knows*>/->(y) WHERE y.name = 'Peter Smith'",
        toy_graph,
    )
    assert len(rows) == 0


def test_all_paths_projection(toy_engine, toy_graph):
    result = toy_engine.execute(
        "CONSTRUCT (n)-/p/->(m) MATCH (n)-/ALL p<:knows*>/->(m) "
        "WHERE n.name = 'John Doe' AND m.name = 'Peter Smith'",
        toy_graph,
    )
    assert result.graph.nodes == frozenset({node_id("102"), node_id("103"), node_id("105")})
    assert result.graph.edges == frozenset({edge_id("202"), edge_id("203"), edge_id("207")})
    assert result.graph.paths == frozenset()


def test_long_chain_search():
    builder = GraphBuilder()
    for i in range(1000):
        labels = ["Start"] if i == 0 else ["End"] if i == 999 else []
        builder.add_node(node_id(i), labels, {"i": [i]})
    for i in range(999):
        builder.add_edge(edge_id(f"e{i}"), node_id(i), node_id(i + 1), ["next"])
    graph = builder.build()

    rows = QueryEngine().execute(
        "CONSTRUCT (a) MATCH (a:Start)-/p<:next*> COST c/->(b:End)", graph
    ).bindings
    assert len(rows) == 1
    assert rows.rows[0]["c"] == 999


def test_stored_paths_are_untouched_by_construct_of_nodes(toy_engine, toy_graph):
    result = toy_engine.execute("CONSTRUCT (x) MATCH (x)-/@z/->(y)", toy_graph)
    assert result.graph.nodes == frozenset({node_id("105")})
    assert path_id("301") not in result.graph.paths
