"""Tests for shortest, k-shortest and all-paths search"""

import random

import pytest

from gcore_engine.graph.model import GraphBuilder, edge_id, node_id
from gcore_engine.parsers import ast
from gcore_engine.paths.regex import compile_regex, conforms
from gcore_engine.paths.search import (
    PathViewRelation,
    Segment,
    all_paths_projection,
    k_shortest_paths,
    search_from,
    shortest_path,
)
from gcore_engine.utils.errors import UnknownPathError

KNOWS = ast.RegexEdge(label="knows")
EITHER = ast.RegexStar(inner=ast.RegexAlternation(options=[KNOWS, ast.RegexEdge(label="knows", inverse=True)]))

ORACLE_EXPRESSIONS = [
    ast.RegexStar(inner=ast.RegexConcatenation(parts=[ast.RegexEdge(label="a"), ast.RegexEdge(label="b")])),
    ast.RegexConcatenation(
        parts=[
            ast.RegexStar(inner=ast.RegexAlternation(options=[ast.RegexEdge(label="a"), ast.RegexEdge(label="b", inverse=True)])),
            ast.RegexEdge(label="b"),
        ]
    ),
    ast.RegexConcatenation(parts=[ast.RegexWildcard(), ast.RegexNode(label="X"), ast.RegexEdge(label="a")]),
]


def random_graph(rng: random.Random):
    builder = GraphBuilder()
    for i in range(4):
        builder.add_node(node_id(i), ["X"] if rng.random() < 0.5 else [])
    for i in range(6):
        builder.add_edge(edge_id(i), node_id(rng.randrange(4)), node_id(rng.randrange(4)), [rng.choice("ab")])
    return builder.build()


def walks(graph, source, length):
    """Every walk of exactly length edges from source, in either direction"""
    frontier = [(source,)]
    for _ in range(length):
        frontier = [
            body + (edge, nxt)
            for body in frontier
            for edge, nxt in graph.outgoing.get(body[-1], []) + graph.incoming.get(body[-1], [])
        ]
    return frontier


def test_shortest_walk_in_either_direction(toy_graph):
    walk = shortest_path(toy_graph, compile_regex(EITHER), node_id("105"), node_id("102"))
    assert walk.cost == 2
    assert list(walk.body) == [node_id("105"), edge_id("207"), node_id("103"), edge_id("202"), node_id("102")]
    assert walk.nodes == [node_id("105"), node_id("103"), node_id("102")]
    assert walk.edges == [edge_id("207"), edge_id("202")]


def test_k_shortest_walks_are_distinct_and_ordered(toy_graph):
    found = k_shortest_paths(toy_graph, compile_regex(EITHER), node_id("105"), node_id("102"), 3)
    assert [w.cost for w in found] == [2, 2, 4]
    assert len({w.body for w in found}) == 3
    assert found[1].edges == [edge_id("203"), edge_id("202")]


def test_k_must_be_positive(toy_graph):
    with pytest.raises(ValueError):
        k_shortest_paths(toy_graph, compile_regex(EITHER), node_id("105"), node_id("102"), 0)


def test_single_source_costs(toy_graph):
    found = search_from(toy_graph, compile_regex(ast.RegexStar(inner=KNOWS)), node_id("102"))
    assert {n.value: ws[0].cost for n, ws in found.items()} == {"102": 0, "103": 1, "105": 2}


def test_unreachable_and_unknown_sources(toy_graph):
    automaton = compile_regex(ast.RegexStar(inner=KNOWS))
    assert shortest_path(toy_graph, automaton, node_id("101"), node_id("105")) is None
    assert search_from(toy_graph, automaton, node_id("nope")) == {}


def test_view_segments_are_spliced_into_the_body(toy_graph):
    body = (node_id("102"), edge_id("202"), node_id("103"), edge_id("203"), node_id("105"))
    relation = PathViewRelation("hop2", [Segment(node_id("102"), node_id("105"), node_id("seg"), body, 5)])
    automaton = compile_regex(ast.RegexView(name="hop2"))
    walk = shortest_path(toy_graph, automaton, node_id("102"), node_id("105"), {"hop2": relation})
    assert walk.cost == 5
    assert walk.body == body
    with pytest.raises(UnknownPathError):
        shortest_path(toy_graph, automaton, node_id("102"), node_id("105"))


def test_all_paths_projection(toy_graph):
    projection = all_paths_projection(
        toy_graph, compile_regex(ast.RegexStar(inner=KNOWS)), node_id("102"), node_id("105")
    )
    assert projection.nodes == frozenset({node_id("102"), node_id("103"), node_id("105")})
    assert projection.edges == frozenset({edge_id("202"), edge_id("203"), edge_id("207")})
    assert projection.labels_of(node_id("102")) == frozenset({"Manager", "Person"})


def test_all_paths_projection_of_unreachable_target_is_empty(toy_graph):
    projection = all_paths_projection(
        toy_graph, compile_regex(ast.RegexStar(inner=KNOWS)), node_id("105"), node_id("104")
    )
    assert projection.is_empty()


@pytest.mark.parametrize("seed", range(20))
@pytest.mark.parametrize("expression", range(len(ORACLE_EXPRESSIONS)))
def test_shortest_walk_matches_enumeration(seed, expression):
    rng = random.Random(seed)
    graph = random_graph(rng)
    automaton = compile_regex(ORACLE_EXPRESSIONS[expression])
    source, target = node_id(rng.randrange(4)), node_id(rng.randrange(4))
    limit = 5

    conforming = [
        length
        for length in range(limit + 1)
        for body in walks(graph, source, length)
        if body[-1] == target and conforms(graph, body, automaton)
    ]
    walk = shortest_path(graph, automaton, source, target)
    if walk is None:
        assert conforming == []
    else:
        assert conforms(graph, walk.body, automaton)
        assert walk.body[0] == source and walk.body[-1] == target
        if walk.cost <= limit:
            assert min(conforming) == walk.cost
        else:
            assert conforming == []
