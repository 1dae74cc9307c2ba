"""Tests for compiling label expressions and checking walk conformance"""

import pytest

from gcore_engine.graph.model import edge_id, node_id
from gcore_engine.parsers import ast
from gcore_engine.parsers.transformer import parse_query
from gcore_engine.paths.regex import VIEW, compile_regex, conforms
from gcore_engine.utils.errors import UnknownPathError

KNOWS = ast.RegexEdge(label="knows")
KNOWN_BY = ast.RegexEdge(label="knows", inverse=True)


def body(*values):
    return [node_id(v) if i % 2 == 0 else edge_id(v) for i, v in enumerate(values)]


def test_stored_path_conforms_to_either_direction(toy_graph):
    automaton = compile_regex(ast.RegexStar(inner=ast.RegexAlternation(options=[KNOWS, KNOWN_BY])))
    assert conforms(toy_graph, toy_graph.body_of(sorted(toy_graph.paths)[0]), automaton)


def test_forward_only_rejects_inverse_step(toy_graph):
    automaton = compile_regex(ast.RegexStar(inner=KNOWS))
    assert not conforms(toy_graph, body("105", "207", "103", "202", "102"), automaton)
    assert conforms(toy_graph, body("102", "202", "103", "203", "105"), automaton)


def test_star_accepts_single_node_walk(toy_graph):
    assert conforms(toy_graph, body("105"), compile_regex(ast.RegexStar(inner=KNOWS)))
    assert not conforms(toy_graph, [], compile_regex(ast.RegexStar(inner=KNOWS)))
    assert not conforms(toy_graph, body("105"), compile_regex(KNOWS))


def test_missing_regex_means_any_walk(toy_graph):
    automaton = compile_regex(None)
    assert conforms(toy_graph, body("102", "201", "101"), automaton)
    assert conforms(toy_graph, body("101", "201", "102", "205", "106"), automaton)


def test_node_tests_do_not_consume_edges(toy_graph):
    manager_then_knows = compile_regex(
        ast.RegexConcatenation(parts=[ast.RegexNode(label="Manager"), KNOWS])
    )
    assert conforms(toy_graph, body("102", "202", "103"), manager_then_knows)
    assert not conforms(toy_graph, body("104", "204", "103"), manager_then_knows)


def test_edge_must_join_the_neighbouring_nodes(toy_graph):
    automaton = compile_regex(ast.RegexStar(inner=ast.RegexWildcard()))
    assert not conforms(toy_graph, body("102", "203", "105"), automaton)
    assert not conforms(toy_graph, body("102", "999", "105"), automaton)


def test_views_are_checked_against_known_names():
    automaton = compile_regex(ast.RegexView(name="wKnows"), known_views=["wKnows"])
    assert automaton.views() == {"wKnows"}
    assert any(t.kind == VIEW for moves in automaton.transitions.values() for t in moves)
    with pytest.raises(UnknownPathError):
        compile_regex(ast.RegexView(name="missing"), known_views=[])


def test_view_symbols_never_match_stored_bodies(toy_graph):
    automaton = compile_regex(ast.RegexView(name="wKnows"))
    assert not conforms(toy_graph, body("102", "202", "103"), automaton)


def test_node_test_then_any_walk(toy_graph):
    query = parse_query("CONSTRUCT (x) MATCH (x)-/p<[:Manager] _*>/->(y)")
    regex = query.body.match.patterns[0].chain.elements[1].regex
    assert regex == ast.RegexConcatenation(
        parts=[ast.RegexNode(label="Manager"), ast.RegexStar(inner=ast.RegexWildcard())]
    )
    automaton = compile_regex(regex)
    assert conforms(toy_graph, body("102"), automaton)
    assert conforms(toy_graph, body("102", "201", "101"), automaton)
    assert not conforms(toy_graph, body("101"), automaton)
    assert not conforms(toy_graph, body("101", "201", "102"), automaton)
