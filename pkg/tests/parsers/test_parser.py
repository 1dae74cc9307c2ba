"""Tests for parsing and rendering query text"""

import pytest

from gcore_engine.parsers import ast, parse_query, render_query
from gcore_engine.parsers.grammar import KEYWORDS
from gcore_engine.utils.errors import ParseError, StaticAnalysisError

GOLDEN = [
    "acme_employees",
    "all_paths",
    "company_aggregation",
    "explicit_exists",
    "houston_pairs",
    "local_people",
    "reachable_people",
    "social_graph1",
    "social_graph2",
    "wagner_friend",
    "works_at_equi_join",
    "works_at_in",
    "works_at_unrolled",
]


def first_chain(query):
    return query.body.match.patterns[0].chain


@pytest.mark.parametrize("name", GOLDEN)
def test_render_then_parse_is_stable(load_query, name):
    parsed = parse_query(load_query(name))
    assert parse_query(render_query(parsed)) == parsed


def test_anonymous_elements_are_named_in_order():
    query = parse_query("CONSTRUCT (n) MATCH (n)-[:knows]->()")
    elements = first_chain(query).elements
    assert [e.variable for e in elements] == ["n", "_anon0", "_anon1"]
    assert "_anon" not in render_query(query)


def test_label_alternatives_and_conjunctions():
    node = first_chain(parse_query("CONSTRUCT (n) MATCH (n:A|B:C)")).elements[0]
    assert node.labels == [["A", "B"], ["C"]]


def test_inline_properties_predicate_or_binding():
    node = first_chain(parse_query("CONSTRUCT (n) MATCH (n {employer=e, name='Acme'})")).elements[0]
    assert node.bindings == [ast.PropertyBinding(key="employer", variable="e")]
    assert node.predicates == [ast.PropertyPredicate(key="name", value=ast.LiteralExpr(value="Acme"))]


def test_path_pattern_parts():
    query = parse_query("CONSTRUCT (x) MATCH (x)-/3 SHORTEST p<(knows + ^knows)*> COST c/->(y)")
    path = first_chain(query).elements[1]
    assert (path.mode, path.k, path.variable, path.cost_variable, path.stored) == ("shortest", 3, "p", "c", False)
    assert path.regex == ast.RegexStar(
        inner=ast.RegexAlternation(
            options=[ast.RegexEdge(label="knows"), ast.RegexEdge(label="knows", inverse=True)]
        )
    )


def test_regex_concatenation_and_node_tests():
    query = parse_query("CONSTRUCT (x) MATCH (x)-/p<:a [:Hub] ~v _>/->(y) ", analyze=False)
    regex = first_chain(query).elements[1].regex
    assert regex == ast.RegexConcatenation(
        parts=[
            ast.RegexEdge(label="a"),
            ast.RegexNode(label="Hub"),
            ast.RegexView(name="v"),
            ast.RegexWildcard(),
        ]
    )


def test_boolean_precedence():
    where = parse_query(
        "CONSTRUCT (n) MATCH (n) WHERE n.a = 1 OR n.b = 2 AND NOT n.c = 3"
    ).body.match.where
    assert where.op == "OR"
    assert where.right.op == "AND"
    assert where.right.right == ast.UnaryExpr(
        op="NOT",
        operand=ast.BinaryExpr(op="=", left=ast.PropertyExpr(variable="n", key="c"), right=ast.LiteralExpr(value=3)),
    )


def test_arithmetic_precedence_and_literals():
    where = parse_query("CONSTRUCT (n) MATCH (n) WHERE n.a = 1 + 2 * 3.5").body.match.where
    assert where.right == ast.BinaryExpr(
        op="+",
        left=ast.LiteralExpr(value=1),
        right=ast.BinaryExpr(op="*", left=ast.LiteralExpr(value=2), right=ast.LiteralExpr(value=3.5)),
    )


def test_set_operations_associate_left():
    body = parse_query("g1 UNION g2 MINUS g3").body
    assert body.op == "MINUS"
    assert body.left.op == "UNION"
    assert body.right == ast.GraphRef(name="g3")


def test_pattern_predicate_becomes_exists():
    where = parse_query(
        "CONSTRUCT (n) MATCH (n) WHERE (n)-[:isLocatedIn]->()"
    ).body.match.where
    assert isinstance(where, ast.ExistsExpr)
    chain = first_chain(where.query)
    assert [type(e).__name__ for e in chain.elements] == ["NodePattern", "EdgePattern", "NodePattern"]


def test_construct_features():
    query = parse_query(
        "CONSTRUCT (x GROUP e :Company {name:=e})<-[y:worksAt]-(n), (m=n :Copy) "
        "SET n.k := 1, n:Seen REMOVE n.old WHEN n.k > 0 "
        "MATCH (n:Person {employer=e})"
    )
    (basic,) = query.body.construct.constructs
    group_node, edge, _ = basic.items[0].elements
    assert group_node.group == [ast.VariableExpr(name="e")]
    assert group_node.labels == ["Company"]
    assert edge.direction == "left"
    assert basic.items[1].elements[0].copy_of == "n"
    assert [type(a).__name__ for a in basic.assignments] == ["SetProperty", "SetLabel", "RemoveProperty"]
    assert basic.when.op == ">"


def test_each_basic_construct_owns_its_tail():
    query = parse_query(
        "CONSTRUCT (n) WHEN n.name = 'a', g, (m) SET m:Seen, (k) "
        "MATCH (n), (m), (k)"
    )
    first, second, last = query.body.construct.constructs
    assert first.when.op == "=" and first.assignments == []
    assert isinstance(second.items[0], ast.GraphRef)
    assert second.items[1].elements[0].variable == "m"
    assert second.when is None
    assert second.assignments == [ast.SetLabel(variable="m", label="Seen")]
    assert last.when is None and last.assignments == []
    assert [i.name for i in query.body.construct.all_items if isinstance(i, ast.GraphRef)] == ["g"]
    assert parse_query(render_query(query)) == query


def test_set_target_must_belong_to_its_construct():
    with pytest.raises(StaticAnalysisError) as info:
        parse_query("CONSTRUCT (n) WHEN n.x = 1, (m) SET n:Seen MATCH (n), (m)")
    assert info.value.rule == "assignment-target"


@pytest.mark.parametrize("word", sorted(KEYWORDS))
def test_keywords_are_valid_labels_and_keys(word):
    label = word.capitalize()
    text = (
        f"CONSTRUCT (x GROUP n.{word} :{label} {{{word} := 1}}), (n) SET n.{word} := 2 "
        f"MATCH (n:{label} {{{word.upper()} = 1}})-/<:{word}*>/->(m) "
        f"WHERE n.{word} = 1 AND m:{label}"
    )
    query = parse_query(text)
    (basic,) = query.body.construct.constructs
    group_node = basic.items[0].elements[0]
    assert group_node.group == [ast.PropertyExpr(variable="n", key=word)]
    assert group_node.labels == [label]
    assert group_node.assignments[0].key == word
    assert basic.assignments[0].key == word
    source, path, _ = first_chain(query).elements
    assert source.labels == [[label]]
    assert source.predicates[0].key == word.upper()
    assert path.regex == ast.RegexStar(inner=ast.RegexEdge(label=word))
    where = query.body.match.where
    assert where.left.left == ast.PropertyExpr(variable="n", key=word)
    assert where.right == ast.LabelTestExpr(variable="m", labels=[[label]])
    assert parse_query(render_query(query)) == query


def test_head_clauses():
    query = parse_query(
        "PATH wKnows = (x)-[e:knows]->(y) WHERE x <> y COST 2 "
        "GRAPH g AS (CONSTRUCT (n) MATCH (n)) "
        "CONSTRUCT (n) MATCH (n)-/<~wKnows*>/->(m) ON g"
    )
    path, graph = query.head
    assert path.name == "wKnows" and path.cost == ast.LiteralExpr(value=2)
    assert graph.name == "g"


def test_keywords_ignore_case_and_comments_are_skipped():
    text = "-- all nodes\nconstruct (n)\nmatch (n) -- trailing note\nwhere n.x = 'a'"
    assert parse_query(text) == parse_query("CONSTRUCT (n) MATCH (n) WHERE n.x = 'a'")


def test_quoted_strings_round_trip():
    query = parse_query("CONSTRUCT (n) MATCH (n) WHERE n.name = 'it\\'s'")
    assert query.body.match.where.right == ast.LiteralExpr(value="it's")
    assert parse_query(render_query(query)) == query


def test_syntax_error_position(load_query):
    with pytest.raises(ParseError) as info:
        parse_query(load_query("invalid_syntax"))
    assert info.value.line == 2
    assert info.value.column >= 1


@pytest.mark.parametrize(
    "text",
    [
        "",
        "-- nothing here",
        "CONSTRUCT (n) MATCH (n) WHERE n.name = 'open",
        "PATH p = (a)-[e]->(b)",
        "CONSTRUCT (n) MATCH (n)-/0 SHORTEST p/->(m)",
    ],
)
def test_rejected_texts(text):
    with pytest.raises(ParseError):
        parse_query(text)
