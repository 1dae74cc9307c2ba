"""Parse-tree to AST transformation and the parse entry point"""

import logging
from functools import lru_cache
from typing import Any, Iterator, List, Optional, Tuple

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, VisitError

from ..utils.errors import GCoreError, ParseError, StaticAnalysisError
from . import ast
from .grammar import build_parser

logger = logging.getLogger(__name__)

ANON_PREFIX = "_anon"
AGGREGATES = {"count", "min", "max", "sum", "avg", "collect"}


def _pos(meta: Any) -> Optional[ast.SourcePosition]:
    if meta is None or getattr(meta, "empty", True):
        return None
    return ast.SourcePosition(line=meta.line, column=meta.column)


def _unquote(token: str) -> str:
    body = token[1:-1]
    out: List[str] = []
    chars = iter(body)
    escapes = {"n": "\n", "t": "\t", "r": "\r"}
    for ch in chars:
        if ch == "\\":
            nxt = next(chars, "")
            out.append(escapes.get(nxt, nxt))
        else:
            out.append(ch)
    return "".join(out)


def _tagged(children: List[Any], tag: str) -> Optional[Any]:
    for child in children:
        if isinstance(child, tuple) and child and child[0] == tag:
            return child[1]
    return None


def _names(children: List[Any]) -> List[str]:
    return [str(c) for c in children if isinstance(c, Token) and c.type == "NAME"]


@v_args(meta=True)
class QueryTransformer(Transformer):
    """Builds ast models bottom-up from the Lark tree"""

    # -- queries -----------------------------------------------------------

    def query(self, meta, children):
        head = [c for c in children if isinstance(c, (ast.PathClause, ast.GraphClause, ast.GraphViewClause))]
        body = [c for c in children if isinstance(c, (ast.BasicQuery, ast.SetOperation, ast.GraphRef))]
        return ast.Query(head=head, body=body[0] if body else None, pos=_pos(meta))

    def path_clause(self, meta, children):
        name = str(children[0])
        chains = [c for c in children if isinstance(c, ast.Chain)]
        wheres = [c[1] for c in children if isinstance(c, tuple) and c[0] == "where"]
        costs = [c[1] for c in children if isinstance(c, tuple) and c[0] == "cost"]
        if len(wheres) > 1 or len(costs) > 1:
            raise ParseError(
                f"PATH {name} declares more than one WHERE or COST",
                meta.line, meta.column,
            )
        return ast.PathClause(
            name=name,
            chains=chains,
            where=wheres[0] if wheres else None,
            cost=costs[0] if costs else None,
            pos=_pos(meta),
        )

    def cost_clause(self, meta, children):
        return ("cost", children[0])

    def graph_clause(self, meta, children):
        return ast.GraphClause(name=str(children[0]), query=children[1], pos=_pos(meta))

    def graph_view_clause(self, meta, children):
        return ast.GraphViewClause(name=str(children[0]), query=children[1], pos=_pos(meta))

    def _set_operation(self, op, meta, children):
        return ast.SetOperation(op=op, left=children[0], right=children[1], pos=_pos(meta))

    def union_query(self, meta, children):
        return self._set_operation("UNION", meta, children)

    def intersect_query(self, meta, children):
        return self._set_operation("INTERSECT", meta, children)

    def minus_query(self, meta, children):
        return self._set_operation("MINUS", meta, children)

    def graph_ref(self, meta, children):
        return ast.GraphRef(name=str(children[0]), pos=_pos(meta))

    def basic_query(self, meta, children):
        return ast.BasicQuery(construct=children[0], match=children[1], pos=_pos(meta))

    # -- CONSTRUCT ---------------------------------------------------------

    def construct_clause(self, meta, children):
        return ast.ConstructClause(constructs=list(children), pos=_pos(meta))

    def _basic_construct(self, meta, children):
        items = [c for c in children if isinstance(c, (ast.GraphRef, ast.ConstructChain))]
        assignments: List[Any] = []
        for child in children:
            if isinstance(child, list):
                assignments.extend(child)
        return ast.BasicConstruct(
            items=items,
            assignments=assignments,
            when=_tagged(children, "when"),
            pos=_pos(meta),
        )

    def basic_construct(self, meta, children):
        return self._basic_construct(meta, children)

    def gated_construct(self, meta, children):
        return self._basic_construct(meta, children)

    def construct_chain(self, meta, children):
        return ast.ConstructChain(elements=children, pos=_pos(meta))

    def _construct_parts(self, children) -> dict:
        names = _names(children)
        return {
            "variable": names[0] if names else None,
            "copy_of": _tagged(children, "copy"),
            "group": _tagged(children, "group") or [],
            "labels": _tagged(children, "labels") or [],
            "assignments": _tagged(children, "assign") or [],
        }

    def c_node(self, meta, children):
        return ast.NodeConstruct(**self._construct_parts(children), pos=_pos(meta))

    def c_edge_filler(self, meta, children):
        return self._construct_parts(children)

    def c_edge_right(self, meta, children):
        return ast.EdgeConstruct(direction="right", **children[0], pos=_pos(meta))

    def c_edge_left(self, meta, children):
        return ast.EdgeConstruct(direction="left", **children[0], pos=_pos(meta))

    def c_path_filler(self, meta, children):
        parts = self._construct_parts(children)
        parts.pop("group")
        parts["stored"] = any(isinstance(c, Token) and c.type == "STORED" for c in children)
        return parts

    def c_path_right(self, meta, children):
        return ast.PathConstruct(direction="right", **children[0], pos=_pos(meta))

    def c_path_left(self, meta, children):
        return ast.PathConstruct(direction="left", **children[0], pos=_pos(meta))

    def copy_of(self, meta, children):
        return ("copy", str(children[0]))

    def group_by(self, meta, children):
        return ("group", list(children))

    def c_labels(self, meta, children):
        return ("labels", [str(c) for c in children])

    def c_props(self, meta, children):
        return ("assign", list(children))

    def c_prop(self, meta, children):
        return ast.PropertyAssignment(key=str(children[0]), value=children[1], pos=_pos(meta))

    def set_remove(self, meta, children):
        return list(children)

    def set_property(self, meta, children):
        return ast.SetProperty(
            variable=str(children[0]), key=str(children[1]), value=children[2], pos=_pos(meta)
        )

    def set_label(self, meta, children):
        return ast.SetLabel(variable=str(children[0]), label=str(children[1]), pos=_pos(meta))

    def remove_property(self, meta, children):
        return ast.RemoveProperty(variable=str(children[0]), key=str(children[1]), pos=_pos(meta))

    def remove_label(self, meta, children):
        return ast.RemoveLabel(variable=str(children[0]), label=str(children[1]), pos=_pos(meta))

    def when_clause(self, meta, children):
        return ("when", children[0])

    # -- MATCH -------------------------------------------------------------

    def match_clause(self, meta, children):
        return ast.MatchClause(
            patterns=children[0],
            where=_tagged(children, "where"),
            optionals=[c for c in children if isinstance(c, ast.OptionalBlock)],
            pos=_pos(meta),
        )

    def optional_block(self, meta, children):
        return ast.OptionalBlock(
            patterns=children[0], where=_tagged(children, "where"), pos=_pos(meta)
        )

    def located_list(self, meta, children):
        return list(children)

    def located(self, meta, children):
        location = children[1] if len(children) > 1 else None
        return ast.LocatedPattern(chain=children[0], location=location, pos=_pos(meta))

    def where_clause(self, meta, children):
        return ("where", children[0])

    def chain(self, meta, children):
        return ast.Chain(elements=children, pos=_pos(meta))

    def _pattern_parts(self, children) -> dict:
        names = _names(children)
        props = _tagged(children, "props") or []
        return {
            "variable": names[0] if names else None,
            "labels": _tagged(children, "labels") or [],
            "predicates": [p for p in props if isinstance(p, ast.PropertyPredicate)],
            "bindings": [p for p in props if isinstance(p, ast.PropertyBinding)],
        }

    def node(self, meta, children):
        return ast.NodePattern(**self._pattern_parts(children), pos=_pos(meta))

    def edge_filler(self, meta, children):
        return self._pattern_parts(children)

    def edge_right(self, meta, children):
        return ast.EdgePattern(direction="right", **children[0], pos=_pos(meta))

    def edge_left(self, meta, children):
        return ast.EdgePattern(direction="left", **children[0], pos=_pos(meta))

    def edge_any(self, meta, children):
        return ast.EdgePattern(direction="any", **children[0], pos=_pos(meta))

    def path_filler(self, meta, children):
        names = _names(children)
        mode = _tagged(children, "mode") or ("shortest", 1)
        return {
            "variable": names[0] if names else None,
            "stored": any(isinstance(c, Token) and c.type == "STORED" for c in children),
            "mode": mode[0],
            "k": mode[1],
            "labels": _tagged(children, "labels") or [],
            "regex": _tagged(children, "regex"),
            "cost_variable": _tagged(children, "cost"),
        }

    def path_right(self, meta, children):
        return ast.PathPattern(direction="right", **children[0], pos=_pos(meta))

    def path_left(self, meta, children):
        return ast.PathPattern(direction="left", **children[0], pos=_pos(meta))

    def shortest_mode(self, meta, children):
        k = int(children[0]) if children else 1
        if k < 1:
            raise ParseError("k SHORTEST requires k >= 1", meta.line, meta.column)
        return ("mode", ("shortest", k))

    def all_mode(self, meta, children):
        return ("mode", ("all", 1))

    def regex_spec(self, meta, children):
        return ("regex", children[0])

    def cost_var(self, meta, children):
        return ("cost", str(children[0]))

    def key(self, meta, children):
        """Keywords used as labels or keys come back as plain names, spelling kept"""
        token = children[0]
        return Token.new_borrow_pos("NAME", str(token), token)

    def labels(self, meta, children):
        return ("labels", list(children))

    def label_alternatives(self, meta, children):
        return [str(c) for c in children]

    def props(self, meta, children):
        return ("props", list(children))

    def prop(self, meta, children):
        key, value = str(children[0]), children[1]
        if isinstance(value, ast.VariableExpr):
            return ast.PropertyBinding(key=key, variable=value.name, pos=_pos(meta))
        return ast.PropertyPredicate(key=key, value=value, pos=_pos(meta))

    # -- regular expressions -----------------------------------------------

    def regex_alt(self, meta, children):
        options: List[Any] = []
        for child in children:
            options.extend(child.options if isinstance(child, ast.RegexAlternation) else [child])
        return ast.RegexAlternation(options=options, pos=_pos(meta))

    def regex_concat(self, meta, children):
        parts: List[Any] = []
        for child in children:
            parts.extend(child.parts if isinstance(child, ast.RegexConcatenation) else [child])
        return ast.RegexConcatenation(parts=parts, pos=_pos(meta))

    def regex_kleene(self, meta, children):
        return ast.RegexStar(inner=children[0], pos=_pos(meta))

    def regex_wildcard(self, meta, children):
        return ast.RegexWildcard(pos=_pos(meta))

    def regex_edge(self, meta, children):
        return ast.RegexEdge(label=str(children[0]), pos=_pos(meta))

    def regex_inverse(self, meta, children):
        return ast.RegexEdge(label=str(children[0]), inverse=True, pos=_pos(meta))

    def regex_node(self, meta, children):
        return ast.RegexNode(label=str(children[0]), pos=_pos(meta))

    def regex_view(self, meta, children):
        return ast.RegexView(name=str(children[0]), pos=_pos(meta))

    # -- expressions -------------------------------------------------------

    def _binary(self, op, meta, children):
        return ast.BinaryExpr(op=op, left=children[0], right=children[1], pos=_pos(meta))

    def or_op(self, meta, children):
        return self._binary("OR", meta, children)

    def and_op(self, meta, children):
        return self._binary("AND", meta, children)

    def not_op(self, meta, children):
        return ast.UnaryExpr(op="NOT", operand=children[0], pos=_pos(meta))

    def neg(self, meta, children):
        return ast.UnaryExpr(op="-", operand=children[0], pos=_pos(meta))

    def eq(self, meta, children):
        return self._binary("=", meta, children)

    def neq(self, meta, children):
        return self._binary("<>", meta, children)

    def lt(self, meta, children):
        return self._binary("<", meta, children)

    def le(self, meta, children):
        return self._binary("<=", meta, children)

    def gt(self, meta, children):
        return self._binary(">", meta, children)

    def ge(self, meta, children):
        return self._binary(">=", meta, children)

    def in_op(self, meta, children):
        return self._binary("IN", meta, children)

    def subset_op(self, meta, children):
        return self._binary("SUBSET OF", meta, children)

    def add(self, meta, children):
        return self._binary("+", meta, children)

    def sub(self, meta, children):
        return self._binary("-", meta, children)

    def mul(self, meta, children):
        return self._binary("*", meta, children)

    def div(self, meta, children):
        return self._binary("/", meta, children)

    def mod(self, meta, children):
        return self._binary("%", meta, children)

    def index(self, meta, children):
        return ast.IndexExpr(target=children[0], index=children[1], pos=_pos(meta))

    def variable(self, meta, children):
        return ast.VariableExpr(name=str(children[0]), pos=_pos(meta))

    def property(self, meta, children):
        return ast.PropertyExpr(variable=str(children[0]), key=str(children[1]), pos=_pos(meta))

    def label_test(self, meta, children):
        return ast.LabelTestExpr(variable=str(children[0]), labels=list(children[1:]), pos=_pos(meta))

    def arguments(self, meta, children):
        return list(children)

    def call(self, meta, children):
        name = str(children[0]).lower()
        distinct = any(isinstance(c, Token) and c.type == "DISTINCT" for c in children)
        args = next((c for c in children if isinstance(c, list)), [])
        if name in AGGREGATES:
            if len(args) != 1:
                raise ParseError(
                    f"{name.upper()} takes exactly one argument", meta.line, meta.column
                )
            return ast.AggregateExpr(
                function=name.upper(), argument=args[0], distinct=distinct, pos=_pos(meta)
            )
        if distinct:
            raise ParseError(f"DISTINCT is only valid in aggregates, not {name}", meta.line, meta.column)
        return ast.FunctionCallExpr(name=name, args=args, pos=_pos(meta))

    def count_star(self, meta, children):
        if str(children[0]).lower() != "count":
            raise ParseError("only COUNT accepts *", meta.line, meta.column)
        return ast.AggregateExpr(function="COUNT", pos=_pos(meta))

    def exists(self, meta, children):
        return ast.ExistsExpr(query=children[0], pos=_pos(meta))

    def pattern_predicate(self, meta, children):
        """(a)-[..]->(b) in a condition means EXISTS (CONSTRUCT () MATCH (a)-[..]->(b))"""
        chain = ast.Chain(elements=children, pos=_pos(meta))
        query = ast.Query(
            body=ast.BasicQuery(
                construct=ast.ConstructClause(
                    constructs=[
                        ast.BasicConstruct(items=[ast.ConstructChain(elements=[ast.NodeConstruct()])])
                    ]
                ),
                match=ast.MatchClause(patterns=[ast.LocatedPattern(chain=chain)]),
            )
        )
        return ast.ExistsExpr(query=query, pos=_pos(meta))

    def list_literal(self, meta, children):
        return ast.ListExpr(items=children[0] if children else [], pos=_pos(meta))

    def set_literal(self, meta, children):
        return ast.SetExpr(items=children[0] if children else [], pos=_pos(meta))

    def searched_case(self, meta, children):
        branches = [c for c in children if isinstance(c, ast.CaseBranch)]
        return ast.CaseExpr(branches=branches, default=_tagged(children, "else"), pos=_pos(meta))

    def simple_case(self, meta, children):
        subject = children[0]
        branches = [
            ast.CaseBranch(
                condition=ast.BinaryExpr(op="=", left=subject, right=b.condition),
                result=b.result,
                pos=b.pos,
            )
            for b in children[1:]
            if isinstance(b, ast.CaseBranch)
        ]
        return ast.CaseExpr(branches=branches, default=_tagged(children, "else"), pos=_pos(meta))

    def case_branch(self, meta, children):
        return ast.CaseBranch(condition=children[0], result=children[1], pos=_pos(meta))

    def case_else(self, meta, children):
        return ("else", children[0])

    def int_literal(self, meta, children):
        return ast.LiteralExpr(value=int(children[0]), pos=_pos(meta))

    def float_literal(self, meta, children):
        return ast.LiteralExpr(value=float(children[0]), pos=_pos(meta))

    def string_literal(self, meta, children):
        return ast.LiteralExpr(value=_unquote(str(children[0])), pos=_pos(meta))

    def true_literal(self, meta, children):
        return ast.LiteralExpr(value=True, pos=_pos(meta))

    def false_literal(self, meta, children):
        return ast.LiteralExpr(value=False, pos=_pos(meta))

    def null_literal(self, meta, children):
        return ast.LiteralExpr(value=None, pos=_pos(meta))


# ---------------------------------------------------------------------------
# Anonymous variables
# ---------------------------------------------------------------------------


def iter_nodes(node: Any) -> Iterator[ast.AstNode]:
    """Pre-order walk over every AST node in field declaration order"""
    if isinstance(node, ast.AstNode):
        yield node
        for name in type(node).model_fields:
            if name == "pos":
                continue
            yield from iter_nodes(getattr(node, name))
    elif isinstance(node, list):
        for item in node:
            yield from iter_nodes(item)


_NAMED_ELEMENTS = (ast.NodePattern, ast.EdgePattern, ast.NodeConstruct, ast.EdgeConstruct)


def name_anonymous(query: ast.Query) -> ast.Query:
    """Give unnamed node and edge elements fresh _anonN variables in tree order"""
    counter = 0
    for node in iter_nodes(query):
        if not isinstance(node, _NAMED_ELEMENTS + (ast.PathPattern, ast.PathConstruct)):
            continue
        if node.variable is not None and node.variable.startswith(ANON_PREFIX):
            raise StaticAnalysisError(
                f"variable names starting with {ANON_PREFIX} are reserved: {node.variable}",
                rule="reserved-variable",
            )
        if node.variable is None and isinstance(node, _NAMED_ELEMENTS):
            node.variable = f"{ANON_PREFIX}{counter}"
            counter += 1
    return query


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


@lru_cache(maxsize=1)
def _parser() -> Lark:
    return build_parser()


def _describe(error: UnexpectedInput) -> Tuple[str, int, int]:
    line = getattr(error, "line", 1) or 1
    column = getattr(error, "column", 1) or 1
    if isinstance(error, UnexpectedEOF):
        return "unexpected end of query", line, column
    if isinstance(error, UnexpectedCharacters):
        return f"unexpected character {error.char!r}", line, column
    token = getattr(error, "token", None)
    expected = sorted(getattr(error, "expected", None) or [])
    message = f"unexpected token {str(token)!r}" if token is not None else "syntax error"
    if expected:
        message += f"; expected one of {', '.join(expected[:8])}"
    return message, line, column


def parse_query(text: str, analyze: bool = True) -> ast.Query:
    """Parse query text into a named, statically checked AST"""
    try:
        tree = _parser().parse(text)
    except UnexpectedInput as e:
        message, line, column = _describe(e)
        raise ParseError(message, line, column) from e

    try:
        query = QueryTransformer().transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, GCoreError):
            raise e.orig_exc from e
        raise

    if not query.head and query.body is None:
        lines = text.splitlines() or [""]
        raise ParseError("expected CONSTRUCT/PATH/GRAPH", len(lines), len(lines[-1]) + 1)
    if query.body is None and not any(isinstance(h, ast.GraphViewClause) for h in query.head):
        lines = text.splitlines() or [""]
        raise ParseError("expected CONSTRUCT after head clauses", len(lines), len(lines[-1]) + 1)

    name_anonymous(query)
    if analyze:
        from .analysis import analyze_query

        analyze_query(query)
    logger.debug(f"Parsed query with {len(query.head)} head clauses")
    return query
