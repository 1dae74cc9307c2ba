"""Static checks over parsed queries"""

import logging
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Set

from ..utils.errors import StaticAnalysisError
from . import ast
from .transformer import iter_nodes

logger = logging.getLogger(__name__)

NODE, EDGE, PATH, VALUE = "node", "edge", "path", "value"


class MatchScope:
    """Variables declared by a MATCH clause, classified by position"""

    def __init__(self) -> None:
        self.sorts: Dict[str, str] = {}
        self.all_paths: Set[str] = set()

    def declare(self, name: Optional[str], sort: str) -> None:
        if name is None:
            return
        known = self.sorts.get(name)
        if known is not None and known != sort:
            raise StaticAnalysisError(
                f"variable {name} is used both as {known} and as {sort}",
                rule="variable-sort",
            )
        self.sorts[name] = sort

    def __contains__(self, name: object) -> bool:
        return name in self.sorts


def chain_variables(chain: ast.Chain, scope: Optional[MatchScope] = None) -> Set[str]:
    """Declare and return the variables a pattern chain introduces"""
    scope = scope if scope is not None else MatchScope()
    names: Set[str] = set()
    for element in chain.elements:
        if isinstance(element, ast.NodePattern):
            scope.declare(element.variable, NODE)
        elif isinstance(element, ast.EdgePattern):
            scope.declare(element.variable, EDGE)
        else:
            scope.declare(element.variable, PATH)
            scope.declare(element.cost_variable, VALUE)
            if element.mode == "all" and element.variable:
                scope.all_paths.add(element.variable)
            if element.cost_variable:
                names.add(element.cost_variable)
        if element.variable:
            names.add(element.variable)
        for binding in getattr(element, "bindings", []):
            scope.declare(binding.variable, VALUE)
            names.add(binding.variable)
    return names


def referenced_variables(node: object) -> Set[str]:
    names: Set[str] = set()
    for sub in iter_nodes(node):
        if isinstance(sub, ast.VariableExpr):
            names.add(sub.name)
        elif isinstance(sub, (ast.PropertyExpr, ast.LabelTestExpr)):
            names.add(sub.variable)
    return names


def _has_aggregate(node: object) -> bool:
    """Aggregates directly in node, not counting nested subqueries"""
    if isinstance(node, ast.AggregateExpr):
        return True
    if isinstance(node, ast.ExistsExpr):
        return False
    if isinstance(node, ast.AstNode):
        return any(
            _has_aggregate(getattr(node, name))
            for name in type(node).model_fields
            if name != "pos"
        )
    if isinstance(node, list):
        return any(_has_aggregate(item) for item in node)
    return False


def _forbid_aggregates(expr: Optional[object], where: str) -> None:
    if expr is not None and _has_aggregate(expr):
        raise StaticAnalysisError(
            f"aggregate functions are only allowed in CONSTRUCT assignments, found in {where}",
            rule="aggregate-context",
        )


def _regex_views(regex: Optional[object]) -> Set[str]:
    return {n.name for n in iter_nodes(regex) if isinstance(n, ast.RegexView)}


class QueryAnalyzer:
    """Checks a query tree, recursing into subqueries with the visible path views"""

    def analyze(self, query: ast.Query, views: FrozenSet[str] = frozenset()) -> None:
        declared: Set[str] = set(views)
        graph_names: Set[str] = set()
        local_paths: Set[str] = set()
        for clause in query.head:
            if isinstance(clause, ast.PathClause):
                if clause.name in local_paths:
                    raise StaticAnalysisError(
                        f"path view {clause.name} is declared twice", rule="duplicate-view"
                    )
                self._check_path_clause(clause, frozenset(declared))
                local_paths.add(clause.name)
                declared.add(clause.name)
            else:
                if clause.name in graph_names:
                    raise StaticAnalysisError(
                        f"graph {clause.name} is declared twice", rule="duplicate-view"
                    )
                graph_names.add(clause.name)
                self._require_body(clause.query, allow_view=isinstance(clause, ast.GraphViewClause))
                self.analyze(clause.query, frozenset(declared))
        if query.body is not None:
            self._check_full_query(query.body, frozenset(declared))

    def _require_body(self, query: ast.Query, allow_view: bool = False) -> None:
        has_view = any(isinstance(h, ast.GraphViewClause) for h in query.head)
        if query.body is None and not (allow_view and has_view):
            raise StaticAnalysisError("nested query has no body", rule="missing-body")

    def _check_full_query(self, query: object, views: FrozenSet[str]) -> None:
        if isinstance(query, ast.SetOperation):
            self._check_full_query(query.left, views)
            self._check_full_query(query.right, views)
        elif isinstance(query, ast.BasicQuery):
            self._check_basic_query(query, views)

    # -- PATH clauses --------------------------------------------------------

    def _check_path_clause(self, clause: ast.PathClause, views: FrozenSet[str]) -> None:
        walk = walk_prefix(clause.chains)
        if not walk:
            raise StaticAnalysisError(
                f"PATH {clause.name} must start with a walk of edge or path patterns",
                rule="joinable-walk",
            )
        scope = MatchScope()
        for chain in clause.chains:
            chain_variables(chain, scope)
            self._check_chain(chain, views, scope)
        _forbid_aggregates(clause.where, f"PATH {clause.name} WHERE")
        _forbid_aggregates(clause.cost, f"PATH {clause.name} COST")
        for expr in (clause.where, clause.cost):
            self._check_subqueries(expr, views)
            self._check_all_usage(expr, scope)

    # -- basic queries -------------------------------------------------------

    def _check_basic_query(self, query: ast.BasicQuery, views: FrozenSet[str]) -> None:
        match = query.match
        scope = MatchScope()
        main_vars: Set[str] = set()
        for located in match.patterns:
            main_vars |= chain_variables(located.chain, scope)
            self._check_located(located, views, scope)
        block_vars: List[Set[str]] = []
        for block in match.optionals:
            names: Set[str] = set()
            for located in block.patterns:
                names |= chain_variables(located.chain, scope)
                self._check_located(located, views, scope)
            block_vars.append(names)
        for i, left in enumerate(block_vars):
            for right in block_vars[i + 1:]:
                leaked = (left & right) - main_vars
                if leaked:
                    raise StaticAnalysisError(
                        "variables shared by OPTIONAL blocks must appear in the main "
                        f"pattern: {', '.join(sorted(leaked))}",
                        rule="optional-shared-variables",
                    )

        _forbid_aggregates(match.where, "WHERE")
        self._check_subqueries(match.where, views)
        self._check_all_usage(match.where, scope)
        for block in match.optionals:
            _forbid_aggregates(block.where, "OPTIONAL WHERE")
            self._check_subqueries(block.where, views)
            self._check_all_usage(block.where, scope)

        self._check_construct(query.construct, scope, views)

    def _check_located(self, located: ast.LocatedPattern, views: FrozenSet[str], scope: MatchScope) -> None:
        self._check_chain(located.chain, views, scope)
        if located.location is not None and not isinstance(located.location, ast.GraphRef):
            self._check_full_query(located.location, views)

    def _check_chain(self, chain: ast.Chain, views: FrozenSet[str], scope: MatchScope) -> None:
        for element in chain.elements:
            if isinstance(element, ast.PathPattern):
                unknown = _regex_views(element.regex) - views
                if unknown:
                    raise StaticAnalysisError(
                        f"unknown path view {', '.join(sorted(unknown))}", rule="unknown-view"
                    )
                if element.mode == "all":
                    if element.stored:
                        raise StaticAnalysisError(
                            "ALL cannot be combined with stored paths", rule="all-path-usage"
                        )
                    if element.cost_variable:
                        raise StaticAnalysisError(
                            "ALL paths have no single cost", rule="all-path-usage"
                        )
                if element.stored and element.variable is None:
                    raise StaticAnalysisError(
                        "a stored path pattern needs a path variable", rule="stored-path-variable"
                    )
            for predicate in getattr(element, "predicates", []):
                _forbid_aggregates(predicate.value, "pattern property")
                self._check_subqueries(predicate.value, views)

    def _check_subqueries(self, expr: Optional[object], views: FrozenSet[str]) -> None:
        if expr is None:
            return
        for sub in iter_nodes(expr):
            if isinstance(sub, ast.ExistsExpr):
                self._require_body(sub.query)
                self.analyze(sub.query, views)

    def _check_all_usage(self, expr: Optional[object], scope: MatchScope) -> None:
        if expr is None or not scope.all_paths:
            return
        used = referenced_variables(expr) & scope.all_paths
        if used:
            raise StaticAnalysisError(
                "path variables bound by ALL may only be used in a path projection: "
                + ", ".join(sorted(used)),
                rule="all-path-usage",
            )

    # -- CONSTRUCT -------------------------------------------------------------

    def _check_construct(self, construct: ast.ConstructClause, scope: MatchScope, views: FrozenSet[str]) -> None:
        construct_sorts: Dict[str, str] = {}

        def declare(name: str, sort: str) -> None:
            known = construct_sorts.get(name) or scope.sorts.get(name)
            if known is not None and known != sort:
                raise StaticAnalysisError(
                    f"construct variable {name} is a {known} but is used as a {sort}",
                    rule="construct-sort",
                )
            construct_sorts[name] = sort

        for basic in construct.constructs:
            chains = [item for item in basic.items if isinstance(item, ast.ConstructChain)]
            own = {element.variable for chain in chains for element in chain.elements}
            for chain in chains:
                self._check_construct_chain(chain, declare, scope, views)
            for assignment in basic.assignments:
                if assignment.variable not in own:
                    raise StaticAnalysisError(
                        f"SET/REMOVE target {assignment.variable} is not a variable of its construct",
                        rule="assignment-target",
                    )
                value = getattr(assignment, "value", None)
                self._check_subqueries(value, views)
                self._check_all_usage(value, scope)
            self._check_subqueries(basic.when, views)
            self._check_all_usage(basic.when, scope)

    def _check_construct_chain(
        self,
        chain: ast.ConstructChain,
        declare: Callable[[str, str], None],
        scope: MatchScope,
        views: FrozenSet[str],
    ) -> None:
        elements = chain.elements
        for position, element in enumerate(elements):
            if isinstance(element, ast.NodeConstruct):
                declare(element.variable, NODE)
            elif isinstance(element, ast.EdgeConstruct):
                declare(element.variable, EDGE)
                if element.variable in scope:
                    ends = [elements[position - 1].variable, elements[position + 1].variable]
                    if any(end not in scope for end in ends):
                        raise StaticAnalysisError(
                            f"bound edge {element.variable} needs bound endpoints",
                            rule="bound-edge-endpoints",
                        )
            else:
                declare(element.variable, PATH)
                if element.variable not in scope:
                    raise StaticAnalysisError(
                        f"path {element.variable} must be bound by MATCH",
                        rule="path-construct-unbound",
                    )
                if element.stored and element.variable in scope.all_paths:
                    raise StaticAnalysisError(
                        f"path {element.variable} is bound by ALL and cannot be stored",
                        rule="all-path-usage",
                    )

            group = getattr(element, "group", [])
            if group and element.variable in scope:
                raise StaticAnalysisError(
                    f"bound variable {element.variable} cannot be grouped",
                    rule="bound-group",
                )
            for item_expr in group:
                name = item_expr.name if isinstance(item_expr, ast.VariableExpr) else item_expr.variable
                if name not in scope:
                    raise StaticAnalysisError(
                        f"GROUP refers to {name}, which MATCH does not bind",
                        rule="group-scope",
                    )
            if element.copy_of is not None and element.copy_of not in scope:
                raise StaticAnalysisError(
                    f"copy source {element.copy_of} is not bound by MATCH",
                    rule="copy-source",
                )
            for assignment in element.assignments:
                self._check_subqueries(assignment.value, views)
                self._check_all_usage(assignment.value, scope)
            self._check_all_usage(group, scope)


def walk_prefix(chains: Iterable[ast.Chain]) -> List[ast.Chain]:
    """Leading chains that form a joinable walk: each has a relationship and
    starts where the previous one ends"""
    walk: List[ast.Chain] = []
    for chain in chains:
        if len(chain.elements) < 3:
            break
        if walk and walk[-1].elements[-1].variable != chain.elements[0].variable:
            break
        walk.append(chain)
    return walk


def analyze_query(query: ast.Query) -> None:
    QueryAnalyzer().analyze(query)
    logger.debug("Static analysis passed")
