"""MATCH evaluation: basic patterns, locations, WHERE and OPTIONAL blocks

Patterns are evaluated atom by atom into an accumulator seeded with the outer
bindings. Each atom is restricted by the values its variables already have in
the accumulator, so chains are expanded along adjacency indexes instead of
materializing every edge of the graph.
"""

import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from ..graph.model import GraphBuilder, IdKind, Identifier, PathPropertyGraph
from ..parsers import ast
from ..parsers.analysis import MatchScope, chain_variables, referenced_variables
from ..parsers.transformer import iter_nodes
from ..paths.regex import compile_regex, conforms
from ..paths.search import all_paths_projections, search_from, shortest_path
from .bindings import Binding, BindingSet, join, left_outer_join
from .context import EvalContext
from .expressions import ExpressionEvaluator
from .values import compare, sorted_values, truthy

logger = logging.getLogger(__name__)

Row = Dict[str, Any]


@dataclass
class MatchResult:
    """Bindings of a MATCH clause together with the graph they refer to"""

    bindings: BindingSet
    graph: PathPropertyGraph
    variables: Set[str] = field(default_factory=set)


def split_conjuncts(expr: Optional[Any]) -> List[Any]:
    if expr is None:
        return []
    if isinstance(expr, ast.BinaryExpr) and expr.op == "AND":
        return split_conjuncts(expr.left) + split_conjuncts(expr.right)
    return [expr]


def _has_subquery(expr: Any) -> bool:
    return any(isinstance(node, ast.ExistsExpr) for node in iter_nodes(expr))


def _labels_match(graph: PathPropertyGraph, ident: Identifier, labels: List[List[str]]) -> bool:
    """Conjunction of label disjunctions"""
    present = graph.labels_of(ident)
    return all(any(label in present for label in options) for options in labels)


def merge_graphs(graphs: Iterable[PathPropertyGraph]) -> PathPropertyGraph:
    unique: Dict[int, PathPropertyGraph] = {}
    for graph in graphs:
        unique.setdefault(id(graph), graph)
    if len(unique) == 1:
        return next(iter(unique.values()))
    builder = GraphBuilder()
    for graph in unique.values():
        builder.merge(graph)
    return builder.build(check=False)


class PatternMatcher:
    """Evaluates MATCH clauses in one evaluation context"""

    def __init__(self, ctx: EvalContext):
        self.ctx = ctx
        self.expressions = ExpressionEvaluator(ctx)
        self._locations: Dict[str, PathPropertyGraph] = {}

    # -- entry points ----------------------------------------------------------

    def evaluate_match(self, match: ast.MatchClause) -> MatchResult:
        graphs = self._locate(match.patterns)
        optional_graphs = [self._locate(block.patterns) for block in match.optionals]
        scope_graph = merge_graphs(graphs + [g for gs in optional_graphs for g in gs])

        scope = MatchScope()
        declared: Set[str] = set()
        for located in match.patterns:
            declared |= chain_variables(located.chain, scope)

        omega = self._evaluate_patterns(
            [p.chain for p in match.patterns], graphs, match.where, self.ctx.outer, scope_graph
        )
        logger.debug(f"MATCH main pattern: {len(omega)} bindings")

        for block, block_graphs in zip(match.optionals, optional_graphs):
            block_vars: Set[str] = set()
            for located in block.patterns:
                block_vars |= chain_variables(located.chain, scope)
            extended = self._evaluate_patterns(
                [p.chain for p in block.patterns], block_graphs, block.where, omega, scope_graph
            )
            omega = left_outer_join(omega, extended)
            declared |= block_vars
            logger.debug(f"OPTIONAL block: {len(extended)} matches, {len(omega)} bindings")

        result = omega.project(declared)
        if self.ctx.depth == 0:
            self.ctx.trace.append(result)
        return MatchResult(result, scope_graph, declared)

    def evaluate_chains(
        self,
        chains: Sequence[ast.Chain],
        graph: PathPropertyGraph,
        where: Optional[Any] = None,
    ) -> BindingSet:
        """All chains on one graph, unprojected (used by PATH clauses)"""
        return self._evaluate_patterns(list(chains), [graph] * len(chains), where, BindingSet.unit(), graph)

    # -- locations -------------------------------------------------------------

    def _locate(self, patterns: Sequence[ast.LocatedPattern]) -> List[PathPropertyGraph]:
        """An unlocated pattern lives where the nearest following located one does"""
        graphs: List[Optional[PathPropertyGraph]] = [None] * len(patterns)
        current: Optional[PathPropertyGraph] = None
        for index in range(len(patterns) - 1, -1, -1):
            location = patterns[index].location
            if location is not None:
                current = self._resolve_location(location)
            graphs[index] = current
        default: Optional[PathPropertyGraph] = None
        resolved: List[PathPropertyGraph] = []
        for graph in graphs:
            if graph is None:
                if default is None:
                    default = self.ctx.current_graph()
                graph = default
            resolved.append(graph)
        return resolved

    def _resolve_location(self, location: Any) -> PathPropertyGraph:
        if isinstance(location, ast.GraphRef):
            if location.name not in self._locations:
                self._locations[location.name] = self.ctx.resolve_graph(location.name)
            return self._locations[location.name]
        from .engine import evaluate_full_query

        return evaluate_full_query(location, self.ctx.nested(outer=BindingSet.unit()))

    # -- pattern evaluation ----------------------------------------------------

    def _evaluate_patterns(
        self,
        chains: List[ast.Chain],
        graphs: List[PathPropertyGraph],
        where: Optional[Any],
        seed: BindingSet,
        scope_graph: PathPropertyGraph,
    ) -> BindingSet:
        pattern_vars: Set[str] = set()
        for chain in chains:
            pattern_vars |= chain_variables(chain)

        pending: List[Tuple[Any, Set[str]]] = []
        deferred: List[Any] = []
        for conjunct in split_conjuncts(where) + self._inline_conditions(chains):
            if _has_subquery(conjunct):
                deferred.append(conjunct)
            else:
                pending.append((conjunct, referenced_variables(conjunct) & pattern_vars))

        acc = seed
        bound: Set[str] = set()

        def apply_ready() -> None:
            nonlocal acc, pending
            ready = [c for c, needs in pending if needs <= bound]
            pending = [(c, needs) for c, needs in pending if not needs <= bound]
            for conjunct in ready:
                acc = acc.select(lambda row: self.expressions.holds(conjunct, row, scope_graph))

        apply_ready()
        for chain, graph in zip(chains, graphs):
            elements = chain.elements
            for index, element in enumerate(elements):
                if not acc.rows:
                    break
                if isinstance(element, ast.NodePattern):
                    standalone = len(elements) == 1
                    if not (standalone or element.labels or element.predicates or element.bindings):
                        continue
                    acc = join(acc, self._node_atom(element, graph, acc))
                    bound.add(element.variable)
                    bound.update(b.variable for b in element.bindings)
                else:
                    left, right = elements[index - 1].variable, elements[index + 1].variable
                    if isinstance(element, ast.EdgePattern):
                        atom = self._edge_atom(element, left, right, graph, acc)
                    else:
                        atom = self._path_atom(element, left, right, graph, acc)
                    acc = join(acc, atom)
                    bound |= self._relationship_vars(element, elements, index)
                apply_ready()

        for conjunct in [c for c, _ in pending] + deferred:
            acc = acc.select(lambda row: self.expressions.holds(conjunct, row, scope_graph))
        return acc

    @staticmethod
    def _relationship_vars(element: Any, elements: List[Any], index: int) -> Set[str]:
        names = {elements[index - 1].variable, elements[index + 1].variable, element.variable}
        names |= {b.variable for b in getattr(element, "bindings", [])}
        if isinstance(element, ast.PathPattern) and element.cost_variable:
            names.add(element.cost_variable)
        names.discard(None)
        return names

    def _inline_conditions(self, chains: List[ast.Chain]) -> List[Any]:
        """{k = expr} with variables in expr becomes a WHERE equality"""
        conditions: List[Any] = []
        for chain in chains:
            for element in chain.elements:
                for predicate in getattr(element, "predicates", []):
                    if referenced_variables(predicate.value):
                        conditions.append(
                            ast.BinaryExpr(
                                op="=",
                                left=ast.PropertyExpr(variable=element.variable, key=predicate.key),
                                right=predicate.value,
                            )
                        )
        return conditions

    # -- atoms -----------------------------------------------------------------

    @staticmethod
    def _candidates(acc: BindingSet, name: Optional[str]) -> Optional[Set[Any]]:
        if name is None or name not in acc.always_bound() or name not in acc.variables:
            return None
        return set(acc.values_of(name))

    def _constant_predicates_hold(
        self, graph: PathPropertyGraph, ident: Identifier, predicates: List[ast.PropertyPredicate]
    ) -> bool:
        for predicate in predicates:
            if referenced_variables(predicate.value):
                continue
            expected = self.expressions.evaluate(predicate.value, Binding(), graph)
            if not truthy(compare("=", graph.values_of(ident, predicate.key), expected)):
                return False
        return True

    @staticmethod
    def _unroll(
        graph: PathPropertyGraph, ident: Identifier, bindings: List[ast.PropertyBinding], base: Row
    ) -> List[Row]:
        """{k = var} binds var to every value of k; no values means no row"""
        if not bindings:
            return [base]
        choices = [
            [(b.variable, v) for v in sorted_values(graph.values_of(ident, b.key))]
            for b in bindings
        ]
        rows: List[Row] = []
        for combination in product(*choices):
            row = dict(base)
            consistent = True
            for name, value in combination:
                if name in row and row[name] != value:
                    consistent = False
                    break
                row[name] = value
            if consistent:
                rows.append(row)
        return rows

    def _node_atom(self, pattern: ast.NodePattern, graph: PathPropertyGraph, acc: BindingSet) -> BindingSet:
        var = pattern.variable
        candidates = self._candidates(acc, var)
        pool = (
            sorted(c for c in candidates if isinstance(c, Identifier) and c in graph.nodes)
            if candidates is not None
            else graph.sorted_nodes
        )
        rows: List[Row] = []
        for node in pool:
            if not _labels_match(graph, node, pattern.labels):
                continue
            if not self._constant_predicates_hold(graph, node, pattern.predicates):
                continue
            rows.extend(self._unroll(graph, node, pattern.bindings, {var: node}))
        return BindingSet(rows, [var])

    def _edge_atom(
        self,
        pattern: ast.EdgePattern,
        left: str,
        right: str,
        graph: PathPropertyGraph,
        acc: BindingSet,
    ) -> BindingSet:
        orientations: List[Tuple[str, str]] = []
        if pattern.direction in ("right", "any"):
            orientations.append((left, right))
        if pattern.direction in ("left", "any"):
            orientations.append((right, left))

        edge_candidates = self._candidates(acc, pattern.variable)
        rows: List[Row] = []
        for source_var, target_var in orientations:
            sources = self._candidates(acc, source_var)
            targets = self._candidates(acc, target_var)
            for edge, source, target in self._edge_pool(graph, edge_candidates, sources, targets):
                if sources is not None and source not in sources:
                    continue
                if targets is not None and target not in targets:
                    continue
                if source_var == target_var and source != target:
                    continue
                if not _labels_match(graph, edge, pattern.labels):
                    continue
                if not self._constant_predicates_hold(graph, edge, pattern.predicates):
                    continue
                base = {pattern.variable: edge, source_var: source, target_var: target}
                rows.extend(self._unroll(graph, edge, pattern.bindings, base))
        return BindingSet(rows, [pattern.variable, left, right])

    @staticmethod
    def _edge_pool(
        graph: PathPropertyGraph,
        edges: Optional[Set[Any]],
        sources: Optional[Set[Any]],
        targets: Optional[Set[Any]],
    ) -> List[Tuple[Identifier, Identifier, Identifier]]:
        if edges is not None:
            chosen = sorted(e for e in edges if isinstance(e, Identifier) and e in graph.edges)
            return [(e, *graph.endpoints[e]) for e in chosen]
        if sources is not None:
            return [
                (edge, source, target)
                for source in sorted(s for s in sources if isinstance(s, Identifier))
                for edge, target in graph.outgoing.get(source, [])
            ]
        if targets is not None:
            return [
                (edge, source, target)
                for target in sorted(t for t in targets if isinstance(t, Identifier))
                for edge, source in graph.incoming.get(target, [])
            ]
        return [(e, *graph.endpoints[e]) for e in graph.sorted_edges]

    def _path_atom(
        self,
        pattern: ast.PathPattern,
        left: str,
        right: str,
        graph: PathPropertyGraph,
        acc: BindingSet,
    ) -> BindingSet:
        source_var, target_var = (left, right) if pattern.direction == "right" else (right, left)
        variables = [v for v in (pattern.variable, pattern.cost_variable, left, right) if v]
        if pattern.stored:
            rows = self._stored_paths(pattern, source_var, target_var, graph, acc)
        elif pattern.labels:
            logger.debug("Label test on a computed path pattern matches nothing")
            rows = []
        else:
            rows = self._computed_paths(pattern, source_var, target_var, graph, acc)
        return BindingSet(rows, variables)

    def _automaton(self, pattern: ast.PathPattern):
        return compile_regex(pattern.regex, known_views=self.ctx.path_views.keys())

    def _stored_paths(
        self,
        pattern: ast.PathPattern,
        source_var: str,
        target_var: str,
        graph: PathPropertyGraph,
        acc: BindingSet,
    ) -> List[Row]:
        path_candidates = self._candidates(acc, pattern.variable)
        sources = self._candidates(acc, source_var)
        targets = self._candidates(acc, target_var)
        automaton = self._automaton(pattern) if pattern.regex is not None else None
        views = self.ctx.views_for(graph)
        pool = graph.sorted_paths
        if path_candidates is not None:
            pool = sorted(p for p in path_candidates if isinstance(p, Identifier) and p in graph.paths)

        rows: List[Row] = []
        for path in pool:
            body = graph.bodies[path]
            source, target = body[0], body[-1]
            if sources is not None and source not in sources:
                continue
            if targets is not None and target not in targets:
                continue
            if source_var == target_var and source != target:
                continue
            if not _labels_match(graph, path, pattern.labels):
                continue
            hops = len(body) // 2
            if automaton is not None:
                if not conforms(graph, body, automaton):
                    continue
                best = shortest_path(graph, automaton, source, target, views)
                if best is None or best.cost != hops:
                    continue
            row: Row = {pattern.variable: path, source_var: source, target_var: target}
            if pattern.cost_variable:
                row[pattern.cost_variable] = hops
            rows.append(row)
        return rows

    def _computed_paths(
        self,
        pattern: ast.PathPattern,
        source_var: str,
        target_var: str,
        graph: PathPropertyGraph,
        acc: BindingSet,
    ) -> List[Row]:
        automaton = self._automaton(pattern)
        views = self.ctx.views_for(graph)
        sources = self._candidates(acc, source_var)
        targets = self._candidates(acc, target_var)
        pool = (
            sorted(s for s in sources if isinstance(s, Identifier) and s in graph.nodes)
            if sources is not None
            else graph.sorted_nodes
        )
        rows: List[Row] = []
        for source in pool:
            wanted: Optional[Set[Any]] = set(targets) if targets is not None else None
            if source_var == target_var:
                wanted = {source} if wanted is None or source in wanted else set()
            if wanted is not None and not wanted:
                continue

            if pattern.mode == "all":
                for target, projection in all_paths_projections(graph, automaton, source, views).items():
                    if wanted is not None and target not in wanted:
                        continue
                    row: Row = {source_var: source, target_var: target}
                    if pattern.variable:
                        shape = pattern.regex.model_dump_json() if pattern.regex is not None else "_*"
                        ident = self.ctx.skolem.new(IdKind.PATH, "all", source, target, shape)
                        self.ctx.projections[ident] = projection
                        row[pattern.variable] = ident
                    rows.append(row)
                continue

            found = search_from(
                graph,
                automaton,
                source,
                k=pattern.k,
                views=views,
                targets=wanted,
                max_hops=self.ctx.settings.k_shortest_cap,
            )
            for target in sorted(found):
                for walk in found[target]:
                    row = {source_var: source, target_var: target}
                    if pattern.variable:
                        row[pattern.variable] = self.ctx.register_walk(walk.body, walk.cost)
                    if pattern.cost_variable:
                        row[pattern.cost_variable] = walk.cost
                    rows.append(row)
                    if not pattern.variable and not pattern.cost_variable:
                        break
        logger.debug(f"Path pattern from {len(pool)} sources: {len(rows)} bindings")
        return rows


def evaluate_match(match: ast.MatchClause, ctx: EvalContext) -> MatchResult:
    return PatternMatcher(ctx).evaluate_match(match)
