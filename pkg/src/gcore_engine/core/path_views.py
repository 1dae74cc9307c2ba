"""PATH clauses: binary relations of cheapest walk segments"""

import logging
from typing import Any, Dict, List, Tuple

from ..graph.model import Identifier, PathPropertyGraph, path_id
from ..parsers import ast
from ..parsers.analysis import walk_prefix
from ..parsers.transformer import ANON_PREFIX
from ..paths.search import PathViewRelation, Segment
from ..utils.errors import EvaluationError, PathCostError
from .bindings import Binding
from .values import UNBOUND, is_number, singleton, value_key

logger = logging.getLogger(__name__)


def _name_walk_paths(clause: ast.PathClause) -> Tuple[ast.PathClause, List[ast.Chain]]:
    """Copy of the clause whose walk path patterns all carry a variable"""
    clause = clause.model_copy(deep=True)
    walk = walk_prefix(clause.chains)
    counter = 0
    for chain in walk:
        for element in chain.elements:
            if isinstance(element, ast.PathPattern) and element.variable is None:
                element.variable = f"{ANON_PREFIX}_walk{counter}"
                counter += 1
    return clause, walk


def _walk_body(
    ctx: Any, walk: List[ast.Chain], row: Binding, graph: PathPropertyGraph
) -> Tuple[Identifier, ...]:
    body: List[Identifier] = [row[walk[0].elements[0].variable]]
    for chain in walk:
        elements = chain.elements
        for index in range(1, len(elements), 2):
            element = elements[index]
            following = row[elements[index + 1].variable]
            if isinstance(element, ast.EdgePattern):
                body.extend([row[element.variable], following])
                continue
            if element.mode == "all":
                raise EvaluationError("ALL path patterns cannot be part of a PATH walk")
            steps = ctx.path_body(row[element.variable], graph)
            if element.direction == "left":
                steps = tuple(reversed(steps))
            body.extend(steps[1:])
    return tuple(body)


def _segment_cost(ctx: Any, clause: ast.PathClause, row: Binding, graph: PathPropertyGraph) -> float:
    if clause.cost is None:
        return 1
    from .expressions import ExpressionEvaluator

    value = singleton(ExpressionEvaluator(ctx).evaluate(clause.cost, row, graph), "COST")
    if value is UNBOUND or not is_number(value) or value <= 0:
        raise PathCostError(
            f"PATH {clause.name}: segment cost must be a number larger than zero, got {value!r}"
        )
    return value


def evaluate_path_view(ctx: Any, clause: ast.PathClause, graph: PathPropertyGraph) -> PathViewRelation:
    """Cheapest segment per (source, target) pair matching the walk, the
    auxiliary patterns and WHERE"""
    from .matcher import PatternMatcher

    named, walk = _name_walk_paths(clause)
    local = ctx.derive(graph=graph, depth=ctx.depth + 1)
    rows = PatternMatcher(local).evaluate_chains(named.chains, graph, named.where)

    best: Dict[Tuple[Identifier, Identifier], Tuple[Tuple[Any, ...], Tuple[Identifier, ...], float]] = {}
    for row in rows:
        body = _walk_body(local, walk, row, graph)
        cost = _segment_cost(local, named, row, graph)
        rank = (cost, tuple(value_key(x) for x in body[1:]))
        ends = (body[0], body[-1])
        if ends not in best or rank < best[ends][0]:
            best[ends] = (rank, body, cost)

    segments = [
        Segment(
            source=source,
            target=target,
            ident=path_id(f"{clause.name}:{source.value}->{target.value}"),
            body=body,
            cost=cost,
        )
        for (source, target), (_, body, cost) in sorted(best.items())
    ]
    logger.debug(f"PATH {clause.name}: {len(rows)} matches, {len(segments)} segments")
    return PathViewRelation(clause.name, segments)
