"""Query evaluation engine for G-CORE"""

import logging
import time
from typing import Any, Dict, List, Optional, Union

from ..graph.model import PathPropertyGraph, validate
from ..graph.operations import graph_difference, graph_intersect, graph_union
from ..parsers import ast
from ..parsers.transformer import parse_query
from ..utils.errors import GCoreError, GraphValidationError
from .bindings import Binding, BindingSet
from .constructor import evaluate_construct
from .context import EvalContext, EvalSettings, GraphCatalog, SkolemGenerator
from .matcher import evaluate_match

logger = logging.getLogger(__name__)

_SET_OPERATIONS = {
    "UNION": graph_union,
    "INTERSECT": graph_intersect,
    "MINUS": graph_difference,
}


class QueryResult:
    """Result of a query evaluation"""

    def __init__(self, query_text: Optional[str] = None):
        self.query_text = query_text
        self.start_time = time.time()
        self.end_time: Optional[float] = None
        self.execution_time = 0.0
        self.graph = PathPropertyGraph.empty()
        self.bindings: Optional[BindingSet] = None
        self.views: List[str] = []
        self.error: Optional[str] = None

    def finish(self) -> None:
        """Mark evaluation as finished"""
        self.end_time = time.time()
        self.execution_time = self.end_time - self.start_time

    def to_dict(self) -> Dict[str, Any]:
        return {
            "graph": self.graph.summary(),
            "bindings": len(self.bindings) if self.bindings is not None else None,
            "views": list(self.views),
            "execution_time": self.execution_time,
            "error": self.error,
        }


# ---------------------------------------------------------------------------
# Evaluation functions
# ---------------------------------------------------------------------------


def evaluate_basic_query(query: ast.BasicQuery, ctx: EvalContext) -> PathPropertyGraph:
    matched = evaluate_match(query.match, ctx)
    return evaluate_construct(
        query.construct, matched.bindings, matched.graph, matched.variables, ctx
    )


def evaluate_full_query(query: Any, ctx: EvalContext) -> PathPropertyGraph:
    """Basic queries, graph names and UNION / INTERSECT / MINUS"""
    if isinstance(query, ast.GraphRef):
        return ctx.resolve_graph(query.name)
    if isinstance(query, ast.SetOperation):
        left = evaluate_full_query(query.left, ctx)
        right = evaluate_full_query(query.right, ctx)
        return _SET_OPERATIONS[query.op](left, right)
    return evaluate_basic_query(query, ctx)


def evaluate_query(query: ast.Query, ctx: EvalContext) -> PathPropertyGraph:
    """Head clauses in order, then the body"""
    for clause in query.head:
        if isinstance(clause, ast.PathClause):
            ctx.path_views[clause.name] = clause
            logger.debug(f"Declared path view ~{clause.name}")
        elif isinstance(clause, ast.GraphClause):
            ctx.local_graphs[clause.name] = evaluate_query(clause.query, ctx.nested())
            logger.debug(f"Declared local graph {clause.name}")
        else:
            if ctx.catalog is None:
                raise GCoreError(f"GRAPH VIEW {clause.name} needs a catalog")
            ctx.catalog.register_view(clause.name, clause.query)
    if query.body is None:
        return PathPropertyGraph.empty()
    return evaluate_full_query(query.body, ctx)


def evaluate_exists(query: ast.Query, binding: Binding, graph: PathPropertyGraph, ctx: EvalContext) -> bool:
    """TRUE iff the subquery, evaluated under {binding}, yields at least one node"""
    nested = ctx.nested(graph=graph, outer=BindingSet([binding]))
    return bool(evaluate_query(query, nested).nodes)


class QueryEngine:
    """Parses and evaluates queries against a catalog"""

    def __init__(self, catalog: Optional[GraphCatalog] = None, settings: Optional[EvalSettings] = None):
        self.catalog = catalog
        self.settings = settings or EvalSettings()

    def context(self, graph: Optional[PathPropertyGraph] = None, seed: Any = None) -> EvalContext:
        return EvalContext(
            catalog=self.catalog,
            graph=graph,
            skolem=SkolemGenerator(self.settings.seed if seed is None else seed),
            settings=self.settings,
        )

    def evaluate(
        self,
        query: Union[str, ast.Query],
        graph: Optional[PathPropertyGraph] = None,
        seed: Any = None,
    ) -> PathPropertyGraph:
        """Result graph of a query; raises on any error"""
        if isinstance(query, str):
            query = parse_query(query)
        return evaluate_query(query, self.context(graph, seed))

    def execute(self, text: str, graph: Optional[PathPropertyGraph] = None) -> QueryResult:
        """Evaluate a query and record timing, bindings and registered views"""
        result = QueryResult(text)
        query = parse_query(text)
        ctx = self.context(graph)
        try:
            result.graph = evaluate_query(query, ctx)
            violations = validate(result.graph)
            if violations:
                raise GraphValidationError(violations)
        except GCoreError as e:
            logger.error(f"Query evaluation failed: {e}")
            result.error = str(e)
            result.finish()
            raise
        result.bindings = ctx.trace[-1] if ctx.trace else None
        result.views = [h.name for h in query.head if isinstance(h, ast.GraphViewClause)]
        result.finish()
        logger.info(
            f"Query evaluated in {result.execution_time:.3f}s: {result.graph.summary()}"
        )
        return result
