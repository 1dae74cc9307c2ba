"""Evaluation context shared by MATCH, CONSTRUCT, PATH and GRAPH evaluation"""

import hashlib
import logging
import threading
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Iterator, List, Mapping, Optional, Protocol, Tuple

from ..graph.model import IdKind, Identifier, PathPropertyGraph
from ..parsers import ast
from ..paths.search import PathViewRelation
from ..utils.errors import UnknownGraphError, UnknownPathError
from .bindings import BindingSet
from .values import value_key

logger = logging.getLogger(__name__)

_KIND_PREFIX = {IdKind.NODE: "n", IdKind.EDGE: "e", IdKind.PATH: "p"}


class GraphCatalog(Protocol):
    """What evaluation needs from a catalog (the gr function)"""

    def resolve(self, name: str) -> PathPropertyGraph: ...

    def has(self, name: str) -> bool: ...

    def default_graph(self) -> PathPropertyGraph: ...

    def register_view(self, name: str, query: ast.Query) -> None: ...


@dataclass
class EvalSettings:
    seed: int = 0
    k_shortest_cap: Optional[int] = None
    memoize_views: bool = False


class SkolemGenerator:
    """Deterministic fresh identifiers: the same key always yields the same id

    Ids are derived from a hash of (seed, key), so two runs with the same seed
    produce identical graphs.
    """

    def __init__(self, seed: Any = 0):
        self.seed = seed
        self._ordinal = 0
        self._issued: Dict[Identifier, str] = {}
        self._lock = threading.Lock()

    def next_ordinal(self) -> int:
        with self._lock:
            ordinal = self._ordinal
            self._ordinal += 1
            return ordinal

    def new(self, kind: IdKind, *key: Any) -> Identifier:
        canonical = repr(tuple(value_key(part) for part in key))
        digest = hashlib.sha1(f"{self.seed}|{canonical}".encode("utf-8")).hexdigest()
        with self._lock:
            suffix = 0
            while True:
                value = f"{_KIND_PREFIX[kind]}_{digest[:12]}"
                if suffix:
                    value = f"{value}_{suffix}"
                ident = Identifier(kind, value)
                owner = self._issued.setdefault(ident, canonical)
                if owner == canonical:
                    return ident
                suffix += 1


class _ViewMapping(Mapping[str, PathViewRelation]):
    """Path views of a context, evaluated on first use against one graph"""

    def __init__(self, ctx: "EvalContext", graph: PathPropertyGraph):
        self._ctx = ctx
        self._graph = graph

    def __getitem__(self, name: str) -> PathViewRelation:
        if name not in self._ctx.path_views:
            raise KeyError(name)
        return self._ctx.path_view(name, self._graph)

    def __iter__(self) -> Iterator[str]:
        return iter(self._ctx.path_views)

    def __len__(self) -> int:
        return len(self._ctx.path_views)


@dataclass
class EvalContext:
    """State of one query evaluation

    ``graph`` is the current default graph (None defers to the catalog) and
    ``outer`` the bindings Omega' a correlated subquery is evaluated under.
    Registries of generated paths are shared with every derived context.
    """

    catalog: Optional[GraphCatalog] = None
    graph: Optional[PathPropertyGraph] = None
    outer: BindingSet = field(default_factory=BindingSet.unit)
    local_graphs: Dict[str, PathPropertyGraph] = field(default_factory=dict)
    path_views: Dict[str, ast.PathClause] = field(default_factory=dict)
    view_cache: Dict[Tuple[str, int, int], Tuple[PathPropertyGraph, PathViewRelation]] = field(
        default_factory=dict
    )
    virtual_paths: Dict[Identifier, Tuple[Tuple[Identifier, ...], float]] = field(
        default_factory=dict
    )
    projections: Dict[Identifier, PathPropertyGraph] = field(default_factory=dict)
    skolem: SkolemGenerator = field(default_factory=SkolemGenerator)
    settings: EvalSettings = field(default_factory=EvalSettings)
    depth: int = 0
    trace: List[BindingSet] = field(default_factory=list)

    def derive(self, **changes: Any) -> "EvalContext":
        return replace(self, **changes)

    def nested(self, **changes: Any) -> "EvalContext":
        """Context for a subquery: local names are copied so they do not leak out"""
        changes.setdefault("local_graphs", dict(self.local_graphs))
        changes.setdefault("path_views", dict(self.path_views))
        changes.setdefault("depth", self.depth + 1)
        return replace(self, **changes)

    # -- graphs --------------------------------------------------------------

    def current_graph(self) -> PathPropertyGraph:
        if self.graph is not None:
            return self.graph
        if self.catalog is None:
            raise UnknownGraphError("no default graph: pass a graph or use ON")
        return self.catalog.default_graph()

    def resolve_graph(self, name: str) -> PathPropertyGraph:
        if name in self.local_graphs:
            return self.local_graphs[name]
        if self.catalog is None or not self.catalog.has(name):
            raise UnknownGraphError(f"unknown graph '{name}'")
        return self.catalog.resolve(name)

    # -- paths ---------------------------------------------------------------

    def views_for(self, graph: PathPropertyGraph) -> Mapping[str, PathViewRelation]:
        return _ViewMapping(self, graph)

    def path_view(self, name: str, graph: PathPropertyGraph) -> PathViewRelation:
        clause = self.path_views[name]
        key = (name, id(clause), id(graph))
        cached = self.view_cache.get(key)
        if cached is not None and cached[0] is graph:
            return cached[1]
        from .path_views import evaluate_path_view

        relation = evaluate_path_view(self, clause, graph)
        self.view_cache[key] = (graph, relation)
        logger.debug(f"Path view ~{name}: {len(relation)} segments")
        return relation

    def path_body(self, ident: Identifier, graph: PathPropertyGraph) -> Tuple[Identifier, ...]:
        if ident in graph.bodies:
            return tuple(graph.bodies[ident])
        if ident in self.virtual_paths:
            return self.virtual_paths[ident][0]
        if ident in self.projections:
            raise UnknownPathError(f"path {ident} summarizes ALL paths and has no single body")
        raise UnknownPathError(f"path {ident} is not in the graph")

    def register_walk(self, body: Tuple[Identifier, ...], cost: float) -> Identifier:
        """Fresh identifier for a computed (virtual) path; equal bodies share it"""
        ident = self.skolem.new(IdKind.PATH, "walk", body)
        self.virtual_paths.setdefault(ident, (body, cost))
        return ident
