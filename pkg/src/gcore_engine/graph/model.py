"""Path Property Graph data model"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property, total_ordering
from typing import (
    Any,
    Dict,
    FrozenSet,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Set,
    Tuple,
)

from ..utils.errors import GraphValidationError, UnknownPathError

logger = logging.getLogger(__name__)


class IdKind(str, Enum):
    """The three disjoint identifier sorts of a graph"""

    NODE = "node"
    EDGE = "edge"
    PATH = "path"


_KIND_RANK = {IdKind.NODE: 0, IdKind.EDGE: 1, IdKind.PATH: 2}


@total_ordering
@dataclass(frozen=True)
class Identifier:
    """Identity of a node, edge or path; ordered by (kind, value)"""

    kind: IdKind
    value: str

    def sort_key(self) -> Tuple[int, str]:
        return (_KIND_RANK[self.kind], self.value)

    def __lt__(self, other: "Identifier") -> bool:
        if not isinstance(other, Identifier):
            return NotImplemented
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return f"#{self.value}"

    def __repr__(self) -> str:
        return f"{self.kind.value}:{self.value}"


def node_id(value: Any) -> Identifier:
    return Identifier(IdKind.NODE, str(value))


def edge_id(value: Any) -> Identifier:
    return Identifier(IdKind.EDGE, str(value))


def path_id(value: Any) -> Identifier:
    return Identifier(IdKind.PATH, str(value))


PropertyMap = Mapping[str, FrozenSet[Any]]


@dataclass(frozen=True)
class PathPropertyGraph:
    """Immutable graph (N, E, P, rho, delta, lambda, sigma)

    Label and property maps are sparse: identifiers without labels or without
    a value for a key are simply absent, and lookups return empty sets.
    """

    nodes: FrozenSet[Identifier] = frozenset()
    edges: FrozenSet[Identifier] = frozenset()
    paths: FrozenSet[Identifier] = frozenset()
    endpoints: Mapping[Identifier, Tuple[Identifier, Identifier]] = field(
        default_factory=dict
    )
    bodies: Mapping[Identifier, Tuple[Identifier, ...]] = field(default_factory=dict)
    labels: Mapping[Identifier, FrozenSet[str]] = field(default_factory=dict)
    properties: Mapping[Identifier, PropertyMap] = field(default_factory=dict)

    @classmethod
    def empty(cls) -> "PathPropertyGraph":
        return cls()

    # -- accessors ---------------------------------------------------------

    def contains(self, ident: Identifier) -> bool:
        return ident in self.nodes or ident in self.edges or ident in self.paths

    def labels_of(self, ident: Identifier) -> FrozenSet[str]:
        return self.labels.get(ident, frozenset())

    def values_of(self, ident: Identifier, key: str) -> FrozenSet[Any]:
        return self.properties.get(ident, {}).get(key, frozenset())

    def keys_of(self, ident: Identifier) -> List[str]:
        return sorted(self.properties.get(ident, {}))

    def endpoints_of(self, edge: Identifier) -> Optional[Tuple[Identifier, Identifier]]:
        return self.endpoints.get(edge)

    def body_of(self, path: Identifier) -> Tuple[Identifier, ...]:
        if path not in self.bodies:
            raise UnknownPathError(f"path {path} is not in the graph")
        return self.bodies[path]

    def path_nodes(self, path: Identifier) -> List[Identifier]:
        """Nodes of a stored path in traversal order"""
        return list(self.body_of(path)[0::2])

    def path_edges(self, path: Identifier) -> List[Identifier]:
        """Edges of a stored path in traversal order"""
        return list(self.body_of(path)[1::2])

    def is_empty(self) -> bool:
        return not (self.nodes or self.edges or self.paths)

    def summary(self) -> Dict[str, int]:
        return {
            "nodes": len(self.nodes),
            "edges": len(self.edges),
            "paths": len(self.paths),
        }

    # -- indexes -----------------------------------------------------------

    @cached_property
    def outgoing(self) -> Dict[Identifier, List[Tuple[Identifier, Identifier]]]:
        """node -> sorted [(edge, target)]"""
        index: Dict[Identifier, List[Tuple[Identifier, Identifier]]] = {}
        for edge in sorted(self.edges):
            source, target = self.endpoints[edge]
            index.setdefault(source, []).append((edge, target))
        return index

    @cached_property
    def incoming(self) -> Dict[Identifier, List[Tuple[Identifier, Identifier]]]:
        """node -> sorted [(edge, source)]"""
        index: Dict[Identifier, List[Tuple[Identifier, Identifier]]] = {}
        for edge in sorted(self.edges):
            source, target = self.endpoints[edge]
            index.setdefault(target, []).append((edge, source))
        return index

    @cached_property
    def sorted_nodes(self) -> List[Identifier]:
        return sorted(self.nodes)

    @cached_property
    def sorted_edges(self) -> List[Identifier]:
        return sorted(self.edges)

    @cached_property
    def sorted_paths(self) -> List[Identifier]:
        return sorted(self.paths)

    def restrict(
        self,
        nodes: Iterable[Identifier],
        edges: Iterable[Identifier] = (),
        paths: Iterable[Identifier] = (),
    ) -> "PathPropertyGraph":
        """Subgraph over the given identifiers, keeping their labels and properties"""
        keep_nodes = frozenset(nodes) & self.nodes
        keep_edges = frozenset(edges) & self.edges
        keep_paths = frozenset(paths) & self.paths
        kept = keep_nodes | keep_edges | keep_paths
        return PathPropertyGraph(
            nodes=keep_nodes,
            edges=keep_edges,
            paths=keep_paths,
            endpoints={e: self.endpoints[e] for e in keep_edges},
            bodies={p: self.bodies[p] for p in keep_paths},
            labels={x: ls for x, ls in self.labels.items() if x in kept},
            properties={x: ps for x, ps in self.properties.items() if x in kept},
        )


def validate(graph: PathPropertyGraph) -> List[str]:
    """Return every invariant violation of the graph; an empty list means valid"""
    violations: List[str] = []

    overlap = (
        (graph.nodes & graph.edges)
        | (graph.nodes & graph.paths)
        | (graph.edges & graph.paths)
    )
    for ident in sorted(overlap):
        violations.append(f"identifier {ident.value} used by more than one sort")

    for ident in sorted(graph.nodes):
        if ident.kind is not IdKind.NODE:
            violations.append(f"node {ident.value} has kind {ident.kind.value}")
    for ident in sorted(graph.edges):
        if ident.kind is not IdKind.EDGE:
            violations.append(f"edge {ident.value} has kind {ident.kind.value}")
    for ident in sorted(graph.paths):
        if ident.kind is not IdKind.PATH:
            violations.append(f"path {ident.value} has kind {ident.kind.value}")

    for edge in sorted(graph.edges):
        ends = graph.endpoints.get(edge)
        if ends is None:
            violations.append(f"edge {edge.value} has no endpoints")
            continue
        if ends[0] not in graph.nodes or ends[1] not in graph.nodes:
            violations.append(f"dangling endpoint {edge.value}")

    for path in sorted(graph.paths):
        body = graph.bodies.get(path)
        if body is None:
            violations.append(f"path {path.value} has no body")
            continue
        problem = body_violation(graph, body)
        if problem:
            violations.append(f"malformed path body {path.value}: {problem}")

    known = graph.nodes | graph.edges | graph.paths
    for ident in sorted(set(graph.labels) | set(graph.properties)):
        if ident not in known:
            violations.append(f"labels or properties for unknown identifier {ident.value}")

    return violations


def body_violation(graph: PathPropertyGraph, body: Sequence[Identifier]) -> Optional[str]:
    """Describe why body is not an alternating node/edge walk of graph, if it is not"""
    if len(body) % 2 == 0:
        return "body must have odd length"
    for position, ident in enumerate(body):
        expected = graph.nodes if position % 2 == 0 else graph.edges
        if ident not in expected:
            sort = "node" if position % 2 == 0 else "edge"
            return f"position {position} is not a {sort} of the graph"
    for index in range(1, len(body), 2):
        left, edge, right = body[index - 1], body[index], body[index + 1]
        ends = graph.endpoints.get(edge)
        if ends not in ((left, right), (right, left)):
            return f"edge {edge.value} does not connect {left.value} and {right.value}"
    return None


class GraphBuilder:
    """Mutable accumulator that produces an immutable PathPropertyGraph"""

    def __init__(self, base: Optional[PathPropertyGraph] = None):
        self.nodes: Set[Identifier] = set()
        self.edges: Set[Identifier] = set()
        self.paths: Set[Identifier] = set()
        self.endpoints: Dict[Identifier, Tuple[Identifier, Identifier]] = {}
        self.bodies: Dict[Identifier, Tuple[Identifier, ...]] = {}
        self.labels: Dict[Identifier, Set[str]] = {}
        self.properties: Dict[Identifier, Dict[str, Set[Any]]] = {}
        self.duplicates: List[str] = []
        if base is not None:
            self.merge(base)

    def merge(self, graph: PathPropertyGraph) -> "GraphBuilder":
        """Componentwise union with graph; existing endpoints and bodies win"""
        self.nodes.update(graph.nodes)
        self.edges.update(graph.edges)
        self.paths.update(graph.paths)
        for edge, ends in graph.endpoints.items():
            self.endpoints.setdefault(edge, ends)
        for path, body in graph.bodies.items():
            self.bodies.setdefault(path, body)
        for ident, labels in graph.labels.items():
            self.labels.setdefault(ident, set()).update(labels)
        for ident, props in graph.properties.items():
            target = self.properties.setdefault(ident, {})
            for key, values in props.items():
                target.setdefault(key, set()).update(values)
        return self

    def add_node(
        self,
        ident: Identifier,
        labels: Iterable[str] = (),
        properties: Optional[Mapping[str, Iterable[Any]]] = None,
        strict: bool = False,
    ) -> "GraphBuilder":
        if strict and ident in self.nodes:
            self.duplicates.append(f"duplicate node id {ident.value}")
        self.nodes.add(ident)
        self._annotate(ident, labels, properties)
        return self

    def add_edge(
        self,
        ident: Identifier,
        source: Identifier,
        target: Identifier,
        labels: Iterable[str] = (),
        properties: Optional[Mapping[str, Iterable[Any]]] = None,
        strict: bool = False,
    ) -> "GraphBuilder":
        if strict and ident in self.edges:
            self.duplicates.append(f"duplicate edge id {ident.value}")
        self.edges.add(ident)
        self.endpoints.setdefault(ident, (source, target))
        self._annotate(ident, labels, properties)
        return self

    def add_path(
        self,
        ident: Identifier,
        body: Sequence[Identifier],
        labels: Iterable[str] = (),
        properties: Optional[Mapping[str, Iterable[Any]]] = None,
        strict: bool = False,
    ) -> "GraphBuilder":
        if strict and ident in self.paths:
            self.duplicates.append(f"duplicate path id {ident.value}")
        self.paths.add(ident)
        self.bodies.setdefault(ident, tuple(body))
        self._annotate(ident, labels, properties)
        return self

    def add_labels(self, ident: Identifier, labels: Iterable[str]) -> None:
        self.labels.setdefault(ident, set()).update(labels)

    def remove_label(self, ident: Identifier, label: str) -> None:
        self.labels.get(ident, set()).discard(label)

    def add_values(self, ident: Identifier, key: str, values: Iterable[Any]) -> None:
        self.properties.setdefault(ident, {}).setdefault(key, set()).update(values)

    def set_values(self, ident: Identifier, key: str, values: Iterable[Any]) -> None:
        self.properties.setdefault(ident, {})[key] = set(values)

    def remove_property(self, ident: Identifier, key: str) -> None:
        self.properties.get(ident, {}).pop(key, None)

    def _annotate(
        self,
        ident: Identifier,
        labels: Iterable[str],
        properties: Optional[Mapping[str, Iterable[Any]]],
    ) -> None:
        self.add_labels(ident, labels)
        for key, values in (properties or {}).items():
            self.add_values(ident, key, values)

    def build(self, check: bool = True) -> PathPropertyGraph:
        graph = PathPropertyGraph(
            nodes=frozenset(self.nodes),
            edges=frozenset(self.edges),
            paths=frozenset(self.paths),
            endpoints={e: self.endpoints[e] for e in self.edges if e in self.endpoints},
            bodies={p: self.bodies[p] for p in self.paths if p in self.bodies},
            labels={x: frozenset(ls) for x, ls in self.labels.items() if ls},
            properties={
                x: {k: frozenset(vs) for k, vs in props.items() if vs}
                for x, props in self.properties.items()
                if any(props.values())
            },
        )
        if check:
            violations = self.duplicates + validate(graph)
            if violations:
                raise GraphValidationError(violations)
        logger.debug(f"Built graph {graph.summary()}")
        return graph
