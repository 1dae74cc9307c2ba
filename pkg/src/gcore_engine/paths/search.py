"""Shortest, k-shortest and all-paths search over the graph x automaton product"""

import heapq
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Set, Tuple

import networkx as nx

from ..graph.model import Identifier, PathPropertyGraph
from ..utils.errors import UnknownPathError
from .regex import ANY_EDGE, EPSILON, FORWARD, INVERSE, NODE_TEST, VIEW, PathAutomaton, edge_moves

logger = logging.getLogger(__name__)

Body = Tuple[Identifier, ...]
StepKey = Tuple[int, Identifier]

VIEW_RANK = 2


@dataclass(frozen=True)
class Segment:
    """One row of a path view: the cheapest walk from source to target"""

    source: Identifier
    target: Identifier
    ident: Identifier
    body: Body
    cost: float


@dataclass
class PathViewRelation:
    """Binary relation computed by a PATH clause, indexed by source node"""

    name: str
    segments: List[Segment] = field(default_factory=list)

    def __post_init__(self) -> None:
        self._by_source: Dict[Identifier, List[Segment]] = {}
        for segment in sorted(self.segments, key=lambda s: (s.source, s.target)):
            self._by_source.setdefault(segment.source, []).append(segment)

    def outgoing(self, node: Identifier) -> List[Segment]:
        return self._by_source.get(node, [])

    def __len__(self) -> int:
        return len(self.segments)


ViewResolver = Mapping[str, PathViewRelation]


@dataclass(frozen=True)
class Walk:
    body: Body
    cost: float
    steps: Tuple[StepKey, ...] = ()

    @property
    def source(self) -> Identifier:
        return self.body[0]

    @property
    def target(self) -> Identifier:
        return self.body[-1]

    @property
    def nodes(self) -> List[Identifier]:
        return list(self.body[0::2])

    @property
    def edges(self) -> List[Identifier]:
        return list(self.body[1::2])


def _view(views: Optional[ViewResolver], name: Optional[str]) -> PathViewRelation:
    if views is None or name not in views:
        raise UnknownPathError(f"path view ~{name} is not available")
    return views[name]


def search_from(
    graph: PathPropertyGraph,
    automaton: PathAutomaton,
    source: Identifier,
    k: int = 1,
    views: Optional[ViewResolver] = None,
    targets: Optional[Iterable[Identifier]] = None,
    max_hops: Optional[int] = None,
) -> Dict[Identifier, List[Walk]]:
    """Up to k cheapest distinct conforming walks from source to every node

    Walks are ordered by (cost, step sequence); a step is keyed by direction
    (forward, inverse, view segment) and then identifier, which makes the
    choice among equally cheap walks deterministic. Each product state
    (node, automaton state) is expanded at most k times.
    """
    if source not in graph.nodes:
        return {}
    wanted = set(targets) if targets is not None else None
    cap = max_hops if max_hops is not None else max(1, len(graph.nodes) * automaton.state_count)
    counter = itertools.count()
    heap: List[tuple] = [(0, (), next(counter), source, automaton.start, (source,))]
    pushed: Set[Tuple[Body, int]] = {((source,), automaton.start)}
    expanded: Dict[Tuple[Identifier, int], int] = {}
    results: Dict[Identifier, List[Walk]] = {}
    found: Dict[Identifier, Set[Body]] = {}
    pops = 0

    def push(cost, steps, node, state, body) -> None:
        if (body, state) in pushed:
            return
        pushed.add((body, state))
        heapq.heappush(heap, (cost, steps, next(counter), node, state, body))

    while heap:
        cost, steps, _, node, state, body = heapq.heappop(heap)
        if expanded.get((node, state), 0) >= k:
            continue
        expanded[(node, state)] = expanded.get((node, state), 0) + 1
        pops += 1

        closed = automaton.closure([state], graph.labels_of(node))
        if closed & automaton.accept and (wanted is None or node in wanted):
            seen = found.setdefault(node, set())
            if body not in seen and len(seen) < k:
                seen.add(body)
                results.setdefault(node, []).append(Walk(body, cost, steps))
                if wanted is not None and all(len(found.get(t, ())) >= k for t in wanted):
                    break
        if len(steps) >= cap:
            continue

        for current in sorted(closed):
            for move in automaton.moves(current):
                if move.kind in (FORWARD, INVERSE, ANY_EDGE):
                    for rank, edge, nxt in edge_moves(graph, node, move):
                        push(cost + 1, steps + ((rank, edge),), nxt, move.target, body + (edge, nxt))
                elif move.kind == VIEW:
                    for segment in _view(views, move.label).outgoing(node):
                        push(
                            cost + segment.cost,
                            steps + ((VIEW_RANK, segment.ident),),
                            segment.target,
                            move.target,
                            body + segment.body[1:],
                        )

    logger.debug(
        f"Path search from {source}: {pops} expansions, {len(results)} targets reached"
    )
    return results


def shortest_path(
    graph: PathPropertyGraph,
    automaton: PathAutomaton,
    source: Identifier,
    target: Identifier,
    views: Optional[ViewResolver] = None,
) -> Optional[Walk]:
    walks = search_from(graph, automaton, source, 1, views, targets=[target])
    found = walks.get(target)
    return found[0] if found else None


def k_shortest_paths(
    graph: PathPropertyGraph,
    automaton: PathAutomaton,
    source: Identifier,
    target: Identifier,
    k: int,
    views: Optional[ViewResolver] = None,
    max_hops: Optional[int] = None,
) -> List[Walk]:
    if k < 1:
        raise ValueError("k must be at least 1")
    walks = search_from(graph, automaton, source, k, views, targets=[target], max_hops=max_hops)
    return walks.get(target, [])


# ---------------------------------------------------------------------------
# ALL paths
# ---------------------------------------------------------------------------


def _product_graph(
    graph: PathPropertyGraph,
    automaton: PathAutomaton,
    source: Identifier,
    views: Optional[ViewResolver],
) -> nx.MultiDiGraph:
    """Part of the product reachable from (source, start); edges carry the
    graph elements they traverse"""
    product = nx.MultiDiGraph()
    start = (source, automaton.start)
    product.add_node(start)
    frontier = [start]
    while frontier:
        node, state = frontier.pop()
        for move in automaton.moves(state):
            arrivals: List[Tuple[Tuple[Identifier, int], Tuple[Identifier, ...]]] = []
            if move.kind == EPSILON:
                arrivals.append(((node, move.target), ()))
            elif move.kind == NODE_TEST:
                if move.label in graph.labels_of(node):
                    arrivals.append(((node, move.target), ()))
            elif move.kind == VIEW:
                for segment in _view(views, move.label).outgoing(node):
                    arrivals.append(((segment.target, move.target), segment.body))
            else:
                for _, edge, nxt in edge_moves(graph, node, move):
                    arrivals.append(((nxt, move.target), (node, edge, nxt)))
            for arrival, elements in arrivals:
                if arrival not in product:
                    frontier.append(arrival)
                product.add_edge((node, state), arrival, elements=elements)
    return product


def all_paths_projections(
    graph: PathPropertyGraph,
    automaton: PathAutomaton,
    source: Identifier,
    views: Optional[ViewResolver] = None,
) -> Dict[Identifier, PathPropertyGraph]:
    """For every target reachable from source, the subgraph of all elements
    lying on some conforming walk, without enumerating walks"""
    if source not in graph.nodes:
        return {}
    product = _product_graph(graph, automaton, source, views)
    accepting: Dict[Identifier, List[Tuple[Identifier, int]]] = {}
    for node, state in product.nodes:
        if state in automaton.accept:
            accepting.setdefault(node, []).append((node, state))

    projections: Dict[Identifier, PathPropertyGraph] = {}
    for target in sorted(accepting):
        useful: Set[Tuple[Identifier, int]] = set(accepting[target])
        for final in accepting[target]:
            useful |= nx.ancestors(product, final)
        nodes: Set[Identifier] = {n for n, _ in useful}
        edges: Set[Identifier] = set()
        for left, right, data in product.edges(data=True):
            if left in useful and right in useful:
                elements = data["elements"]
                nodes.update(elements[0::2])
                edges.update(elements[1::2])
        projections[target] = graph.restrict(nodes, edges)
    logger.debug(f"ALL-paths projection from {source}: {len(projections)} targets")
    return projections


def all_paths_projection(
    graph: PathPropertyGraph,
    automaton: PathAutomaton,
    source: Identifier,
    target: Identifier,
    views: Optional[ViewResolver] = None,
) -> PathPropertyGraph:
    return all_paths_projections(graph, automaton, source, views).get(
        target, PathPropertyGraph.empty()
    )
