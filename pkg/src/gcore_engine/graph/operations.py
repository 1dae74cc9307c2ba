"""Full-graph union, intersection and difference"""

import logging
from typing import Iterable

from .model import GraphBuilder, PathPropertyGraph

logger = logging.getLogger(__name__)


def consistent(g1: PathPropertyGraph, g2: PathPropertyGraph) -> bool:
    """Shared edges agree on endpoints and shared paths agree on bodies"""
    for edge in g1.edges & g2.edges:
        if g1.endpoints[edge] != g2.endpoints[edge]:
            return False
    for path in g1.paths & g2.paths:
        if g1.bodies[path] != g2.bodies[path]:
            return False
    return True


def graph_union(g1: PathPropertyGraph, g2: PathPropertyGraph) -> PathPropertyGraph:
    if not consistent(g1, g2):
        logger.info("Union of inconsistent graphs yields the empty graph")
        return PathPropertyGraph.empty()
    if g2.is_empty():
        return g1
    if g1.is_empty():
        return g2
    return GraphBuilder(g1).merge(g2).build(check=False)


def union_all(graphs: Iterable[PathPropertyGraph]) -> PathPropertyGraph:
    result = PathPropertyGraph.empty()
    for graph in graphs:
        result = graph_union(result, graph)
    return result


def graph_intersect(g1: PathPropertyGraph, g2: PathPropertyGraph) -> PathPropertyGraph:
    if not consistent(g1, g2):
        logger.info("Intersection of inconsistent graphs yields the empty graph")
        return PathPropertyGraph.empty()

    nodes = g1.nodes & g2.nodes
    edges = g1.edges & g2.edges
    paths = g1.paths & g2.paths
    builder = GraphBuilder()
    for ident in nodes | edges | paths:
        labels = g1.labels_of(ident) & g2.labels_of(ident)
        if ident in nodes:
            builder.add_node(ident, labels)
        elif ident in edges:
            builder.add_edge(ident, *g1.endpoints[ident], labels=labels)
        else:
            builder.add_path(ident, g1.bodies[ident], labels=labels)
        for key in set(g1.keys_of(ident)) & set(g2.keys_of(ident)):
            builder.add_values(
                ident, key, g1.values_of(ident, key) & g2.values_of(ident, key)
            )
    return builder.build(check=False)


def graph_difference(g1: PathPropertyGraph, g2: PathPropertyGraph) -> PathPropertyGraph:
    """Remove g2's objects from g1, dropping edges and paths that would dangle"""
    nodes = g1.nodes - g2.nodes
    edges = {
        edge
        for edge in g1.edges - g2.edges
        if g1.endpoints[edge][0] in nodes and g1.endpoints[edge][1] in nodes
    }
    paths = set()
    for path in g1.paths - g2.paths:
        body = g1.bodies[path]
        if all(x in nodes for x in body[0::2]) and all(x in edges for x in body[1::2]):
            paths.add(path)
    return g1.restrict(nodes, edges, paths)
