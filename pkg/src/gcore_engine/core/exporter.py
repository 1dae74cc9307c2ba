"""Result export: JSON documents, DOT digraphs and text tables"""

import logging
from typing import Callable, Dict, List

from tabulate import tabulate

from ..graph.model import Identifier, PathPropertyGraph
from ..utils.errors import GCoreError
from .values import format_value

logger = logging.getLogger(__name__)

FORMATS = ("json", "dot", "table")


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _describe(graph: PathPropertyGraph, ident: Identifier) -> List[str]:
    lines = []
    labels = sorted(graph.labels_of(ident))
    if labels:
        lines.append(":" + ":".join(labels))
    for key in graph.keys_of(ident):
        lines.append(f"{key} = {format_value(graph.values_of(ident, key))}")
    return lines


def to_dot(graph: PathPropertyGraph, name: str = "result") -> str:
    """DOT digraph; each stored path is a cluster holding a note with its edge sequence"""
    out = [f"digraph {_dot_quote(name)} {{", "  node [shape=ellipse];"]
    for node in graph.sorted_nodes:
        label = "\n".join([node.value] + _describe(graph, node))
        out.append(f"  {_dot_quote(node.value)} [label={_dot_quote(label)}];")
    for edge in graph.sorted_edges:
        source, target = graph.endpoints[edge]
        label = "\n".join([edge.value] + _describe(graph, edge))
        out.append(
            f"  {_dot_quote(source.value)} -> {_dot_quote(target.value)} "
            f"[label={_dot_quote(label)}];"
        )
    for index, path in enumerate(graph.sorted_paths):
        body = graph.bodies[path]
        sequence = " ".join(x.value for x in body[1::2]) or "(empty)"
        note = "\n".join([f"@{path.value}: {sequence}"] + _describe(graph, path))
        out.append(f"  subgraph cluster_path_{index} {{")
        out.append(f"    label={_dot_quote('@' + path.value)};")
        out.append("    style=dashed;")
        out.append(f"    {_dot_quote('@' + path.value)} [shape=note, label={_dot_quote(note)}];")
        out.append("  }")
        out.append(
            f"  {_dot_quote('@' + path.value)} -> {_dot_quote(body[0].value)} "
            "[style=dotted, arrowhead=none];"
        )
    out.append("}")
    return "\n".join(out) + "\n"


def to_table(graph: PathPropertyGraph) -> str:
    """Summary tables of nodes, edges and paths"""
    sections = []
    nodes = [
        [n.value, ":".join(sorted(graph.labels_of(n))), _props(graph, n)]
        for n in graph.sorted_nodes
    ]
    sections.append("Nodes\n" + tabulate(nodes, headers=["id", "labels", "properties"]))
    edges = [
        [e.value, graph.endpoints[e][0].value, graph.endpoints[e][1].value,
         ":".join(sorted(graph.labels_of(e))), _props(graph, e)]
        for e in graph.sorted_edges
    ]
    sections.append(
        "Edges\n" + tabulate(edges, headers=["id", "from", "to", "labels", "properties"])
    )
    if graph.paths:
        paths = [
            [p.value, " ".join(x.value for x in graph.bodies[p]),
             ":".join(sorted(graph.labels_of(p))), _props(graph, p)]
            for p in graph.sorted_paths
        ]
        sections.append(
            "Paths\n" + tabulate(paths, headers=["id", "body", "labels", "properties"])
        )
    return "\n\n".join(sections) + "\n"


def _props(graph: PathPropertyGraph, ident: Identifier) -> str:
    return ", ".join(
        f"{key}={format_value(graph.values_of(ident, key))}" for key in graph.keys_of(ident)
    )


def _to_json(graph: PathPropertyGraph) -> str:
    from ..catalog.storage import graph_to_json

    return graph_to_json(graph) + "\n"


_EXPORTERS: Dict[str, Callable[[PathPropertyGraph], str]] = {
    "json": _to_json,
    "dot": to_dot,
    "table": to_table,
}


def export_graph(graph: PathPropertyGraph, output_format: str = "json") -> str:
    exporter = _EXPORTERS.get(output_format)
    if exporter is None:
        raise GCoreError(f"unknown output format {output_format}; use one of {', '.join(FORMATS)}")
    logger.debug(f"Exporting {graph.summary()} as {output_format}")
    return exporter(graph)
