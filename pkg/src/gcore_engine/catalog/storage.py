"""JSON graph documents: schema, models and round-trip conversion"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Union

import jsonschema
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..graph.model import (
    GraphBuilder,
    Identifier,
    PathPropertyGraph,
    edge_id,
    node_id,
    path_id,
)
from ..utils.errors import CatalogError, GraphFormatError
from ..core.values import sorted_values, to_json

logger = logging.getLogger(__name__)

_SCALAR = {"type": ["string", "number", "boolean"]}
_PROPERTIES = {
    "type": "object",
    "additionalProperties": {"type": "array", "items": _SCALAR},
}
_LABELS = {"type": "array", "items": {"type": "string", "minLength": 1}}

GRAPH_SCHEMA: Dict[str, Any] = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "properties": {
        "nodes": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id"],
                "properties": {
                    "id": {"type": "string"},
                    "labels": _LABELS,
                    "properties": _PROPERTIES,
                },
                "additionalProperties": False,
            },
        },
        "edges": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "from", "to"],
                "properties": {
                    "id": {"type": "string"},
                    "from": {"type": "string"},
                    "to": {"type": "string"},
                    "labels": _LABELS,
                    "properties": _PROPERTIES,
                },
                "additionalProperties": False,
            },
        },
        "paths": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "body"],
                "properties": {
                    "id": {"type": "string"},
                    "body": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                    "labels": _LABELS,
                    "properties": _PROPERTIES,
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}

Scalar = Union[bool, int, float, str]


class NodeRecord(BaseModel):
    id: str
    labels: List[str] = Field(default_factory=list)
    properties: Dict[str, List[Scalar]] = Field(default_factory=dict)


class EdgeRecord(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    id: str
    source: str = Field(alias="from")
    target: str = Field(alias="to")
    labels: List[str] = Field(default_factory=list)
    properties: Dict[str, List[Scalar]] = Field(default_factory=dict)


class PathRecord(BaseModel):
    id: str
    body: List[str]
    labels: List[str] = Field(default_factory=list)
    properties: Dict[str, List[Scalar]] = Field(default_factory=dict)


class GraphDocument(BaseModel):
    nodes: List[NodeRecord] = Field(default_factory=list)
    edges: List[EdgeRecord] = Field(default_factory=list)
    paths: List[PathRecord] = Field(default_factory=list)


def _json_path(parts: Any) -> str:
    text = ""
    for part in parts:
        text += f"[{part}]" if isinstance(part, int) else (f".{part}" if text else str(part))
    return text or "$"


def parse_document(data: Any) -> GraphDocument:
    """Check a decoded JSON value against the schema and the models"""
    try:
        jsonschema.validate(data, GRAPH_SCHEMA)
    except jsonschema.ValidationError as e:
        raise GraphFormatError(e.message, _json_path(e.absolute_path)) from e
    try:
        return GraphDocument.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        raise GraphFormatError(first["msg"], _json_path(first["loc"])) from e


def document_to_graph(document: GraphDocument) -> PathPropertyGraph:
    """Build and validate the graph a document describes"""
    builder = GraphBuilder()
    for node in document.nodes:
        builder.add_node(node_id(node.id), node.labels, node.properties, strict=True)
    for edge in document.edges:
        builder.add_edge(
            edge_id(edge.id),
            node_id(edge.source),
            node_id(edge.target),
            edge.labels,
            edge.properties,
            strict=True,
        )
    for path in document.paths:
        body = [
            node_id(value) if position % 2 == 0 else edge_id(value)
            for position, value in enumerate(path.body)
        ]
        builder.add_path(path_id(path.id), body, path.labels, path.properties, strict=True)
    return builder.build(check=True)


def _annotations(graph: PathPropertyGraph, ident: Identifier) -> Dict[str, Any]:
    return {
        "labels": sorted(graph.labels_of(ident)),
        "properties": {
            key: [to_json(v) for v in sorted_values(graph.values_of(ident, key))]
            for key in graph.keys_of(ident)
        },
    }


def graph_to_dict(graph: PathPropertyGraph) -> Dict[str, Any]:
    """Deterministic document form: ids, labels and values all sorted"""
    return {
        "nodes": [{"id": n.value, **_annotations(graph, n)} for n in graph.sorted_nodes],
        "edges": [
            {
                "id": e.value,
                "from": graph.endpoints[e][0].value,
                "to": graph.endpoints[e][1].value,
                **_annotations(graph, e),
            }
            for e in graph.sorted_edges
        ],
        "paths": [
            {"id": p.value, "body": [x.value for x in graph.bodies[p]], **_annotations(graph, p)}
            for p in graph.sorted_paths
        ],
    }


def graph_to_json(graph: PathPropertyGraph, indent: int = 2) -> str:
    return json.dumps(graph_to_dict(graph), indent=indent, ensure_ascii=False)


def graph_from_json(text: str, location: str = "<string>") -> PathPropertyGraph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise GraphFormatError(f"malformed JSON at line {e.lineno}: {e.msg}", location) from e
    return document_to_graph(parse_document(data))


def load_graph_file(path: Union[str, Path]) -> PathPropertyGraph:
    """Read, check and validate a graph file"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise CatalogError(f"cannot read graph file {path}: {e}") from e
    graph = graph_from_json(text, str(path))
    logger.info(f"Loaded graph from {path}: {graph.summary()}")
    return graph


def save_graph_file(graph: PathPropertyGraph, path: Union[str, Path]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(graph_to_json(graph) + "\n", encoding="utf-8")
    except OSError as e:
        raise CatalogError(f"cannot write graph file {path}: {e}") from e
    logger.info(f"Saved graph to {path}")
    return path
