"""Tests for reading and writing graph documents"""

import json

import pytest

from gcore_engine.catalog.storage import (
    graph_from_json,
    graph_to_dict,
    graph_to_json,
    load_graph_file,
    parse_document,
    save_graph_file,
)
from gcore_engine.graph.model import edge_id, node_id, path_id
from gcore_engine.utils.errors import CatalogError, GraphFormatError, GraphValidationError


def test_round_trip_preserves_the_graph(toy_graph):
    assert graph_from_json(graph_to_json(toy_graph)) == toy_graph


def test_documents_are_sorted(toy_graph):
    document = graph_to_dict(toy_graph)
    assert [n["id"] for n in document["nodes"]] == ["101", "102", "103", "104", "105", "106"]
    assert document["nodes"][1]["labels"] == ["Manager", "Person"]
    assert document["paths"] == [
        {
            "id": "301",
            "body": ["105", "207", "103", "202", "102"],
            "labels": ["toWagner"],
            "properties": {"trust": [0.95]},
        }
    ]


def test_scalar_types_survive():
    text = json.dumps(
        {"nodes": [{"id": "a", "properties": {"flag": [True], "n": [1], "x": [1.5], "s": ["1"]}}]}
    )
    graph = graph_from_json(text)
    assert graph.values_of(node_id("a"), "flag") == frozenset({True})
    assert graph.values_of(node_id("a"), "n") == frozenset({1})
    assert graph.values_of(node_id("a"), "s") == frozenset({"1"})
    assert graph_to_dict(graph)["nodes"][0]["properties"] == {
        "flag": [True],
        "n": [1],
        "s": ["1"],
        "x": [1.5],
    }


@pytest.mark.parametrize(
    "data, location",
    [
        ({"nodes": [{"id": 1}]}, "nodes[0].id"),
        ({"vertices": []}, "$"),
        ({"nodes": [{"id": "a", "properties": {"k": [{"x": 1}]}}]}, "nodes[0].properties.k[0]"),
        ({"edges": [{"id": "e", "from": "a"}]}, "edges[0]"),
        ({"paths": [{"id": "p", "body": []}]}, "paths[0].body"),
    ],
)
def test_schema_errors_carry_a_location(data, location):
    with pytest.raises(GraphFormatError) as info:
        parse_document(data)
    assert info.value.location == location


def test_malformed_json():
    with pytest.raises(GraphFormatError) as info:
        graph_from_json("{", "broken.json")
    assert info.value.location == "broken.json"


def test_invalid_graphs_are_rejected():
    dangling = {"nodes": [{"id": "a"}], "edges": [{"id": "e", "from": "a", "to": "b"}]}
    with pytest.raises(GraphValidationError) as info:
        graph_from_json(json.dumps(dangling))
    assert any("dangling" in v for v in info.value.violations)

    duplicate = {"nodes": [{"id": "a"}, {"id": "a"}]}
    with pytest.raises(GraphValidationError) as info:
        graph_from_json(json.dumps(duplicate))
    assert "duplicate node id a" in info.value.violations


def test_files(tmp_path, toy_graph):
    target = save_graph_file(toy_graph, tmp_path / "nested" / "toy.json")
    assert target.exists()
    loaded = load_graph_file(target)
    assert loaded.endpoints[edge_id("205")] == (node_id("102"), node_id("106"))
    assert loaded.body_of(path_id("301"))[0] == node_id("105")
    with pytest.raises(CatalogError):
        load_graph_file(tmp_path / "missing.json")
