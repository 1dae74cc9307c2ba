"""Tests for bindings and the binding-table algebra"""

import random

import pytest

from gcore_engine.core.bindings import (
    Binding,
    BindingSet,
    antijoin,
    compatible,
    group_by,
    join,
    left_outer_join,
    semijoin,
    union,
)
from gcore_engine.core.values import UNBOUND
from gcore_engine.graph.model import node_id


def random_bindings(rng: random.Random, variables, size: int) -> BindingSet:
    rows = []
    for _ in range(size):
        rows.append({v: rng.randint(0, 2) for v in variables if rng.random() < 0.8})
    return BindingSet(rows, variables)


def nested_loop_join(left: BindingSet, right: BindingSet) -> set:
    return {Binding({**a, **b}) for a in left for b in right if compatible(a, b)}


def test_binding_drops_unbound_values():
    binding = Binding({"x": 1, "y": UNBOUND})
    assert binding.domain == frozenset({"x"})
    assert binding.value("y") is UNBOUND
    assert binding == {"x": 1}


def test_true_and_one_are_different_bindings():
    assert Binding({"x": True}) != Binding({"x": 1})
    assert not compatible({"x": True}, {"x": 1})
    assert len(BindingSet([{"x": True}, {"x": 1}])) == 2


def test_binding_set_is_ordered_and_deduplicated():
    rows = BindingSet([{"x": 2}, {"x": 1}, {"x": 2}, {}])
    assert [r.value("x") for r in rows] == [UNBOUND, 1, 2]
    assert rows.variables == ("x",)


def test_unit_is_the_identity_of_join():
    omega = BindingSet([{"x": 1}, {"x": 2, "y": 3}])
    assert join(BindingSet.unit(), omega) == omega
    assert join(omega, BindingSet.empty()) == BindingSet.empty()


def test_join_semijoin_antijoin():
    left = BindingSet([{"x": 1, "y": 1}, {"x": 2, "y": 2}, {"x": 3}])
    right = BindingSet([{"x": 1, "z": 9}, {"x": 3, "z": 8}])
    assert join(left, right) == BindingSet([{"x": 1, "y": 1, "z": 9}, {"x": 3, "z": 8}])
    assert semijoin(left, right) == BindingSet([{"x": 1, "y": 1}, {"x": 3}])
    assert antijoin(left, right) == BindingSet([{"x": 2, "y": 2}])


def test_left_outer_join_preserves_unmatched_rows():
    left = BindingSet([{"n": node_id("a")}, {"n": node_id("b")}])
    right = BindingSet([{"n": node_id("a"), "m": node_id("c")}])
    result = left_outer_join(left, right)
    assert {"n": node_id("a"), "m": node_id("c")} in result
    assert {"n": node_id("b")} in result
    assert len(result) == 2


def test_union_collapses_duplicates():
    assert len(union(BindingSet([{"x": 1}]), BindingSet([{"x": 1}, {"y": 1}]))) == 2


def test_group_by_puts_unbound_together():
    omega = BindingSet([{"e": "Acme", "n": 1}, {"e": "Acme", "n": 2}, {"n": 3}, {"e": "HAL", "n": 4}])
    groups = group_by(omega, ["e"])
    assert sorted(len(g) for g in groups) == [1, 1, 2]
    assert len(group_by(omega, [])) == 1


def test_projection_and_values():
    omega = BindingSet([{"x": 1, "y": 2}, {"x": 1, "y": 3}])
    assert omega.project(["x"]) == BindingSet([{"x": 1}])
    assert omega.values_of("y") == [2, 3]
    assert omega.always_bound() == frozenset({"x", "y"})


def test_table_hides_anonymous_variables():
    omega = BindingSet([{"n": node_id("a"), "_anon0": node_id("b"), "v": frozenset({1, 2})}])
    table = omega.to_table()
    assert "_anon0" not in table
    assert "#a" in table
    assert "{1, 2}" in table
    assert omega.to_records() == [{"_anon0": "#b", "n": "#a", "v": [1, 2]}]


@pytest.mark.parametrize("seed", range(25))
def test_join_matches_nested_loop_oracle(seed):
    rng = random.Random(seed)
    left = random_bindings(rng, ["a", "b", "c"], rng.randint(0, 8))
    right = random_bindings(rng, ["b", "c", "d"], rng.randint(0, 8))
    assert set(join(left, right)) == nested_loop_join(left, right)
    outer = set(left_outer_join(left, right))
    preserved = {r for r in left if not any(compatible(r, s) for s in right)}
    assert outer == nested_loop_join(left, right) | preserved
    assert set(semijoin(left, right)) | set(antijoin(left, right)) == set(left)
