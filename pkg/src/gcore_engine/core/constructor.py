"""CONSTRUCT evaluation: grouping, skolem identities, SET/REMOVE and WHEN"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Set, Tuple

from ..graph.model import GraphBuilder, IdKind, Identifier, PathPropertyGraph
from ..graph.operations import union_all
from ..parsers import ast
from .bindings import Binding, BindingSet
from .context import EvalContext
from .expressions import ExpressionEvaluator
from .values import UNBOUND, property_values

logger = logging.getLogger(__name__)

NODE, EDGE, PATH = "node", "edge", "path"


@dataclass
class ConstructElement:
    """Everything a CONSTRUCT clause says about one variable"""

    variable: str
    sort: str
    group: List[Any] = field(default_factory=list)
    labels: List[str] = field(default_factory=list)
    assignments: List[ast.PropertyAssignment] = field(default_factory=list)
    copy_of: Optional[str] = None
    stored: bool = False
    endpoints: Optional[Tuple[str, str]] = None

    def absorb(self, element: Any) -> None:
        self.labels.extend(l for l in element.labels if l not in self.labels)
        self.assignments.extend(element.assignments)
        if not self.group:
            self.group = list(getattr(element, "group", []))
        if self.copy_of is None:
            self.copy_of = element.copy_of
        self.stored = self.stored or getattr(element, "stored", False)


def collect_elements(chains: List[ast.ConstructChain]) -> Dict[str, ConstructElement]:
    """Construct variables in order of first appearance, occurrences merged"""
    elements: Dict[str, ConstructElement] = {}
    for chain in chains:
        items = chain.elements
        for index, item in enumerate(items):
            if isinstance(item, ast.NodeConstruct):
                sort = NODE
            elif isinstance(item, ast.EdgeConstruct):
                sort = EDGE
            else:
                sort = PATH
            element = elements.get(item.variable)
            if element is None:
                element = elements[item.variable] = ConstructElement(item.variable, sort)
            element.absorb(item)
            if sort == EDGE and element.endpoints is None:
                left, right = items[index - 1].variable, items[index + 1].variable
                element.endpoints = (left, right) if item.direction == "right" else (right, left)
    return elements


class GraphConstructor:
    """Builds the result graph of a CONSTRUCT clause"""

    def __init__(self, ctx: EvalContext):
        self.ctx = ctx
        self.expressions = ExpressionEvaluator(ctx)

    def construct(
        self,
        clause: ast.ConstructClause,
        omega: BindingSet,
        graph: PathPropertyGraph,
        match_variables: Set[str],
    ) -> PathPropertyGraph:
        """Union of the basic constructs, each evaluated against the full binding set"""
        ordinal = self.ctx.skolem.next_ordinal()
        parts = [
            self._construct_basic(basic, omega, graph, match_variables, ordinal)
            for basic in clause.constructs
        ]
        result = union_all(parts)
        logger.debug(f"CONSTRUCT result {result.summary()}")
        return result

    def _construct_basic(
        self,
        basic: ast.BasicConstruct,
        omega: BindingSet,
        graph: PathPropertyGraph,
        match_variables: Set[str],
        ordinal: int,
    ) -> PathPropertyGraph:
        references = [
            self.ctx.resolve_graph(item.name) for item in basic.items if isinstance(item, ast.GraphRef)
        ]
        chains = [item for item in basic.items if isinstance(item, ast.ConstructChain)]
        elements = collect_elements(chains)

        rows = list(omega.rows)
        assigned: List[Dict[str, Identifier]] = [{} for _ in rows]
        ordered = (
            [e for e in elements.values() if e.sort == NODE]
            + [e for e in elements.values() if e.sort == EDGE]
            + [e for e in elements.values() if e.sort == PATH]
        )
        for element in ordered:
            for index, row in enumerate(rows):
                ident = self._identify(element, row, assigned[index], graph, match_variables, ordinal)
                if ident is not None:
                    assigned[index][element.variable] = ident

        augmented = [row.merge(extra) for row, extra in zip(rows, assigned)]
        builder = GraphBuilder()
        support: Dict[str, Dict[Identifier, List[int]]] = {}
        for element in ordered:
            members: Dict[Identifier, List[int]] = {}
            for index, extra in enumerate(assigned):
                if element.variable in extra:
                    members.setdefault(extra[element.variable], []).append(index)
            support[element.variable] = members
            for ident, indexes in members.items():
                self._materialize(builder, element, ident, augmented, indexes, graph, match_variables)
            logger.debug(f"CONSTRUCT {element.sort} {element.variable}: {len(members)} objects")

        self._apply_assignments(builder, basic.assignments, support, augmented, graph)
        constructed = builder.build(check=False)

        if basic.when is not None:
            constructed, satisfied = self._filter_when(basic.when, constructed, graph, augmented, assigned)
            if not satisfied:
                references = []

        return union_all([constructed] + references)

    # -- identities ------------------------------------------------------------

    def _group_key(
        self, element: ConstructElement, row: Binding, graph: PathPropertyGraph, match_variables: Set[str]
    ) -> Optional[Tuple[Any, ...]]:
        """Values of the grouping set; None when an explicit group item is unbound"""
        if not element.group:
            return tuple(row.value(name) for name in sorted(match_variables))
        key: List[Any] = []
        for item in element.group:
            value = self.expressions.evaluate(item, row, graph)
            if value is UNBOUND:
                return None
            key.append(value)
        return tuple(key)

    def _identify(
        self,
        element: ConstructElement,
        row: Binding,
        assigned: Dict[str, Identifier],
        graph: PathPropertyGraph,
        match_variables: Set[str],
        ordinal: int,
    ) -> Optional[Identifier]:
        name = element.variable
        bound = name in match_variables
        value = row.value(name)

        if element.sort == NODE:
            if bound:
                return value if isinstance(value, Identifier) and value.kind is IdKind.NODE else None
            key = self._group_key(element, row, graph, match_variables)
            return None if key is None else self.ctx.skolem.new(IdKind.NODE, ordinal, name, key)

        if element.sort == EDGE:
            source, target = (assigned.get(v) for v in element.endpoints)
            if source is None or target is None:
                return None
            if bound:
                if not isinstance(value, Identifier) or value.kind is not IdKind.EDGE:
                    return None
                if graph.endpoints_of(value) != (source, target):
                    logger.debug(f"Edge {value} does not connect {source} to {target}; skipped")
                    return None
                return value
            key = self._group_key(element, row, graph, match_variables) if element.group else ()
            if key is None:
                return None
            return self.ctx.skolem.new(IdKind.EDGE, ordinal, name, source, target, key)

        if isinstance(value, Identifier) and value.kind is IdKind.PATH:
            return value
        return None

    # -- objects ---------------------------------------------------------------

    @staticmethod
    def _copy_annotations(builder: GraphBuilder, target: Identifier, source: Identifier, graph: PathPropertyGraph) -> None:
        builder.add_labels(target, graph.labels_of(source))
        for key in graph.keys_of(source):
            builder.add_values(target, key, graph.values_of(source, key))

    def _copy_body(self, builder: GraphBuilder, body: Tuple[Identifier, ...], graph: PathPropertyGraph) -> None:
        for node in body[0::2]:
            builder.add_node(node)
            self._copy_annotations(builder, node, node, graph)
        for edge in body[1::2]:
            builder.add_edge(edge, *graph.endpoints[edge])
            self._copy_annotations(builder, edge, edge, graph)

    def _materialize(
        self,
        builder: GraphBuilder,
        element: ConstructElement,
        ident: Identifier,
        augmented: List[Binding],
        indexes: List[int],
        graph: PathPropertyGraph,
        match_variables: Set[str],
    ) -> None:
        representative = augmented[indexes[0]]
        bound = element.variable in match_variables
        annotate = True

        if element.sort == NODE:
            builder.add_node(ident)
            if bound:
                self._copy_annotations(builder, ident, ident, graph)
        elif element.sort == EDGE:
            source, target = (representative[v] for v in element.endpoints)
            builder.add_edge(ident, source, target)
            if bound:
                self._copy_annotations(builder, ident, ident, graph)
        else:
            annotate = self._materialize_path(builder, element, ident, graph)

        if not annotate:
            return
        builder.add_labels(ident, element.labels)
        if element.copy_of is not None:
            original = representative.value(element.copy_of)
            if isinstance(original, Identifier):
                self._copy_annotations(builder, ident, original, graph)
        if element.assignments:
            group = BindingSet([augmented[i] for i in indexes])
            for assignment in element.assignments:
                value = self.expressions.evaluate(assignment.value, representative, graph, group)
                builder.set_values(ident, assignment.key, property_values(value))

    def _materialize_path(
        self, builder: GraphBuilder, element: ConstructElement, ident: Identifier, graph: PathPropertyGraph
    ) -> bool:
        """Add a matched path; True when it becomes a stored object that takes annotations"""
        projection = self.ctx.projections.get(ident)
        if projection is not None:
            builder.merge(projection)
            return False
        body = self.ctx.path_body(ident, graph)
        self._copy_body(builder, body, graph)
        if not element.stored:
            return False
        builder.add_path(ident, body)
        if ident in graph.paths:
            self._copy_annotations(builder, ident, ident, graph)
        return True

    def _apply_assignments(
        self,
        builder: GraphBuilder,
        assignments: List[Any],
        support: Dict[str, Dict[Identifier, List[int]]],
        augmented: List[Binding],
        graph: PathPropertyGraph,
    ) -> None:
        """SET assignments first, then REMOVE"""
        setting = [a for a in assignments if isinstance(a, (ast.SetProperty, ast.SetLabel))]
        removing = [a for a in assignments if isinstance(a, (ast.RemoveProperty, ast.RemoveLabel))]
        for assignment in setting + removing:
            for ident, indexes in support.get(assignment.variable, {}).items():
                if isinstance(assignment, ast.SetProperty):
                    group = BindingSet([augmented[i] for i in indexes])
                    value = self.expressions.evaluate(assignment.value, augmented[indexes[0]], graph, group)
                    builder.set_values(ident, assignment.key, property_values(value))
                elif isinstance(assignment, ast.SetLabel):
                    builder.add_labels(ident, [assignment.label])
                elif isinstance(assignment, ast.RemoveProperty):
                    builder.remove_property(ident, assignment.key)
                else:
                    builder.remove_label(ident, assignment.label)

    # -- WHEN ------------------------------------------------------------------

    @staticmethod
    def _overlay(graph: PathPropertyGraph, constructed: PathPropertyGraph) -> PathPropertyGraph:
        """Input graph with the constructed objects on top; constructed values win"""
        builder = GraphBuilder(graph).merge(constructed)
        for ident, properties in constructed.properties.items():
            for key, values in properties.items():
                builder.set_values(ident, key, values)
        return builder.build(check=False)

    def _filter_when(
        self,
        condition: Any,
        constructed: PathPropertyGraph,
        graph: PathPropertyGraph,
        augmented: List[Binding],
        assigned: List[Dict[str, Identifier]],
    ) -> Tuple[PathPropertyGraph, bool]:
        """Keep the objects supported by at least one binding satisfying WHEN;
        the flag tells whether any binding did"""
        overlay = self._overlay(graph, constructed)
        everything = BindingSet(augmented)
        keep: Set[Identifier] = set()
        satisfied = False
        for binding, extra in zip(augmented, assigned):
            if not self.expressions.holds(condition, binding, overlay, everything):
                continue
            satisfied = True
            for ident in extra.values():
                keep.add(ident)
                if ident.kind is not IdKind.PATH:
                    continue
                projection = self.ctx.projections.get(ident)
                if projection is not None:
                    keep.update(projection.nodes | projection.edges)
                else:
                    keep.update(self.ctx.path_body(ident, graph))
        nodes = constructed.nodes & keep
        edges = {
            e for e in constructed.edges & keep
            if all(end in nodes for end in constructed.endpoints[e])
        }
        paths = {
            p for p in constructed.paths & keep
            if all(x in nodes or x in edges for x in constructed.bodies[p])
        }
        logger.debug(f"WHEN keeps {len(nodes)} nodes, {len(edges)} edges, {len(paths)} paths")
        return constructed.restrict(nodes, edges, paths), satisfied


def evaluate_construct(
    clause: ast.ConstructClause,
    omega: BindingSet,
    graph: PathPropertyGraph,
    match_variables: Set[str],
    ctx: EvalContext,
) -> PathPropertyGraph:
    return GraphConstructor(ctx).construct(clause, omega, graph, match_variables)
