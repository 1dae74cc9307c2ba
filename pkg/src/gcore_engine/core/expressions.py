"""Expression evaluation over a binding and a graph"""

import logging
from typing import Any, Callable, Dict, List, Optional

from ..graph.model import IdKind, Identifier, PathPropertyGraph
from ..parsers import ast
from ..utils.errors import EvaluationError, ExpressionTypeError
from .bindings import Binding, BindingSet
from .values import (
    SCALAR_FUNCTIONS,
    UNBOUND,
    aggregate,
    arithmetic,
    check_arity,
    compare,
    index_value,
    logical_not,
    negate,
    truthy,
)

logger = logging.getLogger(__name__)

COMPARISONS = {"=", "<>", "<", "<=", ">", ">=", "IN", "SUBSET OF"}
ARITHMETIC = {"+", "-", "*", "/", "%"}


def _identifier(value: Any, function: str) -> Any:
    if isinstance(value, frozenset) and len(value) == 1:
        value = next(iter(value))
    if value is UNBOUND or isinstance(value, Identifier):
        return value
    raise ExpressionTypeError(f"{function} expects a graph object, got {value!r}")


class ExpressionEvaluator:
    """Evaluates expression ASTs; aggregates need the group of the binding"""

    def __init__(self, ctx: Any):
        self.ctx = ctx
        self._handlers: Dict[str, Callable[..., Any]] = {
            "literal": self._literal,
            "list": self._list,
            "set": self._set,
            "variable": self._variable,
            "property": self._property,
            "label_test": self._label_test,
            "unary": self._unary,
            "binary": self._binary,
            "call": self._call,
            "aggregate": self._aggregate,
            "exists": self._exists,
            "case": self._case,
            "index": self._index,
        }

    def evaluate(
        self,
        expr: Any,
        binding: Binding,
        graph: PathPropertyGraph,
        group: Optional[BindingSet] = None,
    ) -> Any:
        handler = self._handlers.get(expr.kind)
        if handler is None:
            raise EvaluationError(f"cannot evaluate expression of kind {expr.kind}")
        return handler(expr, binding, graph, group)

    def holds(
        self,
        expr: Any,
        binding: Binding,
        graph: PathPropertyGraph,
        group: Optional[BindingSet] = None,
    ) -> bool:
        """A condition holds only when it evaluates to exactly TRUE"""
        return truthy(self.evaluate(expr, binding, graph, group))

    # -- leaves ----------------------------------------------------------------

    def _literal(self, expr: ast.LiteralExpr, binding, graph, group) -> Any:
        return UNBOUND if expr.value is None else expr.value

    def _list(self, expr: ast.ListExpr, binding, graph, group) -> Any:
        return tuple(self.evaluate(item, binding, graph, group) for item in expr.items)

    def _set(self, expr: ast.SetExpr, binding, graph, group) -> Any:
        values: List[Any] = []
        for item in expr.items:
            value = self.evaluate(item, binding, graph, group)
            if isinstance(value, frozenset):
                values.extend(value)
            elif value is not UNBOUND:
                values.append(value)
        return frozenset(values)

    def _variable(self, expr: ast.VariableExpr, binding, graph, group) -> Any:
        return binding.value(expr.name)

    def _property(self, expr: ast.PropertyExpr, binding, graph, group) -> Any:
        target = binding.value(expr.variable)
        if target is UNBOUND:
            return UNBOUND
        if not isinstance(target, Identifier):
            raise ExpressionTypeError(
                f"{expr.variable}.{expr.key}: {expr.variable} is a value, not a graph object"
            )
        return graph.values_of(target, expr.key)

    def _label_test(self, expr: ast.LabelTestExpr, binding, graph, group) -> Any:
        target = binding.value(expr.variable)
        if target is UNBOUND:
            return UNBOUND
        if not isinstance(target, Identifier):
            raise ExpressionTypeError(f"label test on value variable {expr.variable}")
        labels = graph.labels_of(target)
        return all(any(label in labels for label in options) for options in expr.labels)

    # -- operators -------------------------------------------------------------

    def _unary(self, expr: ast.UnaryExpr, binding, graph, group) -> Any:
        operand = self.evaluate(expr.operand, binding, graph, group)
        if expr.op == "NOT":
            return logical_not(operand)
        return negate(operand)

    def _binary(self, expr: ast.BinaryExpr, binding, graph, group) -> Any:
        if expr.op == "AND":
            if not self.holds(expr.left, binding, graph, group):
                return False
            return self.holds(expr.right, binding, graph, group)
        if expr.op == "OR":
            if self.holds(expr.left, binding, graph, group):
                return True
            return self.holds(expr.right, binding, graph, group)
        left = self.evaluate(expr.left, binding, graph, group)
        right = self.evaluate(expr.right, binding, graph, group)
        if expr.op in COMPARISONS:
            return compare(expr.op, left, right)
        if expr.op in ARITHMETIC:
            return arithmetic(expr.op, left, right)
        raise EvaluationError(f"unknown operator {expr.op}")

    def _index(self, expr: ast.IndexExpr, binding, graph, group) -> Any:
        return index_value(
            self.evaluate(expr.target, binding, graph, group),
            self.evaluate(expr.index, binding, graph, group),
        )

    def _case(self, expr: ast.CaseExpr, binding, graph, group) -> Any:
        for branch in expr.branches:
            if self.holds(branch.condition, binding, graph, group):
                return self.evaluate(branch.result, binding, graph, group)
        if expr.default is not None:
            return self.evaluate(expr.default, binding, graph, group)
        return UNBOUND

    # -- functions -------------------------------------------------------------

    def _call(self, expr: ast.FunctionCallExpr, binding, graph, group) -> Any:
        args = [self.evaluate(arg, binding, graph, group) for arg in expr.args]
        name = expr.name.lower()
        if name in ("labels", "nodes", "edges", "length"):
            if len(args) != 1:
                raise ExpressionTypeError(f"{name} takes exactly one argument")
            return self._graph_function(name, args[0], graph)
        function = SCALAR_FUNCTIONS.get(name)
        if function is None:
            raise ExpressionTypeError(f"unknown function {expr.name}")
        check_arity(name, len(args))
        try:
            return function(*args)
        except TypeError as e:
            raise ExpressionTypeError(f"{expr.name}: {e}") from e

    def _graph_function(self, name: str, argument: Any, graph: PathPropertyGraph) -> Any:
        target = _identifier(argument, name)
        if target is UNBOUND:
            return UNBOUND
        if name == "labels":
            return graph.labels_of(target)
        if target.kind is not IdKind.PATH:
            raise ExpressionTypeError(f"{name} expects a path, got {target.kind.value} {target}")
        body = self.ctx.path_body(target, graph)
        if name == "nodes":
            return tuple(body[0::2])
        if name == "edges":
            return tuple(body[1::2])
        return len(body) // 2

    def _aggregate(self, expr: ast.AggregateExpr, binding, graph, group) -> Any:
        if group is None:
            raise EvaluationError(f"{expr.function} is only allowed in CONSTRUCT assignments")
        if expr.argument is None:
            return aggregate("COUNT", None, group_size=len(group))
        values = [self.evaluate(expr.argument, row, graph) for row in group]
        return aggregate(expr.function, values, distinct=expr.distinct, group_size=len(group))

    def _exists(self, expr: ast.ExistsExpr, binding, graph, group) -> Any:
        from .engine import evaluate_exists

        return evaluate_exists(expr.query, binding, graph, self.ctx)
