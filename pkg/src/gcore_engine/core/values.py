"""Value domain of query expressions

Values are Python scalars (int, float, str, bool), graph Identifiers, value
sets (frozenset), value lists (tuple) and the UNBOUND marker. Property
lookups always produce sets; operators coerce singleton sets to scalars where
a scalar is expected.
"""

import logging
import math
from datetime import date
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Optional, Tuple

from ..graph.model import Identifier
from ..utils.errors import DivisionByZeroError, ExpressionTypeError

logger = logging.getLogger(__name__)


class _Unbound:
    """Marker for an unbound variable or a missing result"""

    _instance: Optional["_Unbound"] = None

    def __new__(cls) -> "_Unbound":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __bool__(self) -> bool:
        return False

    def __repr__(self) -> str:
        return "UNBOUND"

    def __reduce__(self):
        return (_Unbound, ())


UNBOUND = _Unbound()


def is_unbound(value: Any) -> bool:
    return value is UNBOUND


def is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


# ---------------------------------------------------------------------------
# Ordering and identity of values
# ---------------------------------------------------------------------------


def _type_rank(value: Any) -> int:
    if value is UNBOUND:
        return 0
    if isinstance(value, bool):
        return 1
    if is_number(value):
        return 2
    if isinstance(value, str):
        return 3
    if isinstance(value, Identifier):
        return 4
    if isinstance(value, tuple):
        return 5
    return 6


def value_key(value: Any) -> Tuple:
    """Total, deterministic sort key across all value kinds"""
    rank = _type_rank(value)
    if rank == 0:
        return (0,)
    if rank == 4:
        return (4, value.sort_key())
    if rank == 5:
        return (5, tuple(value_key(v) for v in value))
    if rank == 6:
        return (6, tuple(sorted(value_key(v) for v in value)))
    if rank == 2 and math.isnan(value):
        return (2, float("inf"), 1)
    return (rank, value)


def _tag(value: Any) -> Tuple[int, Any]:
    """Hashable identity keeping True apart from 1"""
    return (1 if isinstance(value, bool) else 0, value)


def _tagged(values: Iterable[Any]) -> FrozenSet[Tuple[int, Any]]:
    return frozenset(_tag(v) for v in values)


def sorted_values(values: Iterable[Any]) -> List[Any]:
    return sorted(values, key=value_key)


# ---------------------------------------------------------------------------
# Coercions
# ---------------------------------------------------------------------------


def as_set(value: Any) -> FrozenSet[Any]:
    """Scalars become singleton sets; UNBOUND becomes the empty set"""
    if value is UNBOUND:
        return frozenset()
    if isinstance(value, frozenset):
        return value
    if isinstance(value, tuple):
        return frozenset(value)
    return frozenset([value])


def singleton(value: Any, operator: str = "") -> Any:
    """Scalar view of a value; empty sets are UNBOUND and larger sets are errors"""
    if isinstance(value, frozenset):
        if not value:
            return UNBOUND
        if len(value) > 1:
            raise ExpressionTypeError(
                f"operator {operator} expects a single value, got a set of {len(value)}"
            )
        return next(iter(value))
    return value


def truthy(value: Any) -> bool:
    """Only TRUE (or the set {TRUE}) passes a condition"""
    if isinstance(value, frozenset) and len(value) == 1:
        value = next(iter(value))
    return value is True


# ---------------------------------------------------------------------------
# Comparisons
# ---------------------------------------------------------------------------


def compare_multi_valued(op: str, lhs: Any, rhs: Any) -> bool:
    """=, IN and SUBSET OF over multi-valued operands"""
    if lhs is UNBOUND or rhs is UNBOUND:
        return False
    if op == "=":
        return _tagged(as_set(lhs)) == _tagged(as_set(rhs))
    if op == "IN":
        left = as_set(lhs)
        if len(left) != 1:
            return False
        return _tag(next(iter(left))) in _tagged(as_set(rhs))
    if op == "SUBSET OF":
        return _tagged(as_set(lhs)) <= _tagged(as_set(rhs))
    raise ExpressionTypeError(f"unknown multi-valued operator {op}")


def _comparable(left: Any, right: Any) -> bool:
    if is_number(left) and is_number(right):
        return True
    for kind in (bool, str, Identifier, tuple):
        if isinstance(left, kind) and isinstance(right, kind):
            return True
    return False


_ORDERINGS: Dict[str, Callable[[Any, Any], bool]] = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def compare_ordered(op: str, lhs: Any, rhs: Any) -> Any:
    """<, <=, >, >= on single values; UNBOUND when either side has no value"""
    left, right = singleton(lhs, op), singleton(rhs, op)
    if left is UNBOUND or right is UNBOUND:
        return UNBOUND
    if not _comparable(left, right):
        raise ExpressionTypeError(
            f"cannot compare {type(left).__name__} and {type(right).__name__} with {op}"
        )
    return _ORDERINGS[op](left, right)


def compare(op: str, lhs: Any, rhs: Any) -> Any:
    if op in ("=", "IN", "SUBSET OF"):
        if lhs is UNBOUND or rhs is UNBOUND:
            return UNBOUND
        return compare_multi_valued(op, lhs, rhs)
    if op == "<>":
        if lhs is UNBOUND or rhs is UNBOUND:
            return UNBOUND
        return not compare_multi_valued("=", lhs, rhs)
    return compare_ordered(op, lhs, rhs)


# ---------------------------------------------------------------------------
# Logic and arithmetic
# ---------------------------------------------------------------------------


def logical_not(value: Any) -> Any:
    if value is UNBOUND:
        return UNBOUND
    return not truthy(value)


def logical_and(lhs: Any, rhs: Any) -> bool:
    return truthy(lhs) and truthy(rhs)


def logical_or(lhs: Any, rhs: Any) -> bool:
    return truthy(lhs) or truthy(rhs)


def _type_error(op: str, left: Any, right: Any) -> ExpressionTypeError:
    return ExpressionTypeError(
        f"unsupported operand types for {op}: {type(left).__name__} and {type(right).__name__}"
    )


def arithmetic(op: str, lhs: Any, rhs: Any) -> Any:
    left, right = singleton(lhs, op), singleton(rhs, op)
    if left is UNBOUND or right is UNBOUND:
        return UNBOUND
    if op == "+":
        if isinstance(left, str) and isinstance(right, str):
            return left + right
        if isinstance(left, tuple) and isinstance(right, tuple):
            return left + right
    if not (is_number(left) and is_number(right)):
        raise _type_error(op, left, right)
    if op == "+":
        return left + right
    if op == "-":
        return left - right
    if op == "*":
        return left * right
    if right == 0:
        raise DivisionByZeroError(f"division by zero in {left} {op} {right}")
    if op == "/":
        return left / right
    if op == "%":
        return left % right
    raise ExpressionTypeError(f"unknown arithmetic operator {op}")


def negate(value: Any) -> Any:
    operand = singleton(value, "-")
    if operand is UNBOUND:
        return UNBOUND
    if not is_number(operand):
        raise ExpressionTypeError(f"cannot negate {type(operand).__name__}")
    return -operand


def index_value(target: Any, index: Any) -> Any:
    """0-based list indexing; out of range is UNBOUND"""
    position = singleton(index, "[]")
    if target is UNBOUND or position is UNBOUND:
        return UNBOUND
    if not isinstance(position, int) or isinstance(position, bool):
        raise ExpressionTypeError(f"list index must be an integer, got {position!r}")
    if isinstance(target, frozenset):
        target = tuple(sorted_values(target))
    if not isinstance(target, (tuple, str)):
        raise ExpressionTypeError(f"cannot index {type(target).__name__}")
    if -len(target) <= position < len(target):
        return target[position]
    return UNBOUND


# ---------------------------------------------------------------------------
# Scalar built-in functions
# ---------------------------------------------------------------------------


def _size(value: Any) -> int:
    if value is UNBOUND:
        return 0
    if isinstance(value, (frozenset, tuple, str)):
        return len(value)
    return 1


def _to_string(value: Any) -> Any:
    value = singleton(value, "toString")
    if value is UNBOUND:
        return UNBOUND
    return format_value(value)


def _to_integer(value: Any) -> Any:
    value = singleton(value, "toInteger")
    if value is UNBOUND:
        return UNBOUND
    try:
        if isinstance(value, str):
            return int(float(value)) if "." in value or "e" in value.lower() else int(value)
        if isinstance(value, bool) or is_number(value):
            return int(value)
    except ValueError:
        raise ExpressionTypeError(f"cannot convert {value!r} to an integer")
    raise ExpressionTypeError(f"cannot convert {type(value).__name__} to an integer")


def _to_float(value: Any) -> Any:
    value = singleton(value, "toFloat")
    if value is UNBOUND:
        return UNBOUND
    try:
        if isinstance(value, (str, int, float)):
            return float(value)
    except ValueError:
        raise ExpressionTypeError(f"cannot convert {value!r} to a float")
    raise ExpressionTypeError(f"cannot convert {type(value).__name__} to a float")


def _to_boolean(value: Any) -> Any:
    value = singleton(value, "toBoolean")
    if value is UNBOUND or isinstance(value, bool):
        return value
    if isinstance(value, str) and value.lower() in ("true", "false"):
        return value.lower() == "true"
    raise ExpressionTypeError(f"cannot convert {value!r} to a boolean")


def _to_date(value: Any) -> Any:
    value = singleton(value, "toDate")
    if value is UNBOUND:
        return UNBOUND
    if not isinstance(value, str):
        raise ExpressionTypeError(f"toDate expects an ISO-8601 string, got {value!r}")
    try:
        return date.fromisoformat(value[:10]).isoformat()
    except ValueError:
        raise ExpressionTypeError(f"invalid date {value!r}")


def _string_function(name: str, func: Callable[[str], str]) -> Callable[[Any], Any]:
    def apply(value: Any) -> Any:
        value = singleton(value, name)
        if value is UNBOUND:
            return UNBOUND
        if not isinstance(value, str):
            raise ExpressionTypeError(f"{name} expects a string, got {type(value).__name__}")
        return func(value)

    return apply


def _substring(value: Any, start: Any, length: Any = None) -> Any:
    value, start = singleton(value, "substring"), singleton(start, "substring")
    if value is UNBOUND or start is UNBOUND:
        return UNBOUND
    if not isinstance(value, str) or not isinstance(start, int):
        raise ExpressionTypeError("substring expects (string, integer[, integer])")
    if length is None:
        return value[start:]
    length = singleton(length, "substring")
    if not isinstance(length, int):
        raise ExpressionTypeError("substring length must be an integer")
    return value[start:start + length]


def _concat(*values: Any) -> Any:
    parts = [singleton(v, "concat") for v in values]
    if any(p is UNBOUND for p in parts):
        return UNBOUND
    return "".join(p if isinstance(p, str) else format_value(p) for p in parts)


SCALAR_FUNCTIONS: Dict[str, Callable[..., Any]] = {
    "size": _size,
    "tostring": _to_string,
    "tointeger": _to_integer,
    "tofloat": _to_float,
    "toboolean": _to_boolean,
    "todate": _to_date,
    "upper": _string_function("upper", str.upper),
    "lower": _string_function("lower", str.lower),
    "trim": _string_function("trim", str.strip),
    "substring": _substring,
    "concat": _concat,
}

# (minimum, maximum) argument counts; None means unbounded
FUNCTION_ARITY: Dict[str, Tuple[int, Optional[int]]] = {
    name: (1, 1) for name in SCALAR_FUNCTIONS
}
FUNCTION_ARITY.update(substring=(2, 3), concat=(1, None))


def check_arity(name: str, count: int) -> None:
    low, high = FUNCTION_ARITY[name]
    if count < low or (high is not None and count > high):
        expected = str(low) if low == high else f"{low}+" if high is None else f"{low}-{high}"
        raise ExpressionTypeError(f"{name} takes {expected} argument(s), got {count}")


# ---------------------------------------------------------------------------
# Aggregates
# ---------------------------------------------------------------------------


def _flatten(values: Iterable[Any]) -> List[Any]:
    flat: List[Any] = []
    for value in values:
        if value is UNBOUND:
            continue
        if isinstance(value, frozenset):
            flat.extend(sorted_values(value))
        else:
            flat.append(value)
    return flat


def _distinct(values: List[Any]) -> List[Any]:
    seen = set()
    unique = []
    for value in values:
        if _tag(value) not in seen:
            seen.add(_tag(value))
            unique.append(value)
    return unique


def aggregate(
    function: str, values: Optional[List[Any]], distinct: bool = False, group_size: int = 0
) -> Any:
    """Fold per-binding results of a group; values None means COUNT(*)"""
    if function == "COUNT" and values is None:
        return group_size
    flat = _flatten(values)
    if distinct:
        flat = _distinct(flat)
    if function == "COUNT":
        return len(flat)
    if function == "COLLECT":
        return tuple(flat)
    if not flat:
        return UNBOUND
    if function in ("SUM", "AVG"):
        if not all(is_number(v) for v in flat):
            raise ExpressionTypeError(f"{function} over non-numeric values")
        total = sum(flat)
        return total if function == "SUM" else total / len(flat)
    if function in ("MIN", "MAX"):
        first = flat[0]
        if not all(_comparable(first, v) for v in flat):
            raise ExpressionTypeError(f"{function} over values of mixed types")
        return min(flat) if function == "MIN" else max(flat)
    raise ExpressionTypeError(f"unknown aggregate {function}")


# ---------------------------------------------------------------------------
# Display and JSON
# ---------------------------------------------------------------------------


def format_value(value: Any) -> str:
    """Singleton sets print without braces"""
    if value is UNBOUND:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, frozenset):
        if len(value) == 1:
            return format_value(next(iter(value)))
        return "{" + ", ".join(format_value(v) for v in sorted_values(value)) + "}"
    if isinstance(value, tuple):
        return "[" + ", ".join(format_value(v) for v in value) + "]"
    return str(value)


def to_json(value: Any) -> Any:
    if value is UNBOUND:
        return None
    if isinstance(value, Identifier):
        return str(value)
    if isinstance(value, frozenset):
        return [to_json(v) for v in sorted_values(value)]
    if isinstance(value, tuple):
        return [to_json(v) for v in value]
    return value


def property_values(value: Any) -> FrozenSet[Any]:
    """Value set stored by an assignment; lists and sets flatten, UNBOUND clears"""
    if value is UNBOUND:
        return frozenset()
    if isinstance(value, (frozenset, tuple)):
        return frozenset(v for v in value if v is not UNBOUND)
    return frozenset([value])
