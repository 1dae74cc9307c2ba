"""Bindings, binding sets and the binding-table algebra"""

import logging
from typing import (
    Any,
    Callable,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)

from tabulate import tabulate

from .values import UNBOUND, format_value, to_json, value_key

logger = logging.getLogger(__name__)


def _tagged(value: Any) -> Tuple[bool, Any]:
    return (isinstance(value, bool), value)


class Binding(Mapping[str, Any]):
    """Immutable partial map from variables to identifiers or values

    A variable outside the domain is unbound; UNBOUND is never stored.
    """

    __slots__ = ("_items", "_key", "_hash")

    def __init__(self, items: Optional[Mapping[str, Any]] = None):
        self._items: Dict[str, Any] = {
            k: v for k, v in (items or {}).items() if v is not UNBOUND
        }
        self._key = tuple((k, _tagged(self._items[k])) for k in sorted(self._items))
        self._hash = hash(self._key)

    def __getitem__(self, name: str) -> Any:
        return self._items[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Binding):
            return self._key == other._key
        if isinstance(other, Mapping):
            return self == Binding(other)
        return NotImplemented

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}->{format_value(self._items[k])}" for k in sorted(self._items))
        return f"{{{inner}}}"

    @property
    def domain(self) -> FrozenSet[str]:
        return frozenset(self._items)

    def value(self, name: str) -> Any:
        return self._items.get(name, UNBOUND)

    def merge(self, other: Mapping[str, Any]) -> "Binding":
        merged = dict(self._items)
        merged.update(other)
        return Binding(merged)

    def extend(self, name: str, value: Any) -> "Binding":
        return self.merge({name: value})

    def project(self, names: Iterable[str]) -> "Binding":
        keep = set(names)
        return Binding({k: v for k, v in self._items.items() if k in keep})

    def sort_key(self, variables: Sequence[str]) -> Tuple:
        return tuple(
            (1, value_key(self._items[v])) if v in self._items else (0,) for v in variables
        )


EMPTY_BINDING = Binding()


def compatible(first: Mapping[str, Any], second: Mapping[str, Any]) -> bool:
    """Shared bound variables agree"""
    if len(second) < len(first):
        first, second = second, first
    for name, value in first.items():
        if name in second and _tagged(second[name]) != _tagged(value):
            return False
    return True


class BindingSet:
    """Duplicate-free set of bindings over a variable universe, kept in a
    deterministic order (sorted by variable name, then value order)"""

    def __init__(self, rows: Iterable[Mapping[str, Any]] = (), variables: Iterable[str] = ()):
        unique: Dict[Binding, None] = {}
        universe = set(variables)
        for row in rows:
            binding = row if isinstance(row, Binding) else Binding(row)
            unique.setdefault(binding, None)
            universe.update(binding.domain)
        self.variables: Tuple[str, ...] = tuple(sorted(universe))
        self.rows: Tuple[Binding, ...] = tuple(
            sorted(unique, key=lambda b: b.sort_key(self.variables))
        )

    @classmethod
    def unit(cls) -> "BindingSet":
        """{mu_empty}, the identity of join"""
        return cls([EMPTY_BINDING])

    @classmethod
    def empty(cls, variables: Iterable[str] = ()) -> "BindingSet":
        return cls([], variables)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[Binding]:
        return iter(self.rows)

    def __contains__(self, row: object) -> bool:
        if isinstance(row, Mapping):
            return Binding(row) in set(self.rows)
        return False

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BindingSet):
            return NotImplemented
        return set(self.rows) == set(other.rows)

    def __hash__(self) -> int:
        return hash(frozenset(self.rows))

    def __repr__(self) -> str:
        return f"BindingSet({len(self.rows)} rows over {list(self.variables)})"

    def always_bound(self) -> FrozenSet[str]:
        """Variables bound in every row"""
        if not self.rows:
            return frozenset(self.variables)
        common = set(self.rows[0].domain)
        for row in self.rows[1:]:
            common &= row.domain
        return frozenset(common)

    # -- relational helpers --------------------------------------------------

    def select(self, predicate: Callable[[Binding], bool]) -> "BindingSet":
        return BindingSet((r for r in self.rows if predicate(r)), self.variables)

    def project(self, names: Iterable[str]) -> "BindingSet":
        keep = [v for v in self.variables if v in set(names)]
        return BindingSet((r.project(keep) for r in self.rows), keep)

    def values_of(self, name: str) -> List[Any]:
        """Distinct bound values of a variable, in binding order"""
        seen: Dict[Tuple[bool, Any], Any] = {}
        for row in self.rows:
            if name in row:
                seen.setdefault(_tagged(row[name]), row[name])
        return list(seen.values())

    # -- rendering -----------------------------------------------------------

    def to_table(self, variables: Optional[Sequence[str]] = None, tablefmt: str = "simple") -> str:
        """Aligned text table; anonymous variables are hidden by default"""
        columns = list(variables) if variables is not None else [
            v for v in self.variables if not v.startswith("_anon")
        ]
        body = [
            [format_value(row.value(v)) if v in row else "" for v in columns]
            for row in self.rows
        ]
        return tabulate(body, headers=columns, tablefmt=tablefmt)

    def to_records(self) -> List[Dict[str, Any]]:
        return [{k: to_json(row[k]) for k in sorted(row)} for row in self.rows]


# ---------------------------------------------------------------------------
# Algebra
# ---------------------------------------------------------------------------


def _join_rows(left: BindingSet, right: BindingSet) -> List[Binding]:
    keys = sorted(left.always_bound() & right.always_bound())
    buckets: Dict[Tuple, List[Binding]] = {}
    for row in right.rows:
        buckets.setdefault(tuple(_tagged(row[k]) for k in keys), []).append(row)
    joined: List[Binding] = []
    for row in left.rows:
        for candidate in buckets.get(tuple(_tagged(row[k]) for k in keys), []):
            if compatible(row, candidate):
                joined.append(row.merge(candidate))
    return joined


def join(left: BindingSet, right: BindingSet) -> BindingSet:
    """Omega1 join Omega2: merges of every compatible pair"""
    result = BindingSet(_join_rows(left, right), left.variables + right.variables)
    logger.debug(f"join {len(left)} x {len(right)} -> {len(result)}")
    return result


def union(left: BindingSet, right: BindingSet) -> BindingSet:
    return BindingSet(left.rows + right.rows, left.variables + right.variables)


def semijoin(left: BindingSet, right: BindingSet) -> BindingSet:
    """Rows of left compatible with at least one row of right"""
    return BindingSet(
        (r for r in left.rows if any(compatible(r, s) for s in right.rows)), left.variables
    )


def antijoin(left: BindingSet, right: BindingSet) -> BindingSet:
    """Rows of left compatible with no row of right"""
    return BindingSet(
        (r for r in left.rows if not any(compatible(r, s) for s in right.rows)), left.variables
    )


def left_outer_join(left: BindingSet, right: BindingSet) -> BindingSet:
    """(Omega1 join Omega2) union (Omega1 antijoin Omega2)"""
    preserved = antijoin(left, right)
    return BindingSet(
        _join_rows(left, right) + list(preserved.rows), left.variables + right.variables
    )


def group_by(omega: BindingSet, names: Iterable[str]) -> List[BindingSet]:
    """Equivalence classes of rows agreeing on every grouping variable

    Rows leaving a grouping variable unbound group together on that variable.
    Classes come out in the order of their first row.
    """
    keys = sorted(set(names))
    classes: Dict[Tuple, List[Binding]] = {}
    for row in omega.rows:
        key = tuple(_tagged(row.value(k)) if k in row else (None, UNBOUND) for k in keys)
        classes.setdefault(key, []).append(row)
    return [BindingSet(rows, omega.variables) for rows in classes.values()]
