"""Label regular expressions compiled to Thompson automata

Edge symbols consume one edge of a walk; node tests (``[:Label]``) check the
node at the current position without consuming anything, so every edge
symbol is implicitly flanked by wildcard node positions.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from ..graph.model import Identifier, PathPropertyGraph
from ..parsers import ast
from ..utils.errors import UnknownPathError

logger = logging.getLogger(__name__)

EPSILON = "eps"
NODE_TEST = "node"
FORWARD = "forward"
INVERSE = "inverse"
ANY_EDGE = "any"
VIEW = "view"

CONSUMING = (FORWARD, INVERSE, ANY_EDGE, VIEW)


@dataclass(frozen=True)
class Transition:
    kind: str
    target: int
    label: Optional[str] = None


@dataclass
class PathAutomaton:
    """Nondeterministic automaton with epsilon and node-test moves"""

    start: int = 0
    accept: FrozenSet[int] = frozenset()
    transitions: Dict[int, List[Transition]] = field(default_factory=dict)
    state_count: int = 0

    def new_state(self) -> int:
        state = self.state_count
        self.state_count += 1
        self.transitions.setdefault(state, [])
        return state

    def add(self, source: int, kind: str, target: int, label: Optional[str] = None) -> None:
        self.transitions.setdefault(source, []).append(Transition(kind, target, label))

    def moves(self, state: int) -> List[Transition]:
        return self.transitions.get(state, [])

    def views(self) -> Set[str]:
        return {
            t.label for ts in self.transitions.values() for t in ts if t.kind == VIEW and t.label
        }

    def closure(self, states: Iterable[int], labels: FrozenSet[str]) -> FrozenSet[int]:
        """States reachable through epsilon moves and node tests passed by labels"""
        seen: Set[int] = set(states)
        stack = list(seen)
        while stack:
            state = stack.pop()
            for move in self.moves(state):
                if move.target in seen:
                    continue
                if move.kind == EPSILON or (move.kind == NODE_TEST and move.label in labels):
                    seen.add(move.target)
                    stack.append(move.target)
        return frozenset(seen)

    def accepts_at(self, state: int, labels: FrozenSet[str]) -> bool:
        return bool(self.closure([state], labels) & self.accept)


@dataclass
class _Fragment:
    start: int
    end: int


class AutomatonCompiler:
    """Thompson construction over the regex AST"""

    def __init__(self, known_views: Optional[Iterable[str]] = None):
        self.known_views = set(known_views) if known_views is not None else None

    def compile(self, regex: Optional[object]) -> PathAutomaton:
        automaton = PathAutomaton()
        if regex is None:
            fragment = self._build(automaton, ast.RegexStar(inner=ast.RegexWildcard()))
        else:
            fragment = self._build(automaton, regex)
        automaton.start = fragment.start
        automaton.accept = frozenset([fragment.end])
        logger.debug(f"Compiled path automaton with {automaton.state_count} states")
        return automaton

    def _symbol(self, automaton: PathAutomaton, kind: str, label: Optional[str]) -> _Fragment:
        start, end = automaton.new_state(), automaton.new_state()
        automaton.add(start, kind, end, label)
        return _Fragment(start, end)

    def _build(self, automaton: PathAutomaton, node: object) -> _Fragment:
        if isinstance(node, ast.RegexWildcard):
            return self._symbol(automaton, ANY_EDGE, None)
        if isinstance(node, ast.RegexEdge):
            return self._symbol(automaton, INVERSE if node.inverse else FORWARD, node.label)
        if isinstance(node, ast.RegexNode):
            return self._symbol(automaton, NODE_TEST, node.label)
        if isinstance(node, ast.RegexView):
            if self.known_views is not None and node.name not in self.known_views:
                raise UnknownPathError(f"unknown path view ~{node.name}")
            return self._symbol(automaton, VIEW, node.name)
        if isinstance(node, ast.RegexConcatenation):
            parts = [self._build(automaton, p) for p in node.parts]
            for left, right in zip(parts, parts[1:]):
                automaton.add(left.end, EPSILON, right.start)
            return _Fragment(parts[0].start, parts[-1].end)
        if isinstance(node, ast.RegexAlternation):
            start, end = automaton.new_state(), automaton.new_state()
            for option in node.options:
                inner = self._build(automaton, option)
                automaton.add(start, EPSILON, inner.start)
                automaton.add(inner.end, EPSILON, end)
            return _Fragment(start, end)
        if isinstance(node, ast.RegexStar):
            start, end = automaton.new_state(), automaton.new_state()
            inner = self._build(automaton, node.inner)
            automaton.add(start, EPSILON, inner.start)
            automaton.add(start, EPSILON, end)
            automaton.add(inner.end, EPSILON, inner.start)
            automaton.add(inner.end, EPSILON, end)
            return _Fragment(start, end)
        raise TypeError(f"not a regular expression node: {node!r}")


def compile_regex(regex: Optional[object], known_views: Optional[Iterable[str]] = None) -> PathAutomaton:
    """Compile a regex AST; None means any walk (``_*``)"""
    return AutomatonCompiler(known_views).compile(regex)


def edge_moves(
    graph: PathPropertyGraph, node: Identifier, move: Transition
) -> List[Tuple[int, Identifier, Identifier]]:
    """(direction rank, edge, next node) for each edge the move can consume at node"""
    steps: List[Tuple[int, Identifier, Identifier]] = []
    if move.kind in (FORWARD, ANY_EDGE):
        for edge, target in graph.outgoing.get(node, []):
            if move.kind == ANY_EDGE or move.label in graph.labels_of(edge):
                steps.append((0, edge, target))
    if move.kind in (INVERSE, ANY_EDGE):
        for edge, source in graph.incoming.get(node, []):
            if move.kind == ANY_EDGE or move.label in graph.labels_of(edge):
                steps.append((1, edge, source))
    return steps


def conforms(graph: PathPropertyGraph, body: Sequence[Identifier], automaton: PathAutomaton) -> bool:
    """Whether the walk body spells a word of the automaton's language

    Path-view symbols never match inside a concrete body.
    """
    if not body:
        return False
    current = automaton.closure([automaton.start], graph.labels_of(body[0]))
    for index in range(1, len(body), 2):
        edge, here, there = body[index], body[index - 1], body[index + 1]
        ends = graph.endpoints_of(edge)
        if ends is None:
            return False
        following: Set[int] = set()
        for state in current:
            for move in automaton.moves(state):
                if move.kind not in (FORWARD, INVERSE, ANY_EDGE):
                    continue
                if any(e == edge and nxt == there for _, e, nxt in edge_moves(graph, here, move)):
                    following.add(move.target)
        if not following:
            return False
        current = automaton.closure(following, graph.labels_of(there))
    return bool(current & automaton.accept)
