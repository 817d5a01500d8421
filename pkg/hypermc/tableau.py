"""
Two-way tableau automata for quantifier-free QPTL (PLTL with past) in NNF.

A tableau node stands for one position j of a pointed word. It records the
formulas it has decided, each with a truth value, and the demands it puts on
its neighbours: ``after`` on position j+1, ``before`` on position j-1. A
``before`` demand is strong when it needs position j-1 to exist (Yφ, the
recursive half of S) and weak when it also holds at the origin (¬Yφ, the
recursive half of the past release).

Nodes are produced on demand:

- the roots sit at the pointed position and make the formula true;
- a forward successor meets the ``after`` demands of its predecessor, and
  every ``before`` demand it raises is checked against that predecessor;
- a backward predecessor meets the ``before`` demands of its successor, and
  every ``after`` demand it raises is checked against that successor.

Apart from what its own formulas need, a forward node decides each formula
its successor could ask about (arguments of Y and the S/P formulas below its
``after`` demands); a backward node decides each formula its predecessor
could ask about. Nothing else gets fixed, so the closure is never
enumerated.

Pending eventualities (an until carried to the next position, or a refuted
release) are discharged through a jumping counter on the forward side.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Tuple

from .automata import Cube, Snba, State, _Budget, _build_snba, snba_trim
from .errors import HyperMCError
from .formula import (
    TRUE,
    And,
    Formula,
    Next,
    Not,
    Or,
    PastRelease,
    Prop,
    Release,
    Since,
    Top,
    Until,
    Yesterday,
    render,
)

logger = logging.getLogger(__name__)

Decision = Tuple[Formula, bool]

ROOT, ANCHORED, FORWARD, BACKWARD = "root", "anchored", "fwd", "bwd"

END = ("tab-end",)

_NODE_TYPES = (Top, Prop, Not, And, Or, Next, Yesterday, Until, Release, Since, PastRelease)


@dataclass(frozen=True)
class TableauNode:
    decided: FrozenSet[Decision]
    after: FrozenSet[Decision]
    before: FrozenSet[Decision]
    strong: FrozenSet[Formula] = frozenset()

    @cached_property
    def view(self) -> Dict[Formula, bool]:
        return dict(self.decided)

    @cached_property
    def cube(self) -> Cube:
        return frozenset((f.name, v) for f, v in self.decided if isinstance(f, Prop))

    def pending(self, f: Formula) -> bool:
        """An until still owed at the next position, or a release refuted later."""
        if isinstance(f, Until):
            return (f, True) in self.after
        return (f, False) in self.after


def _holds(view: Dict[Formula, bool], f: Formula, value: bool) -> bool:
    if isinstance(f, Top):
        return value
    return view.get(f) == value


def _is_origin(f: Formula) -> bool:
    return isinstance(f, Not) and isinstance(f.arg, Yesterday) and isinstance(f.arg.arg, Top)


# An action is ("g", f, v) for a goal at this position, ("a", f, v) for a
# demand on the next one, ("b", f, v, strong) for a demand on the previous one.
Action = tuple
Alternative = Tuple[Action, ...]


def _goal(f: Formula, v: bool) -> Action:
    return ("g", f, v)


def expansion(f: Formula, value: bool) -> List[Alternative]:
    """Ways of making ``f`` take ``value`` at one position; empty when impossible."""
    if isinstance(f, Top):
        return [()] if value else []
    if isinstance(f, Prop):
        return [()]
    if _is_origin(f):
        if value:
            return [(("b", TRUE, False, False),)]
        return [(("b", TRUE, True, True),)]
    if isinstance(f, Not):
        if isinstance(f.arg, Top):
            return [] if value else [()]
        if isinstance(f.arg, Prop):
            return [(_goal(f.arg, not value),)]
        raise HyperMCError(f"formula is not in negation normal form: {render(f)}")
    if getattr(f, "gamma", ()):
        raise HyperMCError(f"stutter subscript in a QPTL formula: {render(f)}")
    if isinstance(f, And):
        if value:
            return [(_goal(f.left, True), _goal(f.right, True))]
        return [(_goal(f.left, False),), (_goal(f.right, False),)]
    if isinstance(f, Or):
        if value:
            return [(_goal(f.left, True),), (_goal(f.right, True),)]
        return [(_goal(f.left, False), _goal(f.right, False))]
    if isinstance(f, Next):
        return [(("a", f.arg, value),)]
    if isinstance(f, Yesterday):
        return [(("b", f.arg, value, value),)]
    a, b = getattr(f, "left", None), getattr(f, "right", None)
    if isinstance(f, Until):
        if value:
            return [(_goal(b, True),), (_goal(a, True), ("a", f, True))]
        return [(_goal(b, False), _goal(a, False)), (_goal(b, False), ("a", f, False))]
    if isinstance(f, Release):
        if value:
            return [(_goal(b, True), _goal(a, True)), (_goal(b, True), ("a", f, True))]
        return [(_goal(b, False),), (_goal(a, False), ("a", f, False))]
    if isinstance(f, Since):
        if value:
            return [(_goal(b, True),), (_goal(a, True), ("b", f, True, True))]
        return [(_goal(b, False), _goal(a, False)), (_goal(b, False), ("b", f, False, False))]
    if isinstance(f, PastRelease):
        if value:
            return [(_goal(b, True), _goal(a, True)), (_goal(b, True), ("b", f, True, False))]
        return [(_goal(b, False),), (_goal(a, False), ("b", f, False, True))]
    raise HyperMCError(f"unexpected node {type(f).__name__} in a quantifier-free QPTL formula")


def _post_order(f: Formula, seen: Dict[Formula, FrozenSet[Formula]]) -> List[Formula]:
    order: List[Formula] = []
    stack = [(f, False)]
    marked = set()
    while stack:
        node, done = stack.pop()
        if done:
            order.append(node)
            continue
        if node in seen or node in marked:
            continue
        marked.add(node)
        stack.append((node, True))
        stack.extend((c, False) for c in node.children())
    return order


class _Frame:
    __slots__ = ("decided", "after", "before", "strong", "todo")

    def __init__(self, decided, after, before, strong, todo):
        self.decided = decided
        self.after = after
        self.before = before
        self.strong = strong
        self.todo = todo

    def copy(self) -> "_Frame":
        return _Frame(dict(self.decided), dict(self.after), dict(self.before), set(self.strong), list(self.todo))


class Tableau:
    """Node expansion for one formula; successors and predecessors are memoized."""

    def __init__(self, root: Formula, limit: Optional[int] = None):
        self.root = root
        self.budget = _Budget("tableau", limit)
        self._rules: Dict[Decision, List[Alternative]] = {}
        self._prev_need: Dict[Formula, FrozenSet[Formula]] = {}
        self._next_need: Dict[Formula, FrozenSet[Formula]] = {}
        self._succ: Dict[TableauNode, Tuple[TableauNode, ...]] = {}
        self._pred: Dict[TableauNode, Tuple[TableauNode, ...]] = {}
        closure = _post_order(root, {})
        self._order = {g: i for i, g in enumerate(closure)}
        for node in closure:
            if not isinstance(node, _NODE_TYPES):
                raise HyperMCError(f"unexpected node {type(node).__name__} in a quantifier-free QPTL formula")
        self.eventualities: Tuple[Formula, ...] = tuple(g for g in closure if isinstance(g, (Until, Release)))

    # ── what a neighbour may ask about ──────────────────────────────────────

    def _needs(self, f: Formula, memo: Dict[Formula, FrozenSet[Formula]], own: Callable) -> FrozenSet[Formula]:
        hit = memo.get(f)
        if hit is not None:
            return hit
        for node in _post_order(f, memo):
            acc = set(own(node))
            for c in node.children():
                acc |= memo[c]
            memo[node] = frozenset(acc)
        return memo[f]

    @staticmethod
    def _own_prev(f: Formula) -> Iterable[Formula]:
        if isinstance(f, Yesterday) and not isinstance(f.arg, Top):
            return (f.arg,)
        if isinstance(f, (Since, PastRelease)):
            return (f,)
        return ()

    @staticmethod
    def _own_next(f: Formula) -> Iterable[Formula]:
        if isinstance(f, Next) and not isinstance(f.arg, Top):
            return (f.arg,)
        if isinstance(f, (Until, Release)):
            return (f,)
        return ()

    def prev_need(self, f: Formula) -> FrozenSet[Formula]:
        """Formulas a position whose successor must decide ``f`` has to decide."""
        return self._needs(f, self._prev_need, self._own_prev)

    def next_need(self, f: Formula) -> FrozenSet[Formula]:
        """Formulas a position whose predecessor must decide ``f`` has to decide."""
        return self._needs(f, self._next_need, self._own_next)

    def _undecided(self, frame: _Frame, mode: str) -> Optional[Formula]:
        wanted = set()
        if mode != BACKWARD:
            for f in frame.after:
                wanted |= self.prev_need(f)
        if mode in (ROOT, BACKWARD):
            for f in frame.before:
                wanted |= self.next_need(f)
        missing = [f for f in wanted if f not in frame.decided]
        if not missing:
            return None
        return min(missing, key=self._order.__getitem__)

    # ── expansion ───────────────────────────────────────────────────────────

    def _alternatives(self, f: Formula, value: bool) -> List[Alternative]:
        key = (f, value)
        hit = self._rules.get(key)
        if hit is None:
            hit = expansion(f, value)
            self._rules[key] = hit
        return hit

    @staticmethod
    def _apply(alt: Alternative, frame: _Frame, mode: str, nb: Optional[Dict[Formula, bool]]) -> bool:
        for action in alt:
            kind, f, v = action[0], action[1], action[2]
            if kind == "g":
                have = frame.decided.get(f)
                if have is None:
                    frame.todo.append((f, v))
                elif have != v:
                    return False
            elif kind == "a":
                have = frame.after.get(f)
                if have is not None and have != v:
                    return False
                if mode == BACKWARD and not _holds(nb, f, v):
                    return False
                frame.after[f] = v
            else:
                strong = action[3]
                if mode == ANCHORED:
                    if strong:
                        return False
                    continue
                if mode == FORWARD:
                    if not _holds(nb, f, v):
                        return False
                    continue
                have = frame.before.get(f)
                if have is not None and have != v:
                    return False
                frame.before[f] = v
                if strong:
                    frame.strong.add(f)
        return True

    def expand(self, goals: Iterable[Decision], mode: str, neighbour: Optional[TableauNode] = None) -> Tuple[TableauNode, ...]:
        nb = neighbour.view if neighbour is not None else None
        out: Dict[TableauNode, None] = {}
        stack = [_Frame({}, {}, {}, set(), list(goals))]
        while stack:
            frame = stack.pop()
            while True:
                if frame.todo:
                    f, v = frame.todo.pop()
                    have = frame.decided.get(f)
                    if have is not None:
                        if have != v:
                            break
                        continue
                    frame.decided[f] = v
                    alts = self._alternatives(f, v)
                    if len(alts) == 1:
                        if not self._apply(alts[0], frame, mode, nb):
                            break
                        continue
                    for alt in reversed(alts):
                        branch = frame.copy()
                        if self._apply(alt, branch, mode, nb):
                            stack.append(branch)
                    break
                missing = self._undecided(frame, mode)
                if missing is None:
                    node = TableauNode(
                        decided=frozenset(frame.decided.items()),
                        after=frozenset(frame.after.items()),
                        before=frozenset(frame.before.items()),
                        strong=frozenset(frame.strong),
                    )
                    if node not in out:
                        self.budget.charge()
                        out[node] = None
                    break
                for v in (False, True):
                    branch = frame.copy()
                    branch.todo.append((missing, v))
                    stack.append(branch)
                break
        return tuple(out)

    def roots(self, anchored: bool) -> Tuple[TableauNode, ...]:
        return self.expand([(self.root, True)], ANCHORED if anchored else ROOT)

    def successors(self, node: TableauNode) -> Tuple[TableauNode, ...]:
        hit = self._succ.get(node)
        if hit is None:
            hit = self.expand(node.after, FORWARD, node)
            self._succ[node] = hit
        return hit

    def predecessors(self, node: TableauNode) -> Tuple[TableauNode, ...]:
        hit = self._pred.get(node)
        if hit is None:
            hit = self.expand(node.before, BACKWARD, node)
            self._pred[node] = hit
        return hit


def tableau_snba(f: Formula, anchored: bool = False, limit: Optional[int] = None) -> Snba:
    """
    SNBA of a quantifier-free NNF formula. With ``anchored`` the automaton
    is exact at the pointed position 0 only: its backward copy just checks
    that no predecessor is needed.
    """
    tab = Tableau(f, limit)
    events = tab.eventualities
    m = len(events)

    def advance(node: TableauNode, k: int) -> int:
        while k < m and not node.pending(events[k]):
            k += 1
        return 0 if k >= m else k

    def wraps(node: TableauNode, k: int) -> bool:
        return all(not node.pending(events[j]) for j in range(k, m))

    def fwd_of(state: State):
        if state == END:
            return ()
        _, node, k = state
        nxt = advance(node, k)
        return tuple((node.cube, ("tab", succ, nxt)) for succ in tab.successors(node))

    def bwd_of(state: State):
        if state == END:
            return ()
        node = state[1]
        edges = []
        if not anchored:
            edges.extend((node.cube, ("tab", pred, 0)) for pred in tab.predecessors(node))
        if not node.strong:
            edges.append((node.cube, END))
        return tuple(edges)

    raw = _build_snba(
        [("tab", node, 0) for node in tab.roots(anchored)],
        fwd_of,
        bwd_of,
        lambda s: s == END,
        lambda s: s != END and wraps(s[1], s[2]),
        "tableau",
        limit,
    )
    out = snba_trim(raw)
    logger.debug(
        "tableau formula_size=%s nodes=%s snba_states=%s trimmed=%s anchored=%s",
        len(tab._order),
        tab.budget.used,
        len(raw.states),
        len(out.states),
        anchored,
    )
    return out


__all__ = ["TableauNode", "Tableau", "expansion", "tableau_snba"]
