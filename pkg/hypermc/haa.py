"""
Two-way hesitant alternating automata (HAA) over pointed words.

A copy in state q at position j reads σ(j) and picks a set of moves
satisfying δ(q): (+1, q') sends a copy to j+1, (-1, q') to j-1. A copy that
reaches position -1 stops and accepts iff its state lies in F⁻.

States are partitioned into components ordered by a DAG:

- transient: no move stays inside the component;
- negative: moves inside the component go backward only;
- buchi: moves inside go forward only, at most one per disjunct, and an
  infinite branch must visit the accepting set infinitely often;
- cobuchi: moves inside go forward only, at most one per conjunct, and an
  infinite branch must visit the accepting set finitely often.

Besides validation and dualization this module decides membership of a
pointed lasso (bottom-up over components, with a Büchi game for the
infinite ones) and removes alternation, producing an Snba.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import chain, combinations, product
from typing import Dict, FrozenSet, Hashable, Iterable, List, Mapping, Optional, Set, Tuple

import networkx as nx

from .automata import (
    TRUE_CUBE,
    Cube,
    Snba,
    _Budget,
    _build_snba,
    cube,
    cube_all,
    cube_and,
    cube_holds,
)
from .errors import HaaValidationError
from .kripke import PointedLasso, UPSeq, lcm

logger = logging.getLogger(__name__)

State = Hashable
FORWARD, BACKWARD = 1, -1
KINDS = ("transient", "negative", "buchi", "cobuchi")


# ─────────────────────────────────────────────────────────────────────────────
# Positive Boolean transition formulas
# ─────────────────────────────────────────────────────────────────────────────


class BExpr:
    __slots__ = ()


@dataclass(frozen=True)
class BTrue(BExpr):
    pass


@dataclass(frozen=True)
class BFalse(BExpr):
    pass


@dataclass(frozen=True)
class BLit(BExpr):
    prop: str
    positive: bool = True


@dataclass(frozen=True)
class BMove(BExpr):
    direction: int
    state: State


@dataclass(frozen=True)
class BAnd(BExpr):
    left: BExpr
    right: BExpr


@dataclass(frozen=True)
class BOr(BExpr):
    left: BExpr
    right: BExpr


B_TRUE, B_FALSE = BTrue(), BFalse()


def b_and(*parts: BExpr) -> BExpr:
    out: BExpr = B_TRUE
    for p in parts:
        if isinstance(p, BFalse) or isinstance(out, BFalse):
            return B_FALSE
        if isinstance(p, BTrue):
            continue
        out = p if isinstance(out, BTrue) else BAnd(out, p)
    return out


def b_or(*parts: BExpr) -> BExpr:
    out: BExpr = B_FALSE
    for p in parts:
        if isinstance(p, BTrue) or isinstance(out, BTrue):
            return B_TRUE
        if isinstance(p, BFalse):
            continue
        out = p if isinstance(out, BFalse) else BOr(out, p)
    return out


def b_cube(c: Cube) -> BExpr:
    return b_and(*(BLit(p, v) for p, v in sorted(c)))


@dataclass(frozen=True)
class Term:
    """One disjunct of the DNF: a cube on the current letter plus moves."""

    cube: Cube
    moves: FrozenSet[Tuple[int, State]]


@lru_cache(maxsize=None)
def dnf(e: BExpr) -> Tuple[Term, ...]:
    """Disjunctive normal form with subsumed disjuncts removed."""
    if isinstance(e, BTrue):
        return (Term(TRUE_CUBE, frozenset()),)
    if isinstance(e, BFalse):
        return ()
    if isinstance(e, BLit):
        return (Term(cube((e.prop, e.positive)), frozenset()),)
    if isinstance(e, BMove):
        return (Term(TRUE_CUBE, frozenset({(e.direction, e.state)})),)
    if isinstance(e, BOr):
        return _minimal(dnf(e.left) + dnf(e.right))
    if isinstance(e, BAnd):
        out = []
        for a in dnf(e.left):
            for b in dnf(e.right):
                c = cube_and(a.cube, b.cube)
                if c is not None:
                    out.append(Term(c, a.moves | b.moves))
        return _minimal(tuple(out))
    raise TypeError(f"not a transition formula: {e!r}")


def _minimal(terms: Tuple[Term, ...]) -> Tuple[Term, ...]:
    unique = list(dict.fromkeys(terms))
    keep = []
    for t in unique:
        if any(o != t and o.cube <= t.cube and o.moves <= t.moves for o in unique):
            continue
        keep.append(t)
    return tuple(keep)


def moves_of(e: BExpr) -> Iterable[Tuple[int, State]]:
    if isinstance(e, BMove):
        yield (e.direction, e.state)
    elif isinstance(e, (BAnd, BOr)):
        yield from moves_of(e.left)
        yield from moves_of(e.right)


def _dual(e: BExpr) -> BExpr:
    if isinstance(e, BTrue):
        return B_FALSE
    if isinstance(e, BFalse):
        return B_TRUE
    if isinstance(e, BLit):
        return BLit(e.prop, not e.positive)
    if isinstance(e, BMove):
        return e
    if isinstance(e, BAnd):
        return BOr(_dual(e.left), _dual(e.right))
    if isinstance(e, BOr):
        return BAnd(_dual(e.left), _dual(e.right))
    raise TypeError(f"not a transition formula: {e!r}")


def _occurrences(e: BExpr, inside: FrozenSet[State], universal: bool) -> int:
    """Most intra-component moves a single disjunct (conjunct if universal) can pick."""
    if isinstance(e, BMove):
        return 1 if e.state in inside else 0
    if isinstance(e, (BAnd, BOr)):
        a = _occurrences(e.left, inside, universal)
        b = _occurrences(e.right, inside, universal)
        additive = isinstance(e, BOr) if universal else isinstance(e, BAnd)
        return a + b if additive else max(a, b)
    return 0


def _substitute(e: BExpr, fn) -> BExpr:
    if isinstance(e, BMove):
        return fn(e)
    if isinstance(e, BAnd):
        return b_and(_substitute(e.left, fn), _substitute(e.right, fn))
    if isinstance(e, BOr):
        return b_or(_substitute(e.left, fn), _substitute(e.right, fn))
    return e


# ─────────────────────────────────────────────────────────────────────────────
# Automaton
# ─────────────────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class Component:
    kind: str
    states: FrozenSet[State]
    accepting: FrozenSet[State] = frozenset()


@dataclass(frozen=True)
class TwoWayHaa:
    states: Tuple[State, ...]
    initial: State
    delta: Mapping[State, BExpr] = field(hash=False, compare=False)
    f_minus: FrozenSet[State] = frozenset()
    components: Tuple[Component, ...] = ()

    @cached_property
    def comp_index(self) -> Dict[State, int]:
        return {q: i for i, comp in enumerate(self.components) for q in comp.states}

    def component_of(self, q: State) -> Component:
        return self.components[self.comp_index[q]]

    @cached_property
    def component_graph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(len(self.components)))
        for q in self.states:
            for _, t in moves_of(self.delta[q]):
                a, b = self.comp_index[q], self.comp_index.get(t)
                if b is not None and a != b:
                    graph.add_edge(a, b)
        return graph

    def stats(self) -> Dict[str, int]:
        out = {"states": len(self.states), "components": len(self.components)}
        for kind in KINDS:
            out[kind] = sum(1 for c in self.components if c.kind == kind)
        return out

    def to_dot(self, name: str = "H") -> str:
        """One cluster per component; edges go to the move targets of δ."""
        ids = {q: i for i, q in enumerate(self.states)}
        lines = [f"digraph {name} {{", "  rankdir=LR;"]
        for k, comp in enumerate(self.components):
            lines.append(f"  subgraph cluster_{k} {{")
            lines.append(f'    label="{comp.kind}";')
            for q in sorted(comp.states, key=str):
                shape = "doublecircle" if q in comp.accepting else ("box" if q in self.f_minus else "circle")
                lines.append(f'    q{ids[q]} [shape={shape}, label="{q}"];')
            lines.append("  }")
        for q in self.states:
            for d, t in sorted(moves_of(self.delta[q]), key=str):
                style = "solid" if d == FORWARD else "dashed"
                lines.append(f"  q{ids[q]} -> q{ids[t]} [style={style}];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def validate_haa(haa: TwoWayHaa) -> TwoWayHaa:
    """Check the hesitant structure; raises HaaValidationError naming the failed requirement."""
    seen: Set[State] = set()
    for comp in haa.components:
        if comp.kind not in KINDS:
            raise HaaValidationError("component-kind", comp.kind)
        if seen & comp.states:
            raise HaaValidationError("partition", f"state in two components: {sorted(map(str, seen & comp.states))}")
        seen |= comp.states
        if not comp.accepting <= comp.states:
            raise HaaValidationError("accepting-subset", comp.kind)
        if comp.kind in ("transient", "negative") and comp.accepting:
            raise HaaValidationError("accepting-subset", f"{comp.kind} components carry no acceptance set")
    if seen != set(haa.states):
        raise HaaValidationError("partition", "components do not cover the states")
    if haa.initial not in seen:
        raise HaaValidationError("partition", "initial state missing")
    for q in haa.states:
        for _, t in moves_of(haa.delta[q]):
            if t not in seen:
                raise HaaValidationError("moves", f"unknown target {t!r}")
    if not nx.is_directed_acyclic_graph(haa.component_graph):
        raise HaaValidationError("dag", "components are not ordered")
    for comp in haa.components:
        for q in comp.states:
            e = haa.delta[q]
            inner = [d for d, t in moves_of(e) if t in comp.states]
            if comp.kind == "transient" and inner:
                raise HaaValidationError("transient", f"state {q!r} stays in its component")
            if comp.kind == "negative" and any(d != BACKWARD for d in inner):
                raise HaaValidationError("negative-direction", f"state {q!r}")
            if comp.kind in ("buchi", "cobuchi") and any(d != FORWARD for d in inner):
                raise HaaValidationError(f"{comp.kind}-direction", f"state {q!r}")
            if comp.kind == "buchi" and _occurrences(e, comp.states, False) > 1:
                raise HaaValidationError("existential", f"state {q!r}")
            if comp.kind == "cobuchi" and _occurrences(e, comp.states, True) > 1:
                raise HaaValidationError("universal", f"state {q!r}")
    return haa


def dualize(haa: TwoWayHaa) -> TwoWayHaa:
    """Automaton for the complement language."""
    swap = {"buchi": "cobuchi", "cobuchi": "buchi"}
    return TwoWayHaa(
        states=haa.states,
        initial=haa.initial,
        delta={q: _dual(e) for q, e in haa.delta.items()},
        f_minus=frozenset(haa.states) - haa.f_minus,
        components=tuple(
            Component(swap.get(c.kind, c.kind), c.states, c.accepting) for c in haa.components
        ),
    )


def gn_marks(haa: TwoWayHaa) -> Dict[int, bool]:
    """
    Components in which every reachable position holds at most one active
    copy: existential non-coBüchi components entered only from such
    components (or from the initial one) by at most one move per disjunct.
    """
    order = list(nx.topological_sort(haa.component_graph))
    marks: Dict[int, bool] = {}
    start = haa.comp_index[haa.initial]
    for i in order:
        comp = haa.components[i]
        if comp.kind == "cobuchi":
            marks[i] = False
            continue
        ok = all(_occurrences(haa.delta[q], comp.states, False) <= 1 for q in comp.states)
        preds = list(haa.component_graph.predecessors(i))
        if not preds:
            ok = ok and i == start
        for j in preds:
            src = haa.components[j]
            ok = ok and marks.get(j, False)
            ok = ok and all(_occurrences(haa.delta[q], comp.states, False) <= 1 for q in src.states)
        marks[i] = ok
    return marks


# ─────────────────────────────────────────────────────────────────────────────
# SNBA embedding
# ─────────────────────────────────────────────────────────────────────────────


def snba_entry(a: Snba, tag) -> BExpr:
    """Transition formula starting ``a`` at the current position; copies live in (tag, 'f'|'b', q)."""
    options = []
    for q0 in sorted(a.initial, key=str):
        for cf, qf in a.fwd.get(q0, ()):
            for cb, qb in a.bwd.get(q0, ()):
                c = cube_and(cf, cb)
                if c is None:
                    continue
                options.append(
                    b_and(b_cube(c), BMove(FORWARD, (tag, "f", qf)), BMove(BACKWARD, (tag, "b", qb)))
                )
    return b_or(*options)


def snba_components(a: Snba, tag) -> Tuple[Dict[State, BExpr], FrozenSet[State], Tuple[Component, ...]]:
    """δ, F⁻ contribution and components of the two copies of an embedded SNBA."""
    delta: Dict[State, BExpr] = {}
    for q in a.states:
        delta[(tag, "f", q)] = b_or(*(b_and(b_cube(c), BMove(FORWARD, (tag, "f", t))) for c, t in a.fwd.get(q, ())))
        delta[(tag, "b", q)] = b_or(*(b_and(b_cube(c), BMove(BACKWARD, (tag, "b", t))) for c, t in a.bwd.get(q, ())))
    f_minus = frozenset((tag, "b", q) for q in a.f_minus)
    comps = (
        Component("buchi", frozenset((tag, "f", q) for q in a.states), frozenset((tag, "f", q) for q in a.f_plus)),
        Component("negative", frozenset((tag, "b", q) for q in a.states)),
    )
    return delta, f_minus, comps


def snba_as_haa(a: Snba) -> TwoWayHaa:
    tag = "e"
    start = ("ini",)
    delta, f_minus, comps = snba_components(a, tag)
    delta[start] = snba_entry(a, tag)
    return TwoWayHaa(
        states=(start,) + tuple(delta.keys() - {start}),
        initial=start,
        delta=delta,
        f_minus=f_minus,
        components=(Component("transient", frozenset({start})),) + comps,
    )


# ─────────────────────────────────────────────────────────────────────────────
# Membership of pointed lassos
# ─────────────────────────────────────────────────────────────────────────────


class _Values:
    """Acceptance of a copy in state q at position j, filled bottom-up."""

    def __init__(self, haa: TwoWayHaa, pt: PointedLasso):
        self.haa = haa
        self.letters = pt.lasso.letters
        self.seqs: Dict[State, UPSeq] = {}

    def at(self, q: State, j: int) -> bool:
        if j < 0:
            return q in self.haa.f_minus
        return bool(self.seqs[q].at(j))

    def window(self) -> Tuple[int, int]:
        threshold = self.letters.threshold
        period = self.letters.period
        for seq in self.seqs.values():
            threshold = max(threshold, seq.threshold)
            period = lcm(period, seq.period)
        return threshold + 1, period

    def term_ok(self, term: Term, j: int, inside: FrozenSet[State]) -> bool:
        if not cube_holds(term.cube, self.letters.at(j)):
            return False
        return all(self.at(t, j + d) for d, t in term.moves if t not in inside)


def _attractor(arena: Set, owner: Dict, succ: Dict, pred: Dict, target: Set, player: str) -> Set:
    attr = set(target)
    remaining = {n: sum(1 for m in succ[n] if m in arena) for n in arena if owner[n] != player}
    queue = deque(attr)
    while queue:
        m = queue.popleft()
        for n in pred.get(m, ()):
            if n not in arena or n in attr:
                continue
            if owner[n] == player:
                attr.add(n)
                queue.append(n)
            else:
                remaining[n] -= 1
                if remaining[n] == 0:
                    attr.add(n)
                    queue.append(n)
    return attr


def solve_buchi_game(nodes: Iterable, owner: Dict, succ: Dict, target: Set, player: str) -> Set:
    """Winning region of ``player`` for visiting ``target`` infinitely often (total arena)."""
    arena = set(nodes)
    other = "A" if player == "E" else "E"
    pred: Dict = {}
    for n in arena:
        for m in succ[n]:
            pred.setdefault(m, []).append(n)
    while True:
        reach = _attractor(arena, owner, succ, pred, target & arena, player)
        trap = arena - reach
        if not trap:
            return arena
        arena -= _attractor(arena, owner, succ, pred, trap, other)


def _solve_transient(values: _Values, comp: Component) -> None:
    threshold, period = values.window()
    for q in comp.states:
        terms = dnf(values.haa.delta[q])
        values.seqs[q] = UPSeq.from_function(
            lambda j, terms=terms: any(values.term_ok(t, j, frozenset()) for t in terms), threshold, period
        )


def _solve_negative(values: _Values, comp: Component) -> None:
    threshold, period = values.window()
    order = sorted(comp.states, key=str)
    terms = {q: dnf(values.haa.delta[q]) for q in order}
    prev = tuple(q in values.haa.f_minus for q in order)
    history: List[Tuple[bool, ...]] = []
    seen: Dict = {}
    j = 0
    while True:
        if j >= threshold:
            key = ((j - threshold) % period, prev)
            if key in seen:
                start = seen[key]
                break
            seen[key] = j
        here = dict(zip(order, prev))
        row = tuple(
            any(
                values.term_ok(t, j, comp.states)
                and all(here[s] for d, s in t.moves if s in comp.states)
                for t in terms[q]
            )
            for q in order
        )
        history.append(row)
        prev = row
        j += 1
    for k, q in enumerate(order):
        col = tuple(r[k] for r in history)
        values.seqs[q] = UPSeq(col[:start], col[start:]).normalized()


def _solve_infinite(values: _Values, comp: Component) -> None:
    threshold, period = values.window()
    end = threshold + period

    def nxt(j: int) -> int:
        return j + 1 if j + 1 < end else threshold

    win, lose = ("WIN",), ("LOSE",)
    owner = {win: "E", lose: "E"}
    succ = {win: [win], lose: [lose]}
    for j in range(end):
        for q in comp.states:
            node = ("E", j, q)
            owner[node] = "E"
            succ[node] = []
            for k, t in enumerate(dnf(values.haa.delta[q])):
                if not values.term_ok(t, j, comp.states):
                    continue
                inner = [s for _, s in t.moves if s in comp.states]
                if not inner:
                    succ[node].append(win)
                    continue
                adam = ("A", j, q, k)
                owner[adam] = "A"
                succ[adam] = [("E", nxt(j), s) for s in inner]
                succ[node].append(adam)
            if not succ[node]:
                succ[node].append(lose)
    marked = {n for n in owner if n[0] == "E" and len(n) == 3 and n[2] in comp.accepting}
    if comp.kind == "buchi":
        winning = solve_buchi_game(owner, owner, succ, marked | {win}, "E")
    else:
        winning = set(owner) - solve_buchi_game(owner, owner, succ, marked | {lose}, "A")
    for q in comp.states:
        values.seqs[q] = UPSeq.from_function(lambda j, q=q: ("E", j, q) in winning, threshold, period)


def haa_accepts(haa: TwoWayHaa, pt: PointedLasso) -> bool:
    values = _Values(haa, pt)
    order = list(reversed(list(nx.topological_sort(haa.component_graph))))
    for i in order:
        comp = haa.components[i]
        if comp.kind == "transient":
            _solve_transient(values, comp)
        elif comp.kind == "negative":
            _solve_negative(values, comp)
        else:
            _solve_infinite(values, comp)
    return values.at(haa.initial, pt.pos)


# ─────────────────────────────────────────────────────────────────────────────
# Removing alternation
# ─────────────────────────────────────────────────────────────────────────────


def rank_convert(haa: TwoWayHaa) -> TwoWayHaa:
    """
    Replace every coBüchi component by a Büchi one over (q, rank) states:
    ranks never increase along a branch, odd ranks exclude accepting states
    and must be visited infinitely often. Entering copies start at 2n.
    """
    ranked: Dict[State, int] = {}
    for comp in haa.components:
        if comp.kind == "cobuchi":
            top = 2 * len(comp.states)
            for q in comp.states:
                ranked[q] = top
    if not ranked:
        return haa
    comp_of = haa.comp_index

    def enter(m: BMove) -> BExpr:
        if m.state in ranked:
            return BMove(m.direction, ("rk", m.state, ranked[m.state]))
        return m

    delta: Dict[State, BExpr] = {}
    components: List[Component] = []
    f_minus: Set[State] = set(q for q in haa.f_minus if q not in ranked)
    for comp in haa.components:
        if comp.kind != "cobuchi":
            for q in comp.states:
                delta[q] = _substitute(haa.delta[q], enter)
            components.append(comp)
            continue
        top = 2 * len(comp.states)
        states = set()
        for q in comp.states:
            for r in range(top + 1):
                node = ("rk", q, r)
                states.add(node)
                if q in haa.f_minus:
                    f_minus.add(node)
                if r % 2 == 1 and q in comp.accepting:
                    delta[node] = B_FALSE
                    continue

                def lower(m: BMove, r=r, here=comp_of[q]) -> BExpr:
                    if comp_of.get(m.state) == here:
                        return b_or(*(BMove(m.direction, ("rk", m.state, s)) for s in range(r + 1)))
                    return enter(m)

                delta[node] = _substitute(haa.delta[q], lower)
        components.append(
            Component("buchi", frozenset(states), frozenset(n for n in states if n[2] % 2 == 1))
        )
    initial = ("rk", haa.initial, ranked[haa.initial]) if haa.initial in ranked else haa.initial
    return TwoWayHaa(
        states=tuple(delta),
        initial=initial,
        delta=delta,
        f_minus=frozenset(f_minus),
        components=tuple(components),
    )


def _subsets(pool: Iterable[State]) -> Iterable[FrozenSet[State]]:
    items = sorted(pool, key=str)
    return (frozenset(c) for c in chain.from_iterable(combinations(items, k) for k in range(len(items) + 1)))


def _demand_pools(h: TwoWayHaa) -> Tuple[FrozenSet[State], FrozenSet[State]]:
    """
    States that may have to be guessed: targets of backward moves of copies
    that can live right of the start position, and targets of forward moves
    of copies that can live left of it.
    """
    graph = nx.DiGraph()
    graph.add_nodes_from(h.states)
    for q in h.states:
        for _, t in moves_of(h.delta[q]):
            graph.add_edge(q, t)
    reach = {h.initial} | nx.descendants(graph, h.initial)

    def closure(direction: int) -> Set[State]:
        seeds = {t for q in reach for d, t in moves_of(h.delta[q]) if d == direction}
        out = set(seeds)
        for s in seeds:
            out |= nx.descendants(graph, s)
        return out

    right_side, left_side = closure(FORWARD), closure(BACKWARD)
    fwd_pool = frozenset(t for q in right_side for d, t in moves_of(h.delta[q]) if d == BACKWARD)
    bwd_pool = frozenset(t for q in left_side for d, t in moves_of(h.delta[q]) if d == FORWARD)
    return fwd_pool, bwd_pool


def haa_to_snba(haa: TwoWayHaa, limit: Optional[int] = None) -> Snba:
    """
    Remove alternation. A state of the result at position j records the set
    V_j of active copies; the forward copy also keeps V_{j-1} restricted to
    backward targets and a breakpoint set of pending Büchi obligations, the
    backward copy keeps V_{j+1} restricted to forward targets. Copies that
    will be requested from the other side are guessed and checked one step
    later.
    """
    h = rank_convert(haa)
    terms = {q: dnf(h.delta[q]) for q in h.states}
    comp_of = h.comp_index
    buchi: Set[State] = set()
    accepting: Set[State] = set()
    for comp in h.components:
        if comp.kind == "buchi":
            buchi |= comp.states
            accepting |= comp.accepting
    bt = frozenset(t for q in h.states for d, t in moves_of(h.delta[q]) if d == BACKWARD)
    ft = frozenset(t for q in h.states for d, t in moves_of(h.delta[q]) if d == FORWARD)
    fwd_pool, bwd_pool = _demand_pools(h)
    budget = _Budget("dealternate", limit)

    def choose(active: FrozenSet[State], allowed) -> Iterable[Tuple[Cube, Dict[State, Term]]]:
        options = []
        for q in sorted(active, key=str):
            ok = [t for t in terms[q] if allowed(t)]
            if not ok:
                return
            options.append([(q, t) for t in ok])
        for combo in product(*options):
            c = cube_all(t.cube for _, t in combo)
            if c is not None:
                yield c, dict(combo)

    def forward(prev_bt: FrozenSet[State], active: FrozenSet[State], pending: Optional[FrozenSet[State]]):
        out = []
        allowed = lambda t: all(s in prev_bt for d, s in t.moves if d == BACKWARD)
        for c, picked in choose(active, allowed):
            right = frozenset(s for t in picked.values() for d, s in t.moves if d == FORWARD)
            carried = frozenset()
            if pending:
                carried = frozenset(
                    s
                    for q in pending
                    for d, s in picked[q].moves
                    if d == FORWARD and comp_of.get(s) == comp_of[q]
                ) - accepting
            for extra in _subsets(fwd_pool - right):
                nxt = right | extra
                obligations = carried if pending else frozenset(s for s in nxt if s in buchi) - accepting
                budget.charge()
                out.append((c, ("F", active & bt, nxt, obligations)))
        return tuple(out)

    def backward(active: FrozenSet[State], right_ft: FrozenSet[State]):
        out = []
        allowed = lambda t: all(s in right_ft for d, s in t.moves if d == FORWARD)
        for c, picked in choose(active, allowed):
            left = frozenset(s for t in picked.values() for d, s in t.moves if d == BACKWARD)
            for extra in _subsets(bwd_pool - left):
                budget.charge()
                out.append((c, ("B", left | extra, active & ft)))
        return tuple(out)

    def fwd_of(node):
        if node[0] == "I":
            return forward(node[1] & bt, node[2], None)
        if node[0] == "F":
            return forward(node[1], node[2], node[3])
        return ()

    def bwd_of(node):
        if node[0] == "I":
            return ((TRUE_CUBE, ("B", node[1], node[2] & ft)),)
        if node[0] == "B":
            return backward(node[1], node[2])
        return ()

    # V_{i-1} is fixed by one choice of disjuncts at i plus guessed forward arrivals.
    entries = {}
    for extra in _subsets((fwd_pool | bwd_pool) - {h.initial}):
        active = frozenset({h.initial}) | extra
        for _, picked in choose(active, lambda t: True):
            left = frozenset(s for t in picked.values() for d, s in t.moves if d == BACKWARD)
            for before in _subsets(bwd_pool - left):
                budget.charge()
                entries[("I", left | before, active)] = None
    out = _build_snba(
        list(entries),
        fwd_of,
        bwd_of,
        lambda n: n[0] == "B" and n[1] <= h.f_minus,
        lambda n: n[0] == "F" and not n[3],
        "dealternate",
    )
    logger.debug(
        "dealternate haa_states=%s snba_states=%s fwd_pool=%s bwd_pool=%s",
        len(h.states),
        len(out.states),
        len(fwd_pool),
        len(bwd_pool),
    )
    return out


__all__ = [
    "FORWARD",
    "BACKWARD",
    "KINDS",
    "BExpr",
    "BTrue",
    "BFalse",
    "BLit",
    "BMove",
    "BAnd",
    "BOr",
    "B_TRUE",
    "B_FALSE",
    "b_and",
    "b_or",
    "b_cube",
    "Term",
    "dnf",
    "moves_of",
    "Component",
    "TwoWayHaa",
    "validate_haa",
    "dualize",
    "gn_marks",
    "snba_entry",
    "snba_components",
    "snba_as_haa",
    "solve_buchi_game",
    "haa_accepts",
    "rank_convert",
    "haa_to_snba",
]
