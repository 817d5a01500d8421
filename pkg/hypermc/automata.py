"""
Word automata over propositional cubes.

- Gnba / Nba: generalized and plain Büchi automata, degeneralization,
  lasso membership and emptiness with a lasso witness.
- Snba: two-way Büchi automata over pointed words. A run starts in an
  initial state at the pointed position i and splits into a backward copy
  (reads σ(i), σ(i-1), ..., σ(0) and must stop in F⁻) and a forward copy
  (reads σ(i), σ(i+1), ... with Büchi acceptance on F⁺).
- The atoms automaton of a set of PLTL guards.

Transitions carry cubes: frozensets of (proposition, polarity) pairs read
as conjunctions. Graph questions are answered with networkx.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import (
    Callable,
    Dict,
    FrozenSet,
    Hashable,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)

import networkx as nx

from .config import get_settings
from .errors import ResourceLimitError
from .formula import Formula, Next, Prop, Since, Until, Yesterday
from .guards import ELEMENTARY, at_names, closure, truth
from .kripke import Lasso, Letter, PointedLasso

logger = logging.getLogger(__name__)

State = Hashable
Cube = FrozenSet[Tuple[str, bool]]
Edges = Tuple[Tuple[Cube, State], ...]

TRUE_CUBE: Cube = frozenset()


# ─────────────────────────────────────────────────────────────────────────────
# Cubes
# ─────────────────────────────────────────────────────────────────────────────


def cube(*literals: Tuple[str, bool]) -> Cube:
    return frozenset(literals)


def cube_and(a: Cube, b: Cube) -> Optional[Cube]:
    """Conjunction of two cubes, None when they clash."""
    for p, v in b:
        if (p, not v) in a:
            return None
    return a | b


def cube_all(cubes: Iterable[Cube]) -> Optional[Cube]:
    out = TRUE_CUBE
    for c in cubes:
        out = cube_and(out, c)
        if out is None:
            return None
    return out


def cube_holds(c: Cube, letter: Letter) -> bool:
    return all((p in letter) == v for p, v in c)


def cube_drop(c: Cube, props: Iterable[str]) -> Cube:
    gone = frozenset(props)
    return frozenset((p, v) for p, v in c if p not in gone)


def cube_letter(c: Cube) -> Letter:
    """Smallest letter satisfying the cube."""
    return frozenset(p for p, v in c if v)


def cube_props(c: Cube) -> FrozenSet[str]:
    return frozenset(p for p, _ in c)


def render_cube(c: Cube) -> str:
    if not c:
        return "true"
    return " & ".join(p if v else f"!{p}" for p, v in sorted(c))


def _edge_props(table: Mapping[State, Edges]) -> FrozenSet[str]:
    out = set()
    for edges in table.values():
        for c, _ in edges:
            out |= cube_props(c)
    return frozenset(out)


class _Budget:
    """State counter shared by the lazy constructions."""

    def __init__(self, stage: str, limit: Optional[int] = None):
        self.stage = stage
        self.limit = get_settings().state_limit if limit is None else limit
        self.used = 0

    def charge(self, n: int = 1) -> None:
        self.used += n
        if self.used > self.limit:
            raise ResourceLimitError(self.stage, self.limit)


def _explore(
    roots: Iterable[State],
    expand: Callable[[State], Edges],
    budget: _Budget,
) -> Dict[State, Edges]:
    """Breadth-first closure of ``roots`` under ``expand``."""
    table: Dict[State, Edges] = {}
    queue = deque()
    for r in roots:
        if r not in table:
            table[r] = ()
            queue.append(r)
    while queue:
        q = queue.popleft()
        budget.charge()
        edges = expand(q)
        table[q] = edges
        for _, t in edges:
            if t not in table:
                table[t] = ()
                queue.append(t)
    return table


# ─────────────────────────────────────────────────────────────────────────────
# Büchi automata
# ─────────────────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class Nba:
    states: Tuple[State, ...]
    initial: FrozenSet[State]
    trans: Mapping[State, Edges] = field(hash=False, compare=False)
    accepting: FrozenSet[State] = frozenset()

    @property
    def props(self) -> FrozenSet[str]:
        return _edge_props(self.trans)

    def successors(self, q: State, letter: Letter) -> Tuple[State, ...]:
        return tuple(t for c, t in self.trans.get(q, ()) if cube_holds(c, letter))

    def accepts(self, lasso: Lasso) -> bool:
        return _buchi_on_lasso(self.initial, self.successors, self.accepting.__contains__, lasso, 0)

    def stats(self) -> Dict[str, int]:
        return {
            "states": len(self.states),
            "transitions": sum(len(v) for v in self.trans.values()),
            "accepting": len(self.accepting),
        }

    def to_dot(self, name: str = "A") -> str:
        ids = {q: i for i, q in enumerate(self.states)}
        lines = [f"digraph {name} {{", "  rankdir=LR;"]
        for q, i in ids.items():
            shape = "doublecircle" if q in self.accepting else "circle"
            lines.append(f'  q{i} [shape={shape}, label="{q}"];')
            if q in self.initial:
                lines.append(f"  init{i} [shape=point];")
                lines.append(f"  init{i} -> q{i};")
        for q, edges in self.trans.items():
            for c, t in edges:
                lines.append(f'  q{ids[q]} -> q{ids[t]} [label="{render_cube(c)}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Gnba:
    states: Tuple[State, ...]
    initial: FrozenSet[State]
    trans: Mapping[State, Edges] = field(hash=False, compare=False)
    acceptance: Tuple[FrozenSet[State], ...] = ()

    def accepts(self, lasso: Lasso) -> bool:
        return gnba_to_nba(self).accepts(lasso)


def gnba_to_nba(gnba: Gnba) -> Nba:
    """
    Counter construction: states (q, c); the counter advances when q lies in
    the c-th acceptance set and (q, 0) with q in the first set accepts. No
    acceptance sets means every state accepts.
    """
    sets = gnba.acceptance
    k = len(sets)

    def expand(node) -> Edges:
        q, c = node
        nxt = (c + 1) % k if k and q in sets[c] else c
        return tuple((cb, (t, nxt)) for cb, t in gnba.trans.get(q, ()))

    table = _explore(((q, 0) for q in sorted(gnba.initial, key=str)), expand, _Budget("degeneralize"))
    if k:
        accepting = frozenset(n for n in table if n[1] == 0 and n[0] in sets[0])
    else:
        accepting = frozenset(table)
    return Nba(
        states=tuple(table),
        initial=frozenset((q, 0) for q in gnba.initial),
        trans=table,
        accepting=accepting,
    )


def _class_successor(lasso: Lasso) -> Tuple[int, Callable[[int], int]]:
    seq = lasso.letters
    end = seq.threshold + seq.period

    def nxt(j: int) -> int:
        return j + 1 if j + 1 < end else seq.threshold

    return end, nxt


def position_class(lasso: Lasso, pos: int) -> int:
    seq = lasso.letters
    if pos < seq.threshold:
        return pos
    return seq.threshold + (pos - seq.threshold) % seq.period


def _buchi_on_lasso(
    initial: Iterable[State],
    successors: Callable[[State, Letter], Sequence[State]],
    accepting: Callable[[State], bool],
    lasso: Lasso,
    start: int,
) -> bool:
    """Is there a run from (start, q0) visiting accepting states infinitely often?"""
    _, nxt = _class_successor(lasso)
    graph = nx.DiGraph()
    queue = deque()
    for q in initial:
        node = (position_class(lasso, start), q)
        graph.add_node(node)
        queue.append(node)
    seen = set(queue)
    while queue:
        node = queue.popleft()
        j, q = node
        for t in successors(q, lasso.at(j)):
            tgt = (nxt(j), t)
            graph.add_edge(node, tgt)
            if tgt not in seen:
                seen.add(tgt)
                queue.append(tgt)
    return _has_accepting_cycle(graph, lambda node: accepting(node[1]))


def _has_accepting_cycle(graph: nx.DiGraph, accepting: Callable[[State], bool]) -> bool:
    for scc in nx.strongly_connected_components(graph):
        if not _nontrivial(graph, scc):
            continue
        if any(accepting(n) for n in scc):
            return True
    return False


def _nontrivial(graph: nx.DiGraph, scc) -> bool:
    if len(scc) > 1:
        return True
    (only,) = tuple(scc)
    return graph.has_edge(only, only)


_ROOT = ("__root__",)


def nba_emptiness(nba: Nba) -> Optional[Lasso]:
    """None when the language is empty, otherwise an accepted lasso."""
    graph = nx.DiGraph()
    graph.add_node(_ROOT)
    for q in nba.initial:
        graph.add_edge(_ROOT, q, cube=TRUE_CUBE)
    for q, edges in nba.trans.items():
        for c, t in edges:
            if not graph.has_edge(q, t):
                graph.add_edge(q, t, cube=c)
    reach = nx.descendants(graph, _ROOT)
    sub = graph.subgraph(reach)
    components = sorted(nx.strongly_connected_components(sub), key=lambda s: min(map(str, s)))
    for scc in components:
        if not _nontrivial(sub, scc):
            continue
        hits = sorted((q for q in scc if q in nba.accepting), key=str)
        if not hits:
            continue
        target = hits[0]
        stem_nodes = nx.shortest_path(graph, _ROOT, target)[1:]
        if sub.has_edge(target, target):
            cycle = [target, target]
        else:
            inner = sub.subgraph(scc)
            nxt = sorted((t for t in inner.successors(target)), key=str)[0]
            cycle = [target] + nx.shortest_path(inner, nxt, target)
        stem = tuple(cube_letter(graph.edges[a, b]["cube"]) for a, b in zip(stem_nodes, stem_nodes[1:]))
        loop = tuple(cube_letter(graph.edges[a, b]["cube"]) for a, b in zip(cycle, cycle[1:]))
        witness = Lasso(stem, loop)
        logger.debug("nba nonempty witness=%s states=%s", witness, len(nba.states))
        return witness
    return None


# ─────────────────────────────────────────────────────────────────────────────
# Atoms automaton of PLTL guards
# ─────────────────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class AtomsAutomaton:
    """GNBA whose state i is the atom ``atoms[i]``; it accepts from position 0."""

    gnba: Gnba
    closure: Tuple[Formula, ...]
    names: Mapping[Formula, str] = field(hash=False, compare=False)
    atoms: Tuple[FrozenSet[Formula], ...] = ()

    def label(self, i: int) -> FrozenSet[str]:
        """Positive at-propositions of atom i (⊤ excluded)."""
        return frozenset(self.names[g] for g in self.atoms[i] if g in self.names)

    def props_view(self, i: int) -> FrozenSet[str]:
        """Atomic propositions the atom asserts."""
        return frozenset(g.name for g in self.atoms[i] if isinstance(g, Prop))


def _locally_consistent(atom: FrozenSet[Formula], cl: Sequence[Formula]) -> bool:
    for g in cl:
        if isinstance(g, (Until, Since)):
            here = g in atom
            if truth(g.right, atom) and not here:
                return False
            if here and not truth(g.right, atom) and not truth(g.left, atom):
                return False
    return True


def _step_ok(a: FrozenSet[Formula], b: FrozenSet[Formula], cl: Sequence[Formula]) -> bool:
    for g in cl:
        if isinstance(g, Next):
            if (g in a) != truth(g.arg, b):
                return False
        elif isinstance(g, Yesterday):
            if (g in b) != truth(g.arg, a):
                return False
        elif isinstance(g, Until):
            if (g in a) != (truth(g.right, a) or (truth(g.left, a) and g in b)):
                return False
        elif isinstance(g, Since):
            if (g in b) != (truth(g.right, b) or (truth(g.left, b) and g in a)):
                return False
    return True


def _initial_ok(a: FrozenSet[Formula], cl: Sequence[Formula]) -> bool:
    for g in cl:
        if isinstance(g, Yesterday) and g in a:
            return False
        if isinstance(g, Since) and (g in a) != truth(g.right, a):
            return False
    return True


def pltl_atoms_gnba(guards: Iterable[Formula]) -> AtomsAutomaton:
    """
    Atoms automaton of a set of PLTL guards over the propositions of the
    guards plus one at-proposition per non-atomic closure formula. Every
    transition out of atom A reads exactly the letter at(A).
    """
    cl = closure(guards)
    names = at_names(cl)
    elementary = [g for g in cl if isinstance(g, ELEMENTARY)]
    budget = _Budget("atoms")
    atoms: List[FrozenSet[Formula]] = []
    for bits in product((False, True), repeat=len(elementary)):
        chosen = frozenset(g for g, on in zip(elementary, bits) if on)
        atom = frozenset(g for g in cl if truth(g, chosen))
        if _locally_consistent(atom, cl):
            budget.charge()
            atoms.append(atom)
    letters = [
        frozenset((names[g], g in atom) for g in cl if g in names)
        for atom in atoms
    ]
    trans = {
        i: tuple((letters[i], j) for j, b in enumerate(atoms) if _step_ok(a, b, cl))
        for i, a in enumerate(atoms)
    }
    initial = frozenset(i for i, a in enumerate(atoms) if _initial_ok(a, cl))
    acceptance = tuple(
        frozenset(i for i, a in enumerate(atoms) if g not in a or truth(g.right, a))
        for g in cl
        if isinstance(g, Until)
    )
    gnba = Gnba(states=tuple(range(len(atoms))), initial=initial, trans=trans, acceptance=acceptance)
    logger.info(
        "stage=atoms closure=%s atoms=%s initial=%s acceptance_sets=%s",
        len(cl),
        len(atoms),
        len(initial),
        len(acceptance),
    )
    return AtomsAutomaton(gnba=gnba, closure=cl, names=names, atoms=tuple(atoms))


# ─────────────────────────────────────────────────────────────────────────────
# Two-way (pointed) Büchi automata
# ─────────────────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class Snba:
    states: Tuple[State, ...]
    initial: FrozenSet[State]
    fwd: Mapping[State, Edges] = field(hash=False, compare=False)
    bwd: Mapping[State, Edges] = field(hash=False, compare=False)
    f_minus: FrozenSet[State] = frozenset()
    f_plus: FrozenSet[State] = frozenset()

    @property
    def props(self) -> FrozenSet[str]:
        return _edge_props(self.fwd) | _edge_props(self.bwd)

    def stats(self) -> Dict[str, int]:
        return {
            "states": len(self.states),
            "fwd": sum(len(v) for v in self.fwd.values()),
            "bwd": sum(len(v) for v in self.bwd.values()),
            "f_minus": len(self.f_minus),
            "f_plus": len(self.f_plus),
        }

    def to_dot(self, name: str = "S") -> str:
        """Forward edges solid, backward edges dashed; F⁺ double circles, F⁻ boxes."""
        ids = {q: i for i, q in enumerate(self.states)}
        lines = [f"digraph {name} {{", "  rankdir=LR;"]
        for q, i in ids.items():
            shape = "doublecircle" if q in self.f_plus else ("box" if q in self.f_minus else "circle")
            lines.append(f'  q{i} [shape={shape}, label="{q}"];')
            if q in self.initial:
                lines.append(f"  init{i} [shape=point];")
                lines.append(f"  init{i} -> q{i};")
        for style, table in (("solid", self.fwd), ("dashed", self.bwd)):
            for q, edges in table.items():
                for c, t in edges:
                    lines.append(f'  q{ids[q]} -> q{ids[t]} [style={style}, label="{render_cube(c)}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def accepts(self, pt: PointedLasso) -> bool:
        """Membership of a pointed lasso."""
        alive = set(self.f_minus)
        for h in range(0, pt.pos + 1):
            sigma = pt.lasso.at(h)
            alive = {
                q
                for q in self.states
                if any(t in alive and cube_holds(c, sigma) for c, t in self.bwd.get(q, ()))
            }
        good = [q for q in self.initial if q in alive]
        if not good:
            return False

        def successors(q: State, sigma: Letter) -> Tuple[State, ...]:
            return tuple(t for c, t in self.fwd.get(q, ()) if cube_holds(c, sigma))

        return _buchi_on_lasso(good, successors, self.f_plus.__contains__, pt.lasso, pt.pos)


def _build_snba(
    initial: Iterable[State],
    fwd_of: Callable[[State], Edges],
    bwd_of: Callable[[State], Edges],
    f_minus: Callable[[State], bool],
    f_plus: Callable[[State], bool],
    stage: str,
    limit: Optional[int] = None,
) -> Snba:
    """Materialize an SNBA: forward moves from forward-reachable states, backward ones likewise."""
    initial = tuple(initial)
    budget = _Budget(stage, limit)
    fwd = _explore(initial, fwd_of, budget)
    bwd = _explore(initial, bwd_of, budget)
    states = tuple(dict.fromkeys(list(fwd) + list(bwd)))
    return Snba(
        states=states,
        initial=frozenset(initial),
        fwd=fwd,
        bwd=bwd,
        f_minus=frozenset(q for q in bwd if f_minus(q)),
        f_plus=frozenset(q for q in fwd if f_plus(q)),
    )


def snba_trim(a: Snba) -> Snba:
    """
    Drop forward states that cannot reach an accepting cycle and backward
    states that cannot reach F⁻. The language is unchanged.
    """
    graph = nx.DiGraph()
    graph.add_nodes_from(a.fwd)
    for q, edges in a.fwd.items():
        graph.add_edges_from((q, t) for _, t in edges)
    live_fwd = set()
    for scc in nx.strongly_connected_components(graph):
        if _nontrivial(graph, scc) and any(q in a.f_plus for q in scc):
            live_fwd |= scc
    for q in list(live_fwd):
        live_fwd |= nx.ancestors(graph, q)

    back = nx.DiGraph()
    back.add_nodes_from(a.bwd)
    for q, edges in a.bwd.items():
        back.add_edges_from((t, q) for _, t in edges)
    live_bwd = set()
    for q in a.f_minus:
        if q in back:
            live_bwd.add(q)
            live_bwd |= nx.descendants(back, q)

    initial = frozenset(q for q in a.initial if q in live_fwd and q in live_bwd)
    fwd = {q: tuple((c, t) for c, t in a.fwd[q] if t in live_fwd) for q in a.fwd if q in live_fwd}
    bwd = {q: tuple((c, t) for c, t in a.bwd[q] if t in live_bwd) for q in a.bwd if q in live_bwd}
    return Snba(
        states=tuple(dict.fromkeys(list(fwd) + list(bwd))),
        initial=initial,
        fwd=fwd,
        bwd=bwd,
        f_minus=frozenset(q for q in a.f_minus if q in live_bwd),
        f_plus=frozenset(q for q in a.f_plus if q in live_fwd),
    )


def snba_true() -> Snba:
    loop = ((TRUE_CUBE, "u"),)
    return Snba(("u",), frozenset({"u"}), {"u": loop}, {"u": loop}, frozenset({"u"}), frozenset({"u"}))


def snba_false() -> Snba:
    return Snba((), frozenset(), {}, {}, frozenset(), frozenset())


def snba_literal(name: str, positive: bool = True) -> Snba:
    """``name`` (or its negation) holds at the pointed position."""
    loop = ((TRUE_CUBE, "ok"),)
    return Snba(
        states=("chk", "ok"),
        initial=frozenset({"chk"}),
        fwd={"chk": ((cube((name, positive)), "ok"),), "ok": loop},
        bwd={"chk": ((TRUE_CUBE, "ok"),), "ok": loop},
        f_minus=frozenset({"ok"}),
        f_plus=frozenset({"ok"}),
    )


def snba_origin() -> Snba:
    """The pointed position is 0."""
    return Snba(
        states=("o", "end", "u"),
        initial=frozenset({"o"}),
        fwd={"o": ((TRUE_CUBE, "u"),), "u": ((TRUE_CUBE, "u"),)},
        bwd={"o": ((TRUE_CUBE, "end"),), "end": ()},
        f_minus=frozenset({"end"}),
        f_plus=frozenset({"u"}),
    )


def snba_intersect(a: Snba, b: Snba) -> Snba:
    def fwd_of(node) -> Edges:
        qa, qb, k = node
        if k == 0:
            k2 = 1 if qa in a.f_plus else 0
        else:
            k2 = 0 if qb in b.f_plus else 1
        out = []
        for ca, ta in a.fwd.get(qa, ()):
            for cb, tb in b.fwd.get(qb, ()):
                c = cube_and(ca, cb)
                if c is not None:
                    out.append((c, (ta, tb, k2)))
        return tuple(out)

    def bwd_of(node) -> Edges:
        qa, qb, _ = node
        out = []
        for ca, ta in a.bwd.get(qa, ()):
            for cb, tb in b.bwd.get(qb, ()):
                c = cube_and(ca, cb)
                if c is not None:
                    out.append((c, (ta, tb, 0)))
        return tuple(out)

    return _build_snba(
        ((qa, qb, 0) for qa in a.initial for qb in b.initial),
        fwd_of,
        bwd_of,
        lambda n: n[0] in a.f_minus and n[1] in b.f_minus,
        lambda n: n[2] == 0 and n[0] in a.f_plus,
        "snba-intersect",
    )


def _tagged(table: Mapping[State, Edges], tag) -> Callable[[State], Edges]:
    def of(node) -> Edges:
        return tuple((c, (tag, t)) for c, t in table.get(node[1], ()))

    return of


def snba_union(a: Snba, b: Snba) -> Snba:
    parts = {"l": a, "r": b}

    def fwd_of(node) -> Edges:
        return _tagged(parts[node[0]].fwd, node[0])(node)

    def bwd_of(node) -> Edges:
        return _tagged(parts[node[0]].bwd, node[0])(node)

    return _build_snba(
        [("l", q) for q in a.initial] + [("r", q) for q in b.initial],
        fwd_of,
        bwd_of,
        lambda n: n[1] in parts[n[0]].f_minus,
        lambda n: n[1] in parts[n[0]].f_plus,
        "snba-union",
    )


def snba_project(a: Snba, name: str) -> Snba:
    """
    ∃name. Both copies read σ(i), so the initial copies fix one value of
    ``name`` for the first letter; later positions choose freely.
    """

    def restrict(edges: Edges, value: Optional[bool]) -> Edges:
        out = []
        for c, t in edges:
            if value is not None:
                c = cube_and(c, cube((name, value)))
                if c is None:
                    continue
            out.append((cube_drop(c, (name,)), ("s", t)))
        return tuple(out)

    def fwd_of(node) -> Edges:
        if node[0] == "v":
            return restrict(a.fwd.get(node[1], ()), node[2])
        return restrict(a.fwd.get(node[1], ()), None)

    def bwd_of(node) -> Edges:
        if node[0] == "v":
            return restrict(a.bwd.get(node[1], ()), node[2])
        return restrict(a.bwd.get(node[1], ()), None)

    return _build_snba(
        [("v", q, v) for q in a.initial for v in (True, False)],
        fwd_of,
        bwd_of,
        lambda n: n[1] in a.f_minus,
        lambda n: n[1] in a.f_plus,
        "snba-project",
    )


def snba_shift_next(a: Snba) -> Snba:
    """Pointed words (σ, i) with (σ, i+1) accepted by ``a``."""
    entries = []
    for q0 in a.initial:
        for cb, qb in a.bwd.get(q0, ()):
            for cf, qf in a.fwd.get(q0, ()):
                c = cube_and(cb, cf)
                if c is not None:
                    entries.append(("i", qb, c, qf))

    def fwd_of(node) -> Edges:
        kind = node[0]
        if kind == "i":
            return ((TRUE_CUBE, ("c", node[2], node[3])),)
        if kind == "c":
            return ((node[1], ("s", node[2])),)
        return _tagged(a.fwd, "s")(node)

    def bwd_of(node) -> Edges:
        kind = node[0]
        if kind == "i":
            return tuple((c, ("s", t)) for c, t in a.bwd.get(node[1], ()))
        if kind == "c":
            return ()
        return _tagged(a.bwd, "s")(node)

    return _build_snba(
        entries,
        fwd_of,
        bwd_of,
        lambda n: n[0] == "s" and n[1] in a.f_minus,
        lambda n: n[0] == "s" and n[1] in a.f_plus,
        "snba-next",
    )


def snba_shift_prev(a: Snba) -> Snba:
    """Pointed words (σ, i) with i > 0 and (σ, i-1) accepted by ``a``."""
    entries = []
    for q0 in a.initial:
        for cf, qf in a.fwd.get(q0, ()):
            for cb, qb in a.bwd.get(q0, ()):
                c = cube_and(cb, cf)
                if c is not None:
                    entries.append(("i", qf, c, qb))

    def fwd_of(node) -> Edges:
        kind = node[0]
        if kind == "i":
            return tuple((c, ("s", t)) for c, t in a.fwd.get(node[1], ()))
        if kind == "c":
            return ()
        return _tagged(a.fwd, "s")(node)

    def bwd_of(node) -> Edges:
        kind = node[0]
        if kind == "i":
            return ((TRUE_CUBE, ("c", node[2], node[3])),)
        if kind == "c":
            return ((node[1], ("s", node[2])),)
        return _tagged(a.bwd, "s")(node)

    return _build_snba(
        entries,
        fwd_of,
        bwd_of,
        lambda n: n[0] == "s" and n[1] in a.f_minus,
        lambda n: n[0] == "s" and n[1] in a.f_plus,
        "snba-prev",
    )


def snba_origin_nba(a: Snba) -> Nba:
    """NBA for the words σ with (σ, 0) accepted by ``a``."""
    start = ("__start__",)
    entry = []
    for q0 in a.initial:
        for cb, qb in a.bwd.get(q0, ()):
            if qb not in a.f_minus:
                continue
            for cf, q1 in a.fwd.get(q0, ()):
                c = cube_and(cb, cf)
                if c is not None:
                    entry.append((c, q1))

    def expand(q) -> Edges:
        if q == start:
            return tuple(dict.fromkeys(entry))
        return tuple(a.fwd.get(q, ()))

    table = _explore([start], expand, _Budget("snba-origin"))
    return Nba(
        states=tuple(table),
        initial=frozenset({start}),
        trans=table,
        accepting=frozenset(q for q in table if q != start and q in a.f_plus),
    )


__all__ = [
    "Cube",
    "TRUE_CUBE",
    "cube",
    "cube_and",
    "cube_all",
    "cube_holds",
    "cube_drop",
    "cube_letter",
    "cube_props",
    "render_cube",
    "Nba",
    "Gnba",
    "gnba_to_nba",
    "position_class",
    "nba_emptiness",
    "AtomsAutomaton",
    "pltl_atoms_gnba",
    "Snba",
    "snba_true",
    "snba_false",
    "snba_literal",
    "snba_origin",
    "snba_intersect",
    "snba_union",
    "snba_project",
    "snba_shift_next",
    "snba_shift_prev",
    "snba_origin_nba",
    "snba_trim",
]
