"""
Fair finite Kripke structures, their text format and lasso traces.

Text format, one declaration per line::

    # comment
    state a init fair { p q }
    state b { }
    edge a b
    edge b a

A state list without any ``fair`` flag means every state is fair.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from lark import Lark, Transformer, UnexpectedInput

from .errors import DuplicateStateError, KripkeFormatError, NotTotalError, UnknownStateError

logger = logging.getLogger(__name__)

Letter = FrozenSet[str]


def letter(*props: str) -> Letter:
    return frozenset(props)


def render_letter(value: Letter) -> str:
    return "{" + " ".join(sorted(value)) + "}"


# ─────────────────────────────────────────────────────────────────────────────
# Ultimately periodic sequences
# ─────────────────────────────────────────────────────────────────────────────


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@dataclass(frozen=True)
class UPSeq:
    """An ultimately periodic sequence prefix·loop^ω with loop nonempty."""

    prefix: Tuple
    loop: Tuple

    def __post_init__(self):
        if not self.loop:
            raise ValueError("ultimately periodic sequence needs a nonempty loop")

    @property
    def threshold(self) -> int:
        return len(self.prefix)

    @property
    def period(self) -> int:
        return len(self.loop)

    def at(self, j: int):
        if j < len(self.prefix):
            return self.prefix[j]
        return self.loop[(j - len(self.prefix)) % len(self.loop)]

    @classmethod
    def constant(cls, value) -> "UPSeq":
        return cls((), (value,))

    @classmethod
    def from_function(cls, fn: Callable[[int], object], threshold: int, period: int) -> "UPSeq":
        prefix = tuple(fn(j) for j in range(threshold))
        loop = tuple(fn(j) for j in range(threshold, threshold + period))
        return cls(prefix, loop).normalized()

    def normalized(self) -> "UPSeq":
        loop = _primitive_root(self.loop)
        prefix = self.prefix
        while prefix and prefix[-1] == loop[-1]:
            prefix = prefix[:-1]
            loop = (loop[-1],) + loop[:-1]
        if prefix == self.prefix and loop == self.loop:
            return self
        return UPSeq(prefix, loop)

    def map(self, fn: Callable) -> "UPSeq":
        return UPSeq(tuple(fn(v) for v in self.prefix), tuple(fn(v) for v in self.loop)).normalized()

    def zip_with(self, other: "UPSeq", fn: Callable) -> "UPSeq":
        threshold = max(self.threshold, other.threshold)
        period = lcm(self.period, other.period)
        return UPSeq.from_function(lambda j: fn(self.at(j), other.at(j)), threshold, period)

    def shift(self, k: int) -> "UPSeq":
        """The suffix starting at position k."""
        return UPSeq.from_function(lambda j: self.at(j + k), max(0, self.threshold - k), self.period)

    def positions(self, value) -> Iterable[int]:
        """Positions holding value within one unrolling: prefix then one loop pass."""
        for j in range(self.threshold + self.period):
            if self.at(j) == value:
                yield j


def _primitive_root(word: Tuple) -> Tuple:
    n = len(word)
    for size in range(1, n + 1):
        if n % size == 0 and word[:size] * (n // size) == word:
            return word[:size]
    return word


# ─────────────────────────────────────────────────────────────────────────────
# Lassos
# ─────────────────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class Lasso:
    """The trace stem·loop^ω."""

    stem: Tuple[Letter, ...]
    loop: Tuple[Letter, ...]

    def __post_init__(self):
        if not self.loop:
            raise ValueError("lasso loop must be nonempty")

    @classmethod
    def of(cls, stem: Sequence[Iterable[str]], loop: Sequence[Iterable[str]]) -> "Lasso":
        return cls(tuple(frozenset(a) for a in stem), tuple(frozenset(a) for a in loop))

    @cached_property
    def letters(self) -> UPSeq:
        return UPSeq(self.stem, self.loop)

    def at(self, j: int) -> Letter:
        return self.letters.at(j)

    def canonical(self) -> "Lasso":
        """
        Unique representative of the trace: primitive loop and the shortest
        stem. Two lassos denote the same trace iff their canonical forms are
        equal.
        """
        norm = self.letters.normalized()
        return Lasso(norm.prefix, norm.loop)

    def same_trace(self, other: "Lasso") -> bool:
        return self.canonical() == other.canonical()

    def project(self, props: Iterable[str]) -> "Lasso":
        keep = frozenset(props)
        return Lasso(tuple(a & keep for a in self.stem), tuple(a & keep for a in self.loop))

    def unroll(self, n: int) -> List[Letter]:
        return [self.at(j) for j in range(n)]

    def props(self) -> FrozenSet[str]:
        out: Set[str] = set()
        for a in self.stem + self.loop:
            out |= a
        return frozenset(out)

    def __str__(self) -> str:
        stem = "".join(render_letter(a) for a in self.stem)
        loop = "".join(render_letter(a) for a in self.loop)
        return f"{stem}({loop})^w"


@dataclass(frozen=True)
class PointedLasso:
    lasso: Lasso
    pos: int = 0

    def letter(self) -> Letter:
        return self.lasso.at(self.pos)

    def moved(self, pos: int) -> "PointedLasso":
        return PointedLasso(self.lasso, pos)


# ─────────────────────────────────────────────────────────────────────────────
# Fair Kripke structures
# ─────────────────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class FairKripke:
    states: Tuple[str, ...]
    init: FrozenSet[str]
    edges: FrozenSet[Tuple[str, str]]
    labels: Mapping[str, FrozenSet[str]] = field(hash=False, compare=True)
    fair: FrozenSet[str] = frozenset()

    @cached_property
    def successors(self) -> Dict[str, Tuple[str, ...]]:
        succ: Dict[str, List[str]] = {s: [] for s in self.states}
        for a, b in sorted(self.edges):
            succ[a].append(b)
        return {s: tuple(v) for s, v in succ.items()}

    @cached_property
    def predecessors(self) -> Dict[str, Tuple[str, ...]]:
        pred: Dict[str, List[str]] = {s: [] for s in self.states}
        for a, b in sorted(self.edges):
            pred[b].append(a)
        return {s: tuple(v) for s, v in pred.items()}

    @property
    def ap(self) -> FrozenSet[str]:
        out: Set[str] = set()
        for props in self.labels.values():
            out |= props
        return frozenset(out)

    def label(self, state: str) -> Letter:
        return self.labels[state]

    def validate(self) -> "FairKripke":
        seen: Set[str] = set()
        for s in self.states:
            if s in seen:
                raise DuplicateStateError(s)
            seen.add(s)
        for a, b in self.edges:
            for s in (a, b):
                if s not in seen:
                    raise UnknownStateError(s)
        for s in self.init | self.fair:
            if s not in seen:
                raise UnknownStateError(s)
        for s in self.states:
            if not self.successors[s]:
                raise NotTotalError(s)
        return self

    def to_text(self) -> str:
        lines = []
        all_fair = self.fair == frozenset(self.states)
        for s in self.states:
            flags = ""
            if s in self.init:
                flags += " init"
            if s in self.fair and not all_fair:
                flags += " fair"
            props = " ".join(sorted(self.labels[s]))
            lines.append(f"state {s}{flags} {{ {props} }}".replace("{  }", "{ }"))
        for a, b in sorted(self.edges):
            lines.append(f"edge {a} {b}")
        return "\n".join(lines) + "\n"

    def to_dot(self, name: str = "K") -> str:
        lines = [f"digraph {name} {{", "  rankdir=LR;"]
        for s in self.states:
            shape = "doublecircle" if s in self.fair else "circle"
            props = ",".join(sorted(self.labels[s]))
            lines.append(f'  "{s}" [shape={shape}, label="{s}\\n{{{props}}}"];')
            if s in self.init:
                lines.append(f'  "__init_{s}" [shape=point];')
                lines.append(f'  "__init_{s}" -> "{s}";')
        for a, b in sorted(self.edges):
            lines.append(f'  "{a}" -> "{b}";')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def stats(self) -> Dict[str, int]:
        return {"states": len(self.states), "edges": len(self.edges), "fair": len(self.fair)}


def make_kripke(
    states: Mapping[str, Iterable[str]],
    edges: Iterable[Tuple[str, str]],
    init: Iterable[str],
    fair: Optional[Iterable[str]] = None,
) -> FairKripke:
    """Build and validate a structure from plain Python values; fair=None means all states."""
    names = tuple(states)
    labels = {s: frozenset(props) for s, props in states.items()}
    return FairKripke(
        states=names,
        init=frozenset(init),
        edges=frozenset(edges),
        labels=labels,
        fair=frozenset(names if fair is None else fair),
    ).validate()


# ─────────────────────────────────────────────────────────────────────────────
# Text format
# ─────────────────────────────────────────────────────────────────────────────

_GRAMMAR = r"""
start: decl*
?decl: state_decl | edge_decl
state_decl: "state" NAME state_flag* "{" NAME* "}"
state_flag: INIT | FAIR
edge_decl: "edge" NAME NAME

INIT: "init"
FAIR: "fair"
NAME: /[A-Za-z_$][A-Za-z0-9_$]*/
COMMENT: /#[^\n]*/

%import common.WS
%ignore WS
%ignore COMMENT
"""

_PARSER = Lark(_GRAMMAR, parser="lalr", lexer="contextual")


class _KripkeBuilder(Transformer):
    def state_flag(self, items):
        return str(items[0])

    def state_decl(self, items):
        name = str(items[0])
        flags = [i for i in items[1:] if i in ("init", "fair") and not hasattr(i, "type")]
        props = [str(i) for i in items[1:] if hasattr(i, "type")]
        return ("state", name, flags, props, items[0].line)

    def edge_decl(self, items):
        return ("edge", str(items[0]), str(items[1]), items[0].line)

    def start(self, items):
        return list(items)


def parse_kripke(text: str) -> FairKripke:
    try:
        tree = _PARSER.parse(text)
    except UnexpectedInput as exc:
        raise KripkeFormatError(f"invalid Kripke text: {exc.__class__.__name__}", exc.line, exc.column) from exc
    decls = _KripkeBuilder().transform(tree)

    names: List[str] = []
    labels: Dict[str, FrozenSet[str]] = {}
    init: Set[str] = set()
    fair: Set[str] = set()
    edges: Set[Tuple[str, str]] = set()
    any_fair = False
    for decl in decls:
        if decl[0] != "state":
            continue
        _, name, flags, props, _line = decl
        if name in labels:
            raise DuplicateStateError(name)
        names.append(name)
        labels[name] = frozenset(props)
        if "init" in flags:
            init.add(name)
        if "fair" in flags:
            fair.add(name)
            any_fair = True
    for decl in decls:
        if decl[0] != "edge":
            continue
        _, a, b, _line = decl
        for s in (a, b):
            if s not in labels:
                raise UnknownStateError(s)
        edges.add((a, b))
    kripke = FairKripke(
        states=tuple(names),
        init=frozenset(init),
        edges=frozenset(edges),
        labels=labels,
        fair=frozenset(fair if any_fair else names),
    ).validate()
    logger.debug("kripke parsed states=%s edges=%s fair=%s", len(names), len(edges), len(kripke.fair))
    return kripke


def load_kripke(path) -> FairKripke:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_kripke(fh.read())


# ─────────────────────────────────────────────────────────────────────────────
# Bounded fair lasso enumeration
# ─────────────────────────────────────────────────────────────────────────────


def fair_lasso_paths(kripke: FairKripke, n: int) -> Iterable[Tuple[Tuple[str, ...], int]]:
    """
    Yield (path, j) for every path s0..sk from an initial state with k < n and
    a back-edge sk -> sj whose cycle sj..sk visits a fair state.
    """
    if n < 1:
        raise ValueError("lasso bound must be at least 1")
    stack: List[Tuple[str, ...]] = [(s,) for s in sorted(kripke.init)]
    while stack:
        path = stack.pop()
        last = path[-1]
        succ = kripke.successors[last]
        for j, s in enumerate(path):
            if s in succ and any(t in kripke.fair for t in path[j:]):
                yield path, j
        if len(path) < n:
            stack.extend(path + (t,) for t in reversed(succ))


def fair_lassos_upto(kripke: FairKripke, n: int) -> FrozenSet[Lasso]:
    found: Set[Lasso] = set()
    for path, j in fair_lasso_paths(kripke, n):
        word = tuple(kripke.labels[s] for s in path)
        found.add(Lasso(word[:j], word[j:]).canonical())
    logger.debug("fair lassos n=%s count=%s", n, len(found))
    return frozenset(found)


def fair_state_lassos_upto(kripke: FairKripke, n: int) -> FrozenSet[Tuple[Tuple[str, ...], Tuple[str, ...]]]:
    """Like fair_lassos_upto but over state names, (stem, loop) canonicalized the same way."""
    found = set()
    for path, j in fair_lasso_paths(kripke, n):
        norm = UPSeq(path[:j], path[j:]).normalized()
        found.add((norm.prefix, norm.loop))
    return frozenset(found)


__all__ = [
    "Letter",
    "letter",
    "render_letter",
    "lcm",
    "UPSeq",
    "Lasso",
    "PointedLasso",
    "FairKripke",
    "make_kripke",
    "parse_kripke",
    "load_kripke",
    "fair_lasso_paths",
    "fair_lassos_upto",
    "fair_state_lassos_upto",
]
