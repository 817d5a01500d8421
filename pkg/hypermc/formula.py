"""
Formula ASTs shared by every logic hypermc handles.

One node vocabulary covers PLTL, QPTL, KLTL and GHyperLTL with stuttering
and contexts. Which nodes may appear depends on the logic:

- PLTL: Top, Prop, Boolean connectives, temporal operators with empty Γ.
- QPTL: PLTL plus ExistsProp / ForallProp.
- KLTL: PLTL plus Knows.
- GHyperLTL: Top, RelProp, RelPltl, Boolean connectives, temporal operators
  carrying a Γ subscript, trace quantifiers (plain and pointed) and Ctx.

Nodes are immutable and hash structurally; the hash is computed once per
node so that memo tables keyed by formulas stay cheap.
"""

from dataclasses import dataclass, fields, replace
from functools import cached_property, reduce
from typing import Callable, ClassVar, Iterable, Iterator, Tuple

SHARP = "$sharp"


@dataclass(frozen=True, eq=False)
class Formula:
    _child_fields: ClassVar[Tuple[str, ...]] = ()

    @cached_property
    def _key(self) -> tuple:
        return tuple(getattr(self, f.name) for f in fields(self))

    @cached_property
    def _hash(self) -> int:
        return hash((type(self).__name__,) + self._key)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if type(self) is not type(other):
            return False
        return self._hash == other._hash and self._key == other._key

    def __str__(self) -> str:
        return render(self)

    def __repr__(self) -> str:
        return f"{type(self).__name__}<{render(self)}>"

    def children(self) -> Tuple["Formula", ...]:
        return tuple(getattr(self, name) for name in self._child_fields)

    def with_children(self, kids: Iterable["Formula"]) -> "Formula":
        kids = tuple(kids)
        if kids == self.children():
            return self
        return replace(self, **dict(zip(self._child_fields, kids)))


# ─────────────────────────────────────────────────────────────────────────────
# Atoms and Boolean connectives
# ─────────────────────────────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class Top(Formula):
    pass


@dataclass(frozen=True, eq=False)
class Prop(Formula):
    name: str


@dataclass(frozen=True, eq=False)
class Not(Formula):
    arg: Formula
    _child_fields: ClassVar[Tuple[str, ...]] = ("arg",)


@dataclass(frozen=True, eq=False)
class Or(Formula):
    left: Formula
    right: Formula
    _child_fields: ClassVar[Tuple[str, ...]] = ("left", "right")


@dataclass(frozen=True, eq=False)
class And(Formula):
    left: Formula
    right: Formula
    _child_fields: ClassVar[Tuple[str, ...]] = ("left", "right")


@dataclass(frozen=True, eq=False)
class Implies(Formula):
    left: Formula
    right: Formula
    _child_fields: ClassVar[Tuple[str, ...]] = ("left", "right")


@dataclass(frozen=True, eq=False)
class Iff(Formula):
    left: Formula
    right: Formula
    _child_fields: ClassVar[Tuple[str, ...]] = ("left", "right")


# ─────────────────────────────────────────────────────────────────────────────
# Temporal operators; gamma is the stuttering subscript (empty outside
# GHyperLTL), kept sorted by printed form and deduplicated.
# ─────────────────────────────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class Next(Formula):
    arg: Formula
    gamma: Tuple[Formula, ...] = ()
    _child_fields: ClassVar[Tuple[str, ...]] = ("arg",)


@dataclass(frozen=True, eq=False)
class Yesterday(Formula):
    arg: Formula
    gamma: Tuple[Formula, ...] = ()
    _child_fields: ClassVar[Tuple[str, ...]] = ("arg",)


@dataclass(frozen=True, eq=False)
class Eventually(Formula):
    arg: Formula
    gamma: Tuple[Formula, ...] = ()
    _child_fields: ClassVar[Tuple[str, ...]] = ("arg",)


@dataclass(frozen=True, eq=False)
class Always(Formula):
    arg: Formula
    gamma: Tuple[Formula, ...] = ()
    _child_fields: ClassVar[Tuple[str, ...]] = ("arg",)


@dataclass(frozen=True, eq=False)
class Once(Formula):
    arg: Formula
    gamma: Tuple[Formula, ...] = ()
    _child_fields: ClassVar[Tuple[str, ...]] = ("arg",)


@dataclass(frozen=True, eq=False)
class Historically(Formula):
    arg: Formula
    gamma: Tuple[Formula, ...] = ()
    _child_fields: ClassVar[Tuple[str, ...]] = ("arg",)


@dataclass(frozen=True, eq=False)
class Until(Formula):
    left: Formula
    right: Formula
    gamma: Tuple[Formula, ...] = ()
    _child_fields: ClassVar[Tuple[str, ...]] = ("left", "right")


@dataclass(frozen=True, eq=False)
class Since(Formula):
    left: Formula
    right: Formula
    gamma: Tuple[Formula, ...] = ()
    _child_fields: ClassVar[Tuple[str, ...]] = ("left", "right")


@dataclass(frozen=True, eq=False)
class Release(Formula):
    left: Formula
    right: Formula
    gamma: Tuple[Formula, ...] = ()
    _child_fields: ClassVar[Tuple[str, ...]] = ("left", "right")


@dataclass(frozen=True, eq=False)
class PastRelease(Formula):
    left: Formula
    right: Formula
    gamma: Tuple[Formula, ...] = ()
    _child_fields: ClassVar[Tuple[str, ...]] = ("left", "right")


UNARY_TEMPORAL = (Next, Yesterday, Eventually, Always, Once, Historically)
BINARY_TEMPORAL = (Until, Since, Release, PastRelease)
TEMPORAL = UNARY_TEMPORAL + BINARY_TEMPORAL
PAST = (Yesterday, Once, Historically, Since, PastRelease)


# ─────────────────────────────────────────────────────────────────────────────
# Quantifiers, relativized atoms, contexts, knowledge
# ─────────────────────────────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class ExistsProp(Formula):
    prop: str
    body: Formula
    _child_fields: ClassVar[Tuple[str, ...]] = ("body",)


@dataclass(frozen=True, eq=False)
class ForallProp(Formula):
    prop: str
    body: Formula
    _child_fields: ClassVar[Tuple[str, ...]] = ("body",)


@dataclass(frozen=True, eq=False)
class RelProp(Formula):
    prop: str
    var: str


@dataclass(frozen=True, eq=False)
class RelPltl(Formula):
    """⟨var⟩ψ[var]: a PLTL formula evaluated on the trace bound to var."""

    formula: Formula
    var: str


@dataclass(frozen=True, eq=False)
class Exists(Formula):
    var: str
    body: Formula
    _child_fields: ClassVar[Tuple[str, ...]] = ("body",)


@dataclass(frozen=True, eq=False)
class Forall(Formula):
    var: str
    body: Formula
    _child_fields: ClassVar[Tuple[str, ...]] = ("body",)


@dataclass(frozen=True, eq=False)
class ExistsP(Formula):
    var: str
    body: Formula
    _child_fields: ClassVar[Tuple[str, ...]] = ("body",)


@dataclass(frozen=True, eq=False)
class ForallP(Formula):
    var: str
    body: Formula
    _child_fields: ClassVar[Tuple[str, ...]] = ("body",)


@dataclass(frozen=True, eq=False)
class Ctx(Formula):
    vars: Tuple[str, ...]
    body: Formula
    _child_fields: ClassVar[Tuple[str, ...]] = ("body",)


@dataclass(frozen=True, eq=False)
class Knows(Formula):
    agent: str
    arg: Formula
    _child_fields: ClassVar[Tuple[str, ...]] = ("arg",)


PROP_QUANTIFIERS = (ExistsProp, ForallProp)
TRACE_QUANTIFIERS = (Exists, Forall, ExistsP, ForallP)
POINTED_QUANTIFIERS = (ExistsP, ForallP)


# ─────────────────────────────────────────────────────────────────────────────
# Builders
# ─────────────────────────────────────────────────────────────────────────────

TRUE = Top()
FALSE = Not(TRUE)


def prop(name: str) -> Prop:
    return Prop(name)


def neg(f: Formula) -> Formula:
    """Negation that cancels a double negation."""
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def conj(*parts: Formula) -> Formula:
    items = [p for p in _flatten(parts) if p != TRUE]
    if any(p == FALSE for p in items):
        return FALSE
    if not items:
        return TRUE
    return reduce(lambda acc, nxt: And(acc, nxt), items)


def disj(*parts: Formula) -> Formula:
    items = [p for p in _flatten(parts) if p != FALSE]
    if any(p == TRUE for p in items):
        return TRUE
    if not items:
        return FALSE
    return reduce(lambda acc, nxt: Or(acc, nxt), items)


def _flatten(parts) -> Iterator[Formula]:
    for part in parts:
        if isinstance(part, Formula):
            yield part
        else:
            yield from part


def next_n(f: Formula, n: int) -> Formula:
    for _ in range(n):
        f = Next(f)
    return f


def yesterday_n(f: Formula, n: int) -> Formula:
    for _ in range(n):
        f = Yesterday(f)
    return f


def origin() -> Formula:
    """¬Y⊤: true exactly at position 0."""
    return Not(Yesterday(TRUE))


def canonical_gamma(items: Iterable[Formula]) -> Tuple[Formula, ...]:
    unique = {render(item): item for item in items}
    return tuple(unique[key] for key in sorted(unique))


# ─────────────────────────────────────────────────────────────────────────────
# Traversal
# ─────────────────────────────────────────────────────────────────────────────


def subformulas(f: Formula) -> Iterator[Formula]:
    """Pre-order walk over f and its children (not into Γ or RelPltl bodies)."""
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children()))


def transform(f: Formula, fn: Callable[[Formula], Formula]) -> Formula:
    """Bottom-up rebuild: fn sees each node after its children were rebuilt."""
    memo = {}

    def go(node: Formula) -> Formula:
        hit = memo.get(node)
        if hit is not None:
            return hit
        rebuilt = node.with_children(go(child) for child in node.children())
        out = fn(rebuilt)
        memo[node] = out
        return out

    return go(f)


def size(f: Formula) -> int:
    total = 0
    for node in subformulas(f):
        total += 1
        if isinstance(node, TEMPORAL):
            total += sum(size(g) for g in node.gamma)
        if isinstance(node, RelPltl):
            total += size(node.formula)
    return total


def props_of(f: Formula) -> frozenset:
    """Proposition names occurring in f, bound ones included, Γ and RelPltl bodies included."""
    found = set()
    for node in subformulas(f):
        if isinstance(node, Prop):
            found.add(node.name)
        elif isinstance(node, RelProp):
            found.add(node.prop)
        elif isinstance(node, RelPltl):
            found |= props_of(node.formula)
        elif isinstance(node, PROP_QUANTIFIERS):
            found.add(node.prop)
        if isinstance(node, TEMPORAL):
            for g in node.gamma:
                found |= props_of(g)
    return frozenset(found)


def trace_vars(f: Formula) -> frozenset:
    found = set()
    for node in subformulas(f):
        if isinstance(node, (RelProp, RelPltl)):
            found.add(node.var)
        elif isinstance(node, TRACE_QUANTIFIERS):
            found.add(node.var)
        elif isinstance(node, Ctx):
            found.update(node.vars)
    return frozenset(found)


def is_literal(f: Formula) -> bool:
    """NNF literals: ⊤, ⊥, p, ¬p and the origin literal ¬Y⊤."""
    if isinstance(f, (Top, Prop)):
        return True
    if isinstance(f, Not):
        inner = f.arg
        return isinstance(inner, (Top, Prop)) or (
            isinstance(inner, Yesterday) and isinstance(inner.arg, Top) and not inner.gamma
        )
    return False


# ─────────────────────────────────────────────────────────────────────────────
# Printer: every binary, quantifier and context term is parenthesized so the
# printed text parses back to the same tree.
# ─────────────────────────────────────────────────────────────────────────────

_BINARY_SYMBOL = {Or: "|", And: "&", Implies: "->", Iff: "<->"}
_TEMPORAL_SYMBOL = {
    Next: "X",
    Yesterday: "Y",
    Eventually: "F",
    Always: "G",
    Once: "O",
    Historically: "H",
    Until: "U",
    Since: "S",
    Release: "R",
    PastRelease: "P",
}
_QUANTIFIER_WORD = {
    Exists: "exists",
    Forall: "forall",
    ExistsP: "existsP",
    ForallP: "forallP",
    ExistsProp: "exists",
    ForallProp: "forall",
}


def _subscript(gamma: Tuple[Formula, ...]) -> str:
    if not gamma:
        return ""
    return "{" + ", ".join(render(g) for g in gamma) + "}"


def render(f: Formula) -> str:
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, RelProp):
        return f"{f.prop}@{f.var}"
    if isinstance(f, RelPltl):
        return f"[{render(f.formula)}]@{f.var}"
    if isinstance(f, Not):
        if isinstance(f.arg, Top):
            return "false"
        return "!" + render(f.arg)
    if type(f) in _BINARY_SYMBOL:
        return f"({render(f.left)} {_BINARY_SYMBOL[type(f)]} {render(f.right)})"
    if isinstance(f, UNARY_TEMPORAL):
        return f"{_TEMPORAL_SYMBOL[type(f)]}{_subscript(f.gamma)} {render(f.arg)}"
    if isinstance(f, BINARY_TEMPORAL):
        op = _TEMPORAL_SYMBOL[type(f)] + _subscript(f.gamma)
        return f"({render(f.left)} {op} {render(f.right)})"
    if isinstance(f, PROP_QUANTIFIERS):
        return f"({_QUANTIFIER_WORD[type(f)]} {f.prop}. {render(f.body)})"
    if isinstance(f, TRACE_QUANTIFIERS):
        return f"({_QUANTIFIER_WORD[type(f)]} {f.var}. {render(f.body)})"
    if isinstance(f, Ctx):
        return f"(<{','.join(f.vars)}> {render(f.body)})"
    if isinstance(f, Knows):
        return f"K[{f.agent}] {render(f.arg)}"
    raise TypeError(f"cannot render {type(f).__name__}")
