"""
PLTL guards: core form, closure and the fresh ``at`` propositions.

A guard is a PLTL formula that the Γ-elimination stage replaces by a fresh
atomic proposition whose truth is tracked by an atoms automaton.
"""

from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, Tuple

from .errors import FragmentError
from .formula import (
    TRUE,
    Always,
    And,
    Eventually,
    Formula,
    Historically,
    Iff,
    Implies,
    Next,
    Not,
    Once,
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

AT_PREFIX = "$at"


@lru_cache(maxsize=None)
def pltl_core(f: Formula) -> Formula:
    """Rewrite a PLTL formula over ⊤, p, ¬, ∨, X, Y, U and S only."""
    if isinstance(f, (Top, Prop)):
        return f
    if isinstance(f, Not):
        inner = pltl_core(f.arg)
        return inner.arg if isinstance(inner, Not) else Not(inner)
    if isinstance(f, Or):
        return Or(pltl_core(f.left), pltl_core(f.right))
    if isinstance(f, And):
        return _not(Or(_not(pltl_core(f.left)), _not(pltl_core(f.right))))
    if isinstance(f, Implies):
        return Or(_not(pltl_core(f.left)), pltl_core(f.right))
    if isinstance(f, Iff):
        return pltl_core(Or(And(f.left, f.right), And(Not(f.left), Not(f.right))))
    if getattr(f, "gamma", ()):
        raise FragmentError("guards are plain PLTL: no stutter subscript allowed")
    if isinstance(f, Next):
        return Next(pltl_core(f.arg))
    if isinstance(f, Yesterday):
        return Yesterday(pltl_core(f.arg))
    if isinstance(f, Until):
        return Until(pltl_core(f.left), pltl_core(f.right))
    if isinstance(f, Since):
        return Since(pltl_core(f.left), pltl_core(f.right))
    if isinstance(f, Eventually):
        return Until(TRUE, pltl_core(f.arg))
    if isinstance(f, Once):
        return Since(TRUE, pltl_core(f.arg))
    if isinstance(f, Always):
        return _not(Until(TRUE, _not(pltl_core(f.arg))))
    if isinstance(f, Historically):
        return _not(Since(TRUE, _not(pltl_core(f.arg))))
    if isinstance(f, Release):
        return _not(Until(_not(pltl_core(f.left)), _not(pltl_core(f.right))))
    if isinstance(f, PastRelease):
        return _not(Since(_not(pltl_core(f.left)), _not(pltl_core(f.right))))
    raise FragmentError(f"{type(f).__name__} is not a PLTL node")


def _not(f: Formula) -> Formula:
    return f.arg if isinstance(f, Not) else Not(f)


def positive(f: Formula) -> Formula:
    """Strip leading negations."""
    while isinstance(f, Not):
        f = f.arg
    return f


ELEMENTARY = (Prop, Next, Yesterday, Until, Since)


def closure(gamma: Iterable[Formula]) -> Tuple[Formula, ...]:
    """
    Positive subformulas of the core forms of ``gamma`` plus ⊤ and Y⊤,
    ordered by size then text so numbering is stable.
    """
    found = {TRUE, Yesterday(TRUE)}
    stack = [pltl_core(g) for g in gamma]
    while stack:
        node = positive(stack.pop())
        if node in found:
            continue
        found.add(node)
        stack.extend(node.children())
    return tuple(sorted(found, key=lambda g: (_depth(g), render(g))))


def _depth(f: Formula) -> int:
    kids = f.children()
    return 1 + max((_depth(k) for k in kids), default=0)


def at_names(cl: Iterable[Formula]) -> Dict[Formula, str]:
    """at(p) = p, at(⊤) is not materialized, every other formula gets ``$at<i>``."""
    names: Dict[Formula, str] = {}
    index = 0
    for g in cl:
        if isinstance(g, Top):
            continue
        if isinstance(g, Prop):
            names[g] = g.name
            continue
        names[g] = f"{AT_PREFIX}{index}"
        index += 1
    return names


def truth(f: Formula, atom: FrozenSet[Formula]) -> bool:
    """Truth of a closure formula or its negation relative to an atom."""
    if isinstance(f, Top):
        return True
    if isinstance(f, Not):
        return not truth(f.arg, atom)
    if isinstance(f, Or):
        return truth(f.left, atom) or truth(f.right, atom)
    return f in atom


def guard_literal(f: Formula, names: Dict[Formula, str]) -> Tuple[str, bool]:
    """(at-proposition, polarity) standing for guard ``f``; ⊤ has no proposition."""
    core = pltl_core(f)
    polarity = True
    while isinstance(core, Not):
        core, polarity = core.arg, not polarity
    if isinstance(core, Top):
        raise ValueError("⊤ has no at-proposition")
    return names[core], polarity


__all__ = [
    "AT_PREFIX",
    "ELEMENTARY",
    "pltl_core",
    "positive",
    "closure",
    "at_names",
    "truth",
    "guard_literal",
]
