"""
QPTL to two-way Büchi automata, and QPTL satisfiability.

The translation works on negation normal form, bottom-up:

- literals map to the small base automata;
- ∧, ∨, X and Y map to product, union and the two shifts;
- ∃p projects p away; ∀p complements the automaton of its dual through
  the alternating view (dualize, then remove alternation);
- a quantifier-free formula goes through the two-way tableau (tableau.py);
  inside a conjunction all quantifier-free conjuncts share one tableau;
- a temporal formula over quantified subformulas becomes a hesitant
  alternating automaton in which every maximal quantified subformula is
  embedded as an already built automaton; alternation is then removed.

An anchored automaton is only exact at position 0; the root of a
satisfiability check is translated that way, and the anchoring is carried
through ∧, ∨ and ∃. Results are memoized per (subformula, anchoring)
within one Translator.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .automata import (
    Nba,
    Snba,
    nba_emptiness,
    snba_false,
    snba_intersect,
    snba_literal,
    snba_origin,
    snba_origin_nba,
    snba_project,
    snba_shift_next,
    snba_shift_prev,
    snba_true,
    snba_union,
)
from .config import get_settings
from .errors import HyperMCError, NotSentenceError
from .formula import (
    And,
    ExistsProp,
    ForallProp,
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
    conj,
    is_literal,
    render,
    size,
)
from .haa import (
    B_FALSE,
    B_TRUE,
    BACKWARD,
    FORWARD,
    BExpr,
    BLit,
    BMove,
    Component,
    TwoWayHaa,
    b_and,
    b_or,
    dualize,
    gn_marks,
    haa_to_snba,
    snba_as_haa,
    snba_components,
    snba_entry,
    validate_haa,
)
from .kripke import Lasso, PointedLasso
from .syntax import free_props, is_quantifier_free, strong_alternation_depth, to_nnf
from .tableau import tableau_snba

logger = logging.getLogger(__name__)


def _is_origin(f: Formula) -> bool:
    return isinstance(f, Not) and isinstance(f.arg, Yesterday) and isinstance(f.arg.arg, Top)


class _HaaBuilder:
    """Hesitant alternating automaton of one NNF formula."""

    def __init__(self, translator: "Translator"):
        self.translator = translator
        self.delta: Dict[object, BExpr] = {}
        self.components: List[Component] = []
        self.f_minus = set()
        self.embedded: Dict[Formula, tuple] = {}

    def build(self, f: Formula) -> TwoWayHaa:
        start = ("init",)
        self.delta[start] = self.expr(f)
        self.components.append(Component("transient", frozenset({start})))
        haa = TwoWayHaa(
            states=tuple(self.delta),
            initial=start,
            delta=self.delta,
            f_minus=frozenset(self.f_minus),
            components=tuple(self.components),
        )
        return validate_haa(haa)

    def _define(self, key, kind: str, body, *, final: bool = False) -> None:
        if key in self.delta:
            return
        self.delta[key] = B_FALSE
        self.delta[key] = body()
        self.components.append(Component(kind, frozenset({key})))
        if final:
            self.f_minus.add(key)

    def expr(self, f: Formula) -> BExpr:
        if isinstance(f, Top):
            return B_TRUE
        if isinstance(f, Prop):
            return BLit(f.name, True)
        if _is_origin(f):
            key = ("origin",)
            self._define(key, "transient", lambda: B_FALSE, final=True)
            return BMove(BACKWARD, key)
        if isinstance(f, Not):
            if isinstance(f.arg, Top):
                return B_FALSE
            if isinstance(f.arg, Prop):
                return BLit(f.arg.name, False)
            raise HyperMCError(f"formula is not in negation normal form: {render(f)}")
        if isinstance(f, And):
            return b_and(self.expr(f.left), self.expr(f.right))
        if isinstance(f, Or):
            return b_or(self.expr(f.left), self.expr(f.right))
        if isinstance(f, Next):
            key = ("X", f.arg)
            self._define(key, "transient", lambda: self.expr(f.arg))
            return BMove(FORWARD, key)
        if isinstance(f, Yesterday):
            key = ("Y", f.arg)
            self._define(key, "transient", lambda: self.expr(f.arg))
            return BMove(BACKWARD, key)
        if isinstance(f, Until):
            key = ("U", f)
            self._define(key, "buchi", lambda: b_or(self.expr(f.right), b_and(self.expr(f.left), BMove(FORWARD, key))))
            return self.delta[key]
        if isinstance(f, Release):
            key = ("R", f)
            self._define(key, "cobuchi", lambda: b_and(self.expr(f.right), b_or(self.expr(f.left), BMove(FORWARD, key))))
            return self.delta[key]
        if isinstance(f, Since):
            key = ("S", f)
            self._define(key, "negative", lambda: b_or(self.expr(f.right), b_and(self.expr(f.left), BMove(BACKWARD, key))))
            return self.delta[key]
        if isinstance(f, PastRelease):
            key = ("P", f)
            self._define(
                key,
                "negative",
                lambda: b_and(self.expr(f.right), b_or(self.expr(f.left), BMove(BACKWARD, key))),
                final=True,
            )
            return self.delta[key]
        if isinstance(f, (ExistsProp, ForallProp)):
            return self._embed(f)
        raise HyperMCError(f"unexpected node {type(f).__name__} in QPTL translation")

    def _embed(self, f: Formula) -> BExpr:
        hit = self.embedded.get(f)
        if hit is None:
            tag = ("emb", len(self.embedded))
            sub = self.translator.snba(f)
            delta, f_minus, comps = snba_components(sub, tag)
            self.delta.update(delta)
            self.f_minus |= f_minus
            self.components.extend(c for c in comps if c.states)
            hit = (tag, sub)
            self.embedded[f] = hit
        tag, sub = hit
        return snba_entry(sub, tag)


@dataclass
class TranslationStats:
    snba_states: int = 0
    haa_states: int = 0
    tableau_states: int = 0
    gn_components: int = 0
    other_components: int = 0
    formulas: int = 0


def _conjuncts(f: Formula) -> List[Formula]:
    out, stack = [], [f]
    while stack:
        node = stack.pop()
        if isinstance(node, And):
            stack.extend((node.right, node.left))
        else:
            out.append(node)
    return out


class Translator:
    """Memoizing QPTL → Snba translation."""

    def __init__(self, limit: Optional[int] = None):
        settings = get_settings()
        self.limit = settings.state_limit if limit is None else limit
        self.report_gn = settings.gn_report
        self.memo: Dict[Tuple[Formula, bool], Snba] = {}
        self.stats = TranslationStats()

    def snba(self, f: Formula, anchored: bool = False) -> Snba:
        """Automaton for the pointed words satisfying ``f`` (given in NNF)."""
        key = (f, anchored)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        out = self._translate(f, anchored)
        self.memo[key] = out
        self.stats.formulas += 1
        self.stats.snba_states = max(self.stats.snba_states, len(out.states))
        return out

    def _tableau(self, f: Formula, anchored: bool) -> Snba:
        out = tableau_snba(f, anchored, self.limit)
        self.stats.tableau_states = max(self.stats.tableau_states, len(out.states))
        return out

    def _translate(self, f: Formula, anchored: bool) -> Snba:
        if is_literal(f):
            return self._literal(f)
        if is_quantifier_free(f):
            return self._tableau(f, anchored)
        if isinstance(f, And):
            plain, rest = [], []
            for part in _conjuncts(f):
                (plain if is_quantifier_free(part) else rest).append(part)
            parts = [self.snba(r, anchored) for r in rest]
            if plain:
                parts.insert(0, self.snba(conj(plain), anchored))
            out = parts[0]
            for nxt in parts[1:]:
                out = snba_intersect(out, nxt)
            return out
        if isinstance(f, Or):
            return snba_union(self.snba(f.left, anchored), self.snba(f.right, anchored))
        if isinstance(f, Next):
            return snba_shift_next(self.snba(f.arg))
        if isinstance(f, Yesterday):
            return snba_shift_prev(self.snba(f.arg))
        if isinstance(f, ExistsProp):
            return snba_project(self.snba(f.body, anchored), f.prop)
        if isinstance(f, ForallProp):
            inner = self.snba(ExistsProp(f.prop, to_nnf(Not(f.body))))
            return self._dealternate(dualize(snba_as_haa(inner)))
        return self._dealternate(_HaaBuilder(self).build(f))

    def _literal(self, f: Formula) -> Snba:
        if isinstance(f, Top):
            return snba_true()
        if isinstance(f, Prop):
            return snba_literal(f.name, True)
        if _is_origin(f):
            return snba_origin()
        if isinstance(f.arg, Top):
            return snba_false()
        return snba_literal(f.arg.name, False)

    def _dealternate(self, haa: TwoWayHaa) -> Snba:
        self.stats.haa_states = max(self.stats.haa_states, len(haa.states))
        if self.report_gn:
            marks = gn_marks(haa)
            self.stats.gn_components += sum(1 for v in marks.values() if v)
            self.stats.other_components += sum(1 for v in marks.values() if not v)
        return haa_to_snba(haa, self.limit)


def qptl_to_snba(f: Formula, limit: Optional[int] = None) -> Snba:
    return Translator(limit).snba(to_nnf(f))


@dataclass
class SatResult:
    satisfiable: bool
    witness: Optional[Lasso] = None
    sad: int = 0
    seconds: float = 0.0
    stats: Dict[str, int] = field(default_factory=dict)
    automaton: Optional[Snba] = field(default=None, repr=False)
    nba: Optional[Nba] = field(default=None, repr=False)


def qptl_sat(psi: Formula, limit: Optional[int] = None, require_closed: bool = True) -> SatResult:
    """
    Satisfiability of a QPTL formula at position 0. Leading existential
    quantifiers are kept as free propositions so the witness shows their
    values; a closed formula under a universal root is decided through its
    negation.
    """
    started = time.perf_counter()
    if require_closed and free_props(psi):
        raise NotSentenceError(f"free propositions: {', '.join(sorted(free_props(psi)))}")
    f = to_nnf(psi)
    sad = strong_alternation_depth(f)
    while isinstance(f, ExistsProp):
        f = f.body
    if isinstance(f, ForallProp) and not free_props(f):
        inner = qptl_sat(Not(f), limit, require_closed=False)
        out = SatResult(not inner.satisfiable, None if inner.satisfiable else Lasso((), (frozenset(),)), sad)
        out.seconds = time.perf_counter() - started
        out.stats = inner.stats
        return out

    translator = Translator(limit)
    automaton = translator.snba(f, anchored=True)
    nba = snba_origin_nba(automaton)
    witness = nba_emptiness(nba)
    if witness is not None and not automaton.accepts(PointedLasso(witness, 0)):
        logger.warning("qptl witness failed re-verification formula=%s witness=%s", render(psi), witness)
    seconds = time.perf_counter() - started
    stats = {
        "formula_size": size(psi),
        "snba_states": len(automaton.states),
        "nba_states": len(nba.states),
        "max_haa_states": translator.stats.haa_states,
        "max_tableau_states": translator.stats.tableau_states,
        "subformulas": translator.stats.formulas,
    }
    if translator.report_gn:
        stats["gn_components"] = translator.stats.gn_components
        stats["other_components"] = translator.stats.other_components
    logger.info(
        "stage=qptl-sat satisfiable=%s sad=%s snba_states=%s seconds=%.3f",
        witness is not None,
        sad,
        len(automaton.states),
        seconds,
    )
    return SatResult(witness is not None, witness, sad, seconds, stats, automaton, nba)


__all__ = ["Translator", "TranslationStats", "qptl_to_snba", "SatResult", "qptl_sat"]
