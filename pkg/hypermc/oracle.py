"""
Bounded explicit-semantics evaluator.

PLTL is evaluated exactly on lassos: every subformula becomes an ultimately
periodic truth sequence. GHyperLTL sentences are evaluated over a finite set
of lassos with trace quantifiers ranging over the set and pointed quantifiers
over a bounded range of positions; verdicts are three-valued (None means the
position bound was not enough to decide).
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache, reduce
from typing import Callable, Dict, FrozenSet, Iterable, Optional, Sequence, Tuple, Union

from .errors import FragmentError, FreeVariableError
from .formula import (
    POINTED_QUANTIFIERS,
    TEMPORAL,
    Always,
    And,
    Ctx,
    Eventually,
    Exists,
    ExistsP,
    Formula,
    Historically,
    Iff,
    Implies,
    Knows,
    Next,
    Not,
    Once,
    Or,
    PastRelease,
    Prop,
    RelPltl,
    RelProp,
    Release,
    Since,
    Top,
    Until,
    Yesterday,
    subformulas,
    trace_vars,
)
from .kltl import check_agents
from .kripke import Lasso, PointedLasso, UPSeq, lcm
from .syntax import count_temporal, desugar, hyper_past_free, normalize_contexts, require_sentence

logger = logging.getLogger(__name__)

Kleene = Optional[bool]


class Verdict(str, Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    @classmethod
    def of(cls, value: Kleene) -> "Verdict":
        if value is None:
            return cls.UNKNOWN
        return cls.TRUE if value else cls.FALSE


def k_not(a: Kleene) -> Kleene:
    return None if a is None else not a


def k_and(a: Kleene, b: Kleene) -> Kleene:
    if a is False or b is False:
        return False
    if a is None or b is None:
        return None
    return True


def k_or(a: Kleene, b: Kleene) -> Kleene:
    if a is True or b is True:
        return True
    if a is None or b is None:
        return None
    return False


# ─────────────────────────────────────────────────────────────────────────────
# PLTL on ultimately periodic sequences
# ─────────────────────────────────────────────────────────────────────────────

TRUE_SEQ = UPSeq((), (True,))


def _until(left: UPSeq, right: UPSeq) -> UPSeq:
    threshold = max(left.threshold, right.threshold)
    period = lcm(left.period, right.period)
    loop = []
    for j in range(threshold, threshold + period):
        value = False
        for k in range(j, j + period):
            if right.at(k):
                value = True
                break
            if not left.at(k):
                break
        loop.append(value)
    prefix = [False] * threshold
    following = loop[0] if loop else False
    for j in range(threshold - 1, -1, -1):
        following = right.at(j) or (left.at(j) and following)
        prefix[j] = following
    return UPSeq(tuple(prefix), tuple(loop)).normalized()


def _since(left: UPSeq, right: UPSeq) -> UPSeq:
    threshold = max(left.threshold, right.threshold)
    period = lcm(left.period, right.period)
    values = []
    seen: Dict[Tuple[int, bool], int] = {}
    previous = False
    j = 0
    while True:
        current = right.at(j) or (j > 0 and left.at(j) and previous)
        if j >= threshold:
            key = ((j - threshold) % period, current)
            if key in seen:
                start = seen[key]
                return UPSeq(tuple(values[:start]), tuple(values[start:])).normalized()
            seen[key] = j
        values.append(current)
        previous = current
        j += 1


def _yesterday(arg: UPSeq) -> UPSeq:
    return UPSeq.from_function(lambda j: j > 0 and arg.at(j - 1), arg.threshold + 1, arg.period)


class SeqEvaluator:
    """
    Truth sequences of PLTL formulas over one trace.

    ``leaf`` resolves every node that is not a Boolean or temporal operator
    (propositions, and knowledge operators for KLTL).
    """

    def __init__(self, leaf: Callable[[Formula], UPSeq]):
        self.leaf = leaf
        self.memo: Dict[Formula, UPSeq] = {}

    def values(self, f: Formula) -> UPSeq:
        hit = self.memo.get(f)
        if hit is None:
            hit = self._compute(f)
            self.memo[f] = hit
        return hit

    def _compute(self, f: Formula) -> UPSeq:
        v = self.values
        if isinstance(f, Top):
            return TRUE_SEQ
        if isinstance(f, Not):
            return v(f.arg).map(lambda a: not a)
        if isinstance(f, And):
            return v(f.left).zip_with(v(f.right), lambda a, b: a and b)
        if isinstance(f, Or):
            return v(f.left).zip_with(v(f.right), lambda a, b: a or b)
        if isinstance(f, Implies):
            return v(f.left).zip_with(v(f.right), lambda a, b: (not a) or b)
        if isinstance(f, Iff):
            return v(f.left).zip_with(v(f.right), lambda a, b: a == b)
        if isinstance(f, TEMPORAL) and f.gamma:
            raise FragmentError("Γ subscripts are not PLTL")
        if isinstance(f, Next):
            return v(f.arg).shift(1)
        if isinstance(f, Yesterday):
            return _yesterday(v(f.arg))
        if isinstance(f, Until):
            return _until(v(f.left), v(f.right))
        if isinstance(f, Since):
            return _since(v(f.left), v(f.right))
        if isinstance(f, Release):
            return _until(v(Not(f.left)), v(Not(f.right))).map(lambda a: not a)
        if isinstance(f, PastRelease):
            return _since(v(Not(f.left)), v(Not(f.right))).map(lambda a: not a)
        if isinstance(f, Eventually):
            return _until(TRUE_SEQ, v(f.arg))
        if isinstance(f, Always):
            return _until(TRUE_SEQ, v(Not(f.arg))).map(lambda a: not a)
        if isinstance(f, Once):
            return _since(TRUE_SEQ, v(f.arg))
        if isinstance(f, Historically):
            return _since(TRUE_SEQ, v(Not(f.arg))).map(lambda a: not a)
        return self.leaf(f)


def lasso_evaluator(lasso: Lasso) -> SeqEvaluator:
    letters = lasso.letters

    def leaf(f: Formula) -> UPSeq:
        if isinstance(f, Prop):
            return letters.map(lambda a: f.name in a)
        raise FragmentError(f"{type(f).__name__} is not a PLTL node")

    return SeqEvaluator(leaf)


@lru_cache(maxsize=4096)
def pltl_values(lasso: Lasso, f: Formula) -> UPSeq:
    """Truth sequence of the PLTL formula f along the lasso."""
    return lasso_evaluator(lasso).values(f)


def eval_pltl_lasso(pt: PointedLasso, f: Formula) -> bool:
    return bool(pltl_values(pt.lasso, f).at(pt.pos))


# ─────────────────────────────────────────────────────────────────────────────
# Γ-valuations and stutter breakpoints
# ─────────────────────────────────────────────────────────────────────────────


@lru_cache(maxsize=4096)
def gamma_valuation(lasso: Lasso, gamma: Tuple[Formula, ...]) -> UPSeq:
    """Position -> tuple of truth values of the Γ formulas (in Γ order)."""
    if not gamma:
        return UPSeq.constant(())
    seqs = [pltl_values(lasso, g) for g in gamma]
    threshold = max(s.threshold for s in seqs)
    period = reduce(lcm, (s.period for s in seqs), 1)
    return UPSeq.from_function(lambda j: tuple(s.at(j) for s in seqs), threshold, period)


@lru_cache(maxsize=4096)
def gamma_breakpoints(lasso: Lasso, gamma: Tuple[Formula, ...]) -> UPSeq:
    """
    Boolean sequence marking the Γ-stutter positions: 0, every position whose
    valuation differs from its predecessor's, and every position once the
    valuation is constant for good.
    """
    val = gamma_valuation(lasso, gamma)
    settled = val.period == 1

    def is_break(j: int) -> bool:
        if j == 0:
            return True
        if settled and j >= val.threshold:
            return True
        return val.at(j) != val.at(j - 1)

    return UPSeq.from_function(is_break, val.threshold + 1, val.period)


def next_breakpoint(bp: UPSeq, i: int) -> int:
    j = i + 1
    while not bp.at(j):
        j += 1
    return j


def previous_breakpoint(bp: UPSeq, i: int) -> Optional[int]:
    if i == 0:
        return None
    j = i - 1
    while not bp.at(j):
        j -= 1
    return j


# ─────────────────────────────────────────────────────────────────────────────
# Trace assignments
# ─────────────────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class TraceAssignment:
    """Partial map var -> (lasso index, position) together with the current context."""

    positions: Tuple[Tuple[str, int, int], ...] = ()
    context: FrozenSet[str] = frozenset()

    def lookup(self, var: str) -> Tuple[int, int]:
        for name, idx, pos in self.positions:
            if name == var:
                return idx, pos
        raise FreeVariableError(f"trace variable {var!r} is not assigned")

    @property
    def domain(self) -> FrozenSet[str]:
        return frozenset(name for name, _, _ in self.positions)

    def bind(self, var: str, idx: int, pos: int) -> "TraceAssignment":
        kept = tuple(p for p in self.positions if p[0] != var)
        return TraceAssignment(tuple(sorted(kept + ((var, idx, pos),))), self.context)

    def with_context(self, context: Iterable[str]) -> "TraceAssignment":
        return TraceAssignment(self.positions, frozenset(context))

    def pointed(self, model: Sequence[Lasso], var: str) -> PointedLasso:
        idx, pos = self.lookup(var)
        return PointedLasso(model[idx], pos)


def joint_step(
    model: Sequence[Lasso],
    assignment: TraceAssignment,
    gamma: Tuple[Formula, ...],
    direction: str,
    pred_scope: str = "domain",
) -> Optional[TraceAssignment]:
    """
    (Γ,C)-successor or predecessor: variables in C move to their next/previous
    Γ-breakpoint, the others stay. The predecessor is undefined (None) when a
    variable of the domain (``pred_scope="domain"``) or of C ∩ domain
    (``"context"``) sits at position 0.
    """
    if direction not in ("succ", "pred"):
        raise ValueError(f"unknown direction {direction!r}")
    if pred_scope not in ("domain", "context"):
        raise ValueError(f"unknown pred scope {pred_scope!r}")
    moving = assignment.context
    if direction == "pred":
        watched = [p for p in assignment.positions if pred_scope == "domain" or p[0] in moving]
        if any(pos == 0 for _, _, pos in watched):
            return None
    stepped = []
    for var, idx, pos in assignment.positions:
        if var in moving:
            bp = gamma_breakpoints(model[idx], gamma)
            pos = next_breakpoint(bp, pos) if direction == "succ" else previous_breakpoint(bp, pos)
        stepped.append((var, idx, pos))
    return TraceAssignment(tuple(stepped), assignment.context)


# ─────────────────────────────────────────────────────────────────────────────
# Bounded GHyperLTL evaluation
# ─────────────────────────────────────────────────────────────────────────────


class _Beyond:
    """Marks a configuration folded out of the evaluated window."""

    def __repr__(self) -> str:
        return "BEYOND"


BEYOND = _Beyond()


def default_pos_bound(model: Sequence[Lasso], f: Formula) -> int:
    pointed = sum(1 for n in subformulas(f) if isinstance(n, POINTED_QUANTIFIERS))
    longest = max((len(l.stem) + 2 * len(l.loop) for l in model), default=1)
    return max(1, longest * pointed)


class HyperEvaluator:
    """
    Evaluates one GHyperLTL sentence over a finite lasso set.

    Pn is the lcm of every period involved (letters, Γ-breakpoints, [ψ]@x
    truth sequences) and Tn their largest threshold.

    Without hyper-level past, positions are folded per variable: p >= Tn + Pn
    becomes Tn + (p - Tn) mod Pn, which is exact. With hyper-level past the
    distances between the variables matter, so all positions are shifted by
    the same multiple of Pn instead, and only once every one of them lies
    past Tn + Pn. Tn then gets a margin of Pn·(1 + #temporal)·max(1, #vars);
    a configuration that spreads past the horizon evaluates to unknown.
    """

    def __init__(
        self,
        model: Sequence[Lasso],
        formula: Formula,
        pos_bound: Optional[int] = None,
        pred_scope: str = "domain",
    ):
        self.model = tuple(model)
        self.source = formula
        self.formula = desugar(normalize_contexts(formula))
        self.pred_scope = pred_scope
        self.pos_bound = pos_bound or default_pos_bound(self.model, formula)
        self.exact_pointed = hyper_past_free(self.formula)
        self.memo: Dict[Tuple[Formula, TraceAssignment], Kleene] = {}

        gammas = {n.gamma for n in subformulas(self.formula) if isinstance(n, TEMPORAL)}
        bodies = {n.formula for n in subformulas(self.formula) if isinstance(n, RelPltl)}
        seqs = [l.letters for l in self.model]
        for lasso in self.model:
            seqs.extend(gamma_breakpoints(lasso, g) for g in gammas)
            seqs.extend(pltl_values(lasso, b) for b in bodies)
        t0 = max((s.threshold for s in seqs), default=0)
        self.period = reduce(lcm, (s.period for s in seqs), 1)
        n_vars = max(1, len(trace_vars(self.formula)))
        if self.exact_pointed:
            self.threshold = t0
        else:
            margin = (1 + count_temporal(self.formula)) * n_vars
            self.threshold = t0 + self.period * margin
        self.horizon = max(self.pos_bound, self.threshold) + self.period * (1 + n_vars)
        logger.debug(
            "oracle lassos=%s threshold=%s period=%s pos_bound=%s exact=%s",
            len(self.model),
            self.threshold,
            self.period,
            self.pos_bound,
            self.exact_pointed,
        )

    # ── positions ──────────────────────────────────────────────────────────

    def normalize_pos(self, pos: int) -> int:
        if pos >= self.threshold + self.period:
            return self.threshold + (pos - self.threshold) % self.period
        return pos

    def normalize(self, cfg: TraceAssignment) -> Union[TraceAssignment, _Beyond]:
        if self.exact_pointed:
            moved = tuple((v, i, self.normalize_pos(p)) for v, i, p in cfg.positions)
            return TraceAssignment(moved, cfg.context)
        low = min((p for _, _, p in cfg.positions), default=0)
        shift = 0
        if low >= self.threshold + self.period:
            shift = (low - self.threshold) // self.period * self.period
        moved = tuple((v, i, p - shift) for v, i, p in cfg.positions)
        if any(p >= self.horizon for _, _, p in moved):
            return BEYOND
        return TraceAssignment(moved, cfg.context)

    def step(self, cfg: TraceAssignment, gamma, direction: str) -> Union[TraceAssignment, _Beyond, None]:
        nxt = joint_step(self.model, cfg, gamma, direction, self.pred_scope)
        return None if nxt is None else self.normalize(nxt)

    def pointed_range(self) -> range:
        if self.exact_pointed:
            return range(max(self.pos_bound, self.threshold + self.period))
        return range(self.pos_bound)

    # ── evaluation ─────────────────────────────────────────────────────────

    def run(self) -> Kleene:
        top = TraceAssignment((), frozenset(trace_vars(self.formula)))
        return self.value(self.formula, top)

    def value(self, f: Formula, cfg: TraceAssignment) -> Kleene:
        key = (f, cfg)
        if key in self.memo:
            return self.memo[key]
        out = self._compute(f, cfg)
        self.memo[key] = out
        return out

    def _compute(self, f: Formula, cfg: TraceAssignment) -> Kleene:
        if isinstance(f, Top):
            return True
        if isinstance(f, RelProp):
            idx, pos = cfg.lookup(f.var)
            return f.prop in self.model[idx].at(pos)
        if isinstance(f, RelPltl):
            idx, pos = cfg.lookup(f.var)
            return bool(pltl_values(self.model[idx], f.formula).at(pos))
        if isinstance(f, Not):
            return k_not(self.value(f.arg, cfg))
        if isinstance(f, And):
            left = self.value(f.left, cfg)
            return False if left is False else k_and(left, self.value(f.right, cfg))
        if isinstance(f, Or):
            left = self.value(f.left, cfg)
            return True if left is True else k_or(left, self.value(f.right, cfg))
        if isinstance(f, Ctx):
            return self.value(f.body, cfg.with_context(f.vars))
        if isinstance(f, Exists):
            return self._exists(f, cfg, range(1))
        if isinstance(f, ExistsP):
            result = self._exists(f, cfg, self.pointed_range())
            if result is not True and not self.exact_pointed:
                return None
            return result
        if isinstance(f, Next):
            nxt = self.step(cfg, f.gamma, "succ")
            return None if nxt is BEYOND else self.value(f.arg, nxt)
        if isinstance(f, Yesterday):
            prev = self.step(cfg, f.gamma, "pred")
            if prev is None:
                return False
            return None if prev is BEYOND else self.value(f.arg, prev)
        if isinstance(f, Until):
            return self._until(f, cfg)
        if isinstance(f, Since):
            return self._since(f, cfg)
        raise FragmentError(f"oracle cannot evaluate {type(f).__name__} nodes")

    def _exists(self, f: Formula, cfg: TraceAssignment, positions: range) -> Kleene:
        result: Kleene = False
        for idx in range(len(self.model)):
            for pos in positions:
                bound = self.normalize(cfg.bind(f.var, idx, pos))
                result = k_or(result, None if bound is BEYOND else self.value(f.body, bound))
                if result is True:
                    return True
        return result

    def _until(self, f: Until, cfg: TraceAssignment) -> Kleene:
        result: Kleene = False
        guard: Kleene = True
        seen = set()
        current = cfg
        while current not in seen:
            seen.add(current)
            result = k_or(result, k_and(guard, self.value(f.right, current)))
            guard = k_and(guard, self.value(f.left, current))
            if result is True or guard is False:
                break
            current = self.step(current, f.gamma, "succ")
            if current is BEYOND:
                return k_or(result, k_and(guard, None))
        return result

    def _since(self, f: Since, cfg: TraceAssignment) -> Kleene:
        result: Kleene = False
        guard: Kleene = True
        seen = set()
        current: Optional[TraceAssignment] = cfg
        while current is not None and current not in seen:
            seen.add(current)
            result = k_or(result, k_and(guard, self.value(f.right, current)))
            guard = k_and(guard, self.value(f.left, current))
            if result is True or guard is False:
                break
            current = self.step(current, f.gamma, "pred")
            if current is BEYOND:
                return k_or(result, k_and(guard, None))
        return result


def eval_hyper_bounded(
    model: Iterable[Lasso],
    formula: Formula,
    pos_bound: Optional[int] = None,
    pred_scope: str = "domain",
) -> Verdict:
    """Three-valued verdict of a GHyperLTL sentence on a finite set of lassos."""
    require_sentence(formula)
    lassos = sorted(set(model), key=str)
    evaluator = HyperEvaluator(lassos, formula, pos_bound, pred_scope)
    verdict = Verdict.of(evaluator.run())
    logger.info("oracle verdict=%s lassos=%s configs=%s", verdict.value, len(lassos), len(evaluator.memo))
    return verdict


# ─────────────────────────────────────────────────────────────────────────────
# Synchronous perfect-recall KLTL
# ─────────────────────────────────────────────────────────────────────────────


def _first_disagreement(a: Lasso, b: Lasso, observed: FrozenSet[str]) -> Optional[int]:
    horizon = max(len(a.stem), len(b.stem)) + lcm(len(a.loop), len(b.loop))
    for j in range(horizon):
        if a.at(j) & observed != b.at(j) & observed:
            return j
    return None


def eval_kltl_sync(model: Iterable[Lasso], formula: Formula, obs: Dict[str, FrozenSet[str]]) -> bool:
    """
    Synchronous perfect-recall semantics: (σ,i) ⊨ K_a φ iff every trace of the
    model agreeing with σ on Obs(a) over [0,i] satisfies φ at i. The model
    satisfies the formula iff every trace does at position 0.
    """
    check_agents(formula, obs)
    lassos = sorted(set(model), key=str)
    evaluators: Dict[int, SeqEvaluator] = {}

    def evaluator(k: int) -> SeqEvaluator:
        if k not in evaluators:
            evaluators[k] = SeqEvaluator(lambda f, k=k: leaf(k, f))
        return evaluators[k]

    def leaf(k: int, f: Formula) -> UPSeq:
        lasso = lassos[k]
        if isinstance(f, Prop):
            return lasso.letters.map(lambda a: f.name in a)
        if isinstance(f, Knows):
            observed = frozenset(obs[f.agent])
            cut = [_first_disagreement(lasso, other, observed) for other in lassos]
            inner = [evaluator(m).values(f.arg) for m in range(len(lassos))]
            horizon = max((c for c in cut if c is not None), default=0) + 1
            threshold = horizon + max(s.threshold for s in inner)
            period = reduce(lcm, (s.period for s in inner), 1)

            def knows(j: int) -> bool:
                return all(inner[m].at(j) for m, c in enumerate(cut) if c is None or c > j)

            return UPSeq.from_function(knows, threshold, period)
        raise FragmentError(f"{type(f).__name__} is not a KLTL node")

    return all(evaluator(k).values(formula).at(0) for k in range(len(lassos)))


__all__ = [
    "Verdict",
    "Kleene",
    "k_and",
    "k_or",
    "k_not",
    "SeqEvaluator",
    "pltl_values",
    "eval_pltl_lasso",
    "gamma_valuation",
    "gamma_breakpoints",
    "next_breakpoint",
    "previous_breakpoint",
    "TraceAssignment",
    "joint_step",
    "default_pos_bound",
    "HyperEvaluator",
    "eval_hyper_bounded",
    "eval_kltl_sync",
]
