"""
Normal forms, fragment classification and strong alternation depth.

Everything here is a pure function over the immutable ASTs of
``hypermc.formula``.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import FrozenSet, Optional, Tuple

from .errors import FragmentError, FreeVariableError, NotSentenceError, NotWellNamedError
from .formula import (
    BINARY_TEMPORAL,
    FALSE,
    PAST,
    PROP_QUANTIFIERS,
    TEMPORAL,
    TRACE_QUANTIFIERS,
    TRUE,
    UNARY_TEMPORAL,
    Always,
    And,
    Ctx,
    Eventually,
    Exists,
    ExistsP,
    ExistsProp,
    Forall,
    ForallP,
    ForallProp,
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
    canonical_gamma,
    is_literal,
    origin,
    render,
    subformulas,
    trace_vars,
    transform,
)

logger = logging.getLogger(__name__)


# ─────────────────────────────────────────────────────────────────────────────
# Negation normal form (PLTL / QPTL)
# ─────────────────────────────────────────────────────────────────────────────


@lru_cache(maxsize=None)
def to_nnf(f: Formula) -> Formula:
    """
    Push negations down to literals.

    ∧, R, P and ∀p serve as the duals of ∨, U, S and ∃p. ¬Y⊤ is kept as the
    origin literal and ¬Yφ becomes ¬Y⊤ ∨ Y¬φ.
    """
    return _nnf(f, False)


def dual(f: Formula) -> Formula:
    """NNF of ¬f."""
    return _nnf(f, True)


def _nnf(f: Formula, negate: bool) -> Formula:
    if isinstance(f, Top):
        return FALSE if negate else TRUE
    if isinstance(f, Prop):
        return Not(f) if negate else f
    if isinstance(f, Not):
        return _nnf(f.arg, not negate)
    if isinstance(f, Or):
        cls = And if negate else Or
        return cls(_nnf(f.left, negate), _nnf(f.right, negate))
    if isinstance(f, And):
        cls = Or if negate else And
        return cls(_nnf(f.left, negate), _nnf(f.right, negate))
    if isinstance(f, Implies):
        return _nnf(Or(Not(f.left), f.right), negate)
    if isinstance(f, Iff):
        return _nnf(Or(And(f.left, f.right), And(Not(f.left), Not(f.right))), negate)
    if isinstance(f, Next):
        return Next(_nnf(f.arg, negate))
    if isinstance(f, Yesterday):
        if isinstance(f.arg, Top):
            return origin() if negate else Yesterday(TRUE)
        if not negate:
            return Yesterday(_nnf(f.arg, False))
        return Or(origin(), Yesterday(_nnf(f.arg, True)))
    if isinstance(f, Until):
        cls = Release if negate else Until
        return cls(_nnf(f.left, negate), _nnf(f.right, negate))
    if isinstance(f, Release):
        cls = Until if negate else Release
        return cls(_nnf(f.left, negate), _nnf(f.right, negate))
    if isinstance(f, Since):
        cls = PastRelease if negate else Since
        return cls(_nnf(f.left, negate), _nnf(f.right, negate))
    if isinstance(f, PastRelease):
        cls = Since if negate else PastRelease
        return cls(_nnf(f.left, negate), _nnf(f.right, negate))
    if isinstance(f, Eventually):
        return _nnf(Until(TRUE, f.arg), negate)
    if isinstance(f, Always):
        return _nnf(Release(FALSE, f.arg), negate)
    if isinstance(f, Once):
        return _nnf(Since(TRUE, f.arg), negate)
    if isinstance(f, Historically):
        return _nnf(PastRelease(FALSE, f.arg), negate)
    if isinstance(f, ExistsProp):
        cls = ForallProp if negate else ExistsProp
        return cls(f.prop, _nnf(f.body, negate))
    if isinstance(f, ForallProp):
        cls = ExistsProp if negate else ForallProp
        return cls(f.prop, _nnf(f.body, negate))
    raise FragmentError(f"no negation normal form for {type(f).__name__} nodes")


def is_nnf(f: Formula) -> bool:
    for node in subformulas(f):
        if isinstance(node, (Implies, Iff, Eventually, Always, Once, Historically)):
            return False
        if isinstance(node, Not) and not is_literal(node):
            return False
    return True


def is_quantifier_free(f: Formula) -> bool:
    return not any(isinstance(n, PROP_QUANTIFIERS) for n in subformulas(f))


# ─────────────────────────────────────────────────────────────────────────────
# Strong alternation depth
# ─────────────────────────────────────────────────────────────────────────────


class _Sad:
    def __init__(self) -> None:
        self.memo = {}

    def depth(self, f: Formula) -> int:
        hit = self.memo.get(f)
        if hit is None:
            hit = self._compute(f)
            self.memo[f] = hit
        return hit

    def _compute(self, f: Formula) -> int:
        if is_literal(f):
            return 0
        if isinstance(f, (And, Or)):
            return max(self.depth(f.left), self.depth(f.right))
        if isinstance(f, (Next, Yesterday)):
            return self.depth(f.arg)
        if isinstance(f, ExistsProp):
            inner = self.depth(f.body)
            if any(self.depth(u) == inner for u in _quantified(f.body, ForallProp)):
                return inner + 1
            return inner
        if isinstance(f, ForallProp):
            return self.depth(ExistsProp(f.prop, dual(f.body)))
        if isinstance(f, (Until, Since)):
            return self._until_like(f)
        if isinstance(f, (Release, PastRelease)):
            return self.depth(dual(f))
        raise FragmentError(f"strong alternation depth undefined on {type(f).__name__}")

    def _until_like(self, f: Formula) -> int:
        left_q = list(_quantified(f.left))
        right_q = list(_quantified(f.right))
        if not left_q and not right_q:
            return 0
        h = max(self.depth(q) for q in left_q + right_q)
        if any(self.depth(q) == h for q in left_q):
            return h + 1
        if any(self.depth(q) == h for q in right_q if isinstance(q, ForallProp)):
            return h + 1
        for node in subformulas(f.right):
            if isinstance(node, (Until, Since)):
                hot = node.left
            elif isinstance(node, (Release, PastRelease)):
                hot = node.right
            else:
                continue
            if any(self.depth(q) == h for q in _quantified(hot, ExistsProp)):
                return h + 1
        return h


def _quantified(f: Formula, kind=PROP_QUANTIFIERS):
    for node in subformulas(f):
        if isinstance(node, kind):
            yield node


def qptl_skeleton(f: Formula) -> Formula:
    """
    Map a GHyperLTL formula onto a QPTL formula with the same quantifier and
    temporal structure: trace quantifiers become propositional ones, atoms
    become propositions and contexts/subscripts are dropped.
    """

    def step(node: Formula) -> Formula:
        if isinstance(node, RelProp):
            return Prop(f"{node.prop}@{node.var}")
        if isinstance(node, RelPltl):
            return Prop(f"[{render(node.formula)}]@{node.var}")
        if isinstance(node, (Exists, ExistsP)):
            return ExistsProp(node.var, node.body)
        if isinstance(node, (Forall, ForallP)):
            return ForallProp(node.var, node.body)
        if isinstance(node, Ctx):
            return node.body
        if isinstance(node, TEMPORAL) and node.gamma:
            return type(node)(*node.children())
        if isinstance(node, Knows):
            raise FragmentError("knowledge operators have no strong alternation depth")
        return node

    return transform(f, step)


def strong_alternation_depth(f: Formula) -> int:
    if any(isinstance(n, (RelProp, RelPltl, Ctx) + TRACE_QUANTIFIERS) for n in subformulas(f)):
        f = qptl_skeleton(f)
    return _Sad().depth(to_nnf(f))


# ─────────────────────────────────────────────────────────────────────────────
# Desugaring
# ─────────────────────────────────────────────────────────────────────────────


def desugar(f: Formula, simple: bool = False, pointed: bool = False) -> Formula:
    """
    Rewrite derived constructs of a GHyperLTL formula.

    ∀ becomes ¬∃¬ (plain and pointed), F/G/O/H become U/S forms with the same
    subscript, → and ↔ become ¬/∨/∧. With ``simple`` every ∃x.φ is contracted
    to ∃^P x.(φ ∧ ⟨x⟩¬Y⊤); with ``pointed`` every ∃^P x.φ is expanded to
    ∃x.⟨x⟩F⟨VAR⟩φ.
    """
    if simple and pointed:
        raise ValueError("simple and pointed desugaring are mutually exclusive")
    all_vars = tuple(sorted(trace_vars(f)))

    def step(node: Formula) -> Formula:
        if isinstance(node, Implies):
            return Or(Not(node.left), node.right)
        if isinstance(node, Iff):
            return Or(And(node.left, node.right), And(Not(node.left), Not(node.right)))
        if isinstance(node, Eventually):
            return Until(TRUE, node.arg, node.gamma)
        if isinstance(node, Always):
            return Not(Until(TRUE, _negate(node.arg), node.gamma))
        if isinstance(node, Once):
            return Since(TRUE, node.arg, node.gamma)
        if isinstance(node, Historically):
            return Not(Since(TRUE, _negate(node.arg), node.gamma))
        if isinstance(node, Release):
            return Not(Until(_negate(node.left), _negate(node.right), node.gamma))
        if isinstance(node, PastRelease):
            return Not(Since(_negate(node.left), _negate(node.right), node.gamma))
        if isinstance(node, Forall):
            return Not(_exists(node.var, _negate(node.body)))
        if isinstance(node, ForallP):
            return Not(_exists_pointed(node.var, _negate(node.body)))
        if isinstance(node, Exists):
            return _exists(node.var, node.body)
        if isinstance(node, ExistsP):
            return _exists_pointed(node.var, node.body)
        return node

    def _exists(var: str, body: Formula) -> Formula:
        if simple:
            return ExistsP(var, And(body, RelPltl(origin(), var)))
        return Exists(var, body)

    def _exists_pointed(var: str, body: Formula) -> Formula:
        if pointed:
            return Exists(var, Ctx((var,), Until(TRUE, Ctx(all_vars, body))))
        return ExistsP(var, body)

    return transform(f, step)


def _negate(f: Formula) -> Formula:
    return f.arg if isinstance(f, Not) else Not(f)


# ─────────────────────────────────────────────────────────────────────────────
# Sentences and well-naming
# ─────────────────────────────────────────────────────────────────────────────


def free_trace_vars(f: Formula) -> FrozenSet[str]:
    def go(node: Formula, bound: FrozenSet[str]) -> FrozenSet[str]:
        if isinstance(node, (RelProp, RelPltl)):
            return frozenset() if node.var in bound else frozenset({node.var})
        if isinstance(node, TRACE_QUANTIFIERS):
            return go(node.body, bound | {node.var})
        out = frozenset()
        for child in node.children():
            out |= go(child, bound)
        return out

    return go(f, frozenset())


def _temporal_outside_quantifier(f: Formula, quantifiers) -> bool:
    if isinstance(f, quantifiers):
        return False
    if isinstance(f, TEMPORAL):
        return True
    return any(_temporal_outside_quantifier(c, quantifiers) for c in f.children())


def is_sentence(f: Formula) -> bool:
    """GHyperLTL sentence: no free trace variables, no temporal operator outside every quantifier."""
    return not free_trace_vars(f) and not _temporal_outside_quantifier(f, TRACE_QUANTIFIERS)


def free_props(f: Formula) -> FrozenSet[str]:
    def go(node: Formula, bound: FrozenSet[str]) -> FrozenSet[str]:
        if isinstance(node, Prop):
            return frozenset() if node.name in bound else frozenset({node.name})
        if isinstance(node, PROP_QUANTIFIERS):
            return go(node.body, bound | {node.prop})
        out = frozenset()
        for child in node.children():
            out |= go(child, bound)
        return out

    return go(f, frozenset())


def is_qptl_sentence(f: Formula) -> bool:
    return not free_props(f) and not _temporal_outside_quantifier(f, PROP_QUANTIFIERS)


def require_sentence(f: Formula) -> None:
    free = free_trace_vars(f)
    if free:
        raise FreeVariableError(f"free trace variables: {', '.join(sorted(free))}")
    if _temporal_outside_quantifier(f, TRACE_QUANTIFIERS):
        raise NotSentenceError("temporal operator outside the scope of every trace quantifier")


def check_well_named(f: Formula) -> None:
    seen = set()
    for node in subformulas(f):
        if isinstance(node, PROP_QUANTIFIERS):
            if node.prop in seen:
                raise NotWellNamedError(f"proposition {node.prop!r} is quantified twice")
            seen.add(node.prop)


# ─────────────────────────────────────────────────────────────────────────────
# Fragment classification
# ─────────────────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class FragmentClass:
    kind: str  # full | hyperltl | simple
    gamma: Tuple[Formula, ...] = ()
    singleton_free: bool = False

    @property
    def is_simple(self) -> bool:
        return self.kind in ("hyperltl", "simple")

    @property
    def is_empty_gamma(self) -> bool:
        return self.is_simple and not self.gamma

    @property
    def label(self) -> str:
        if self.kind == "full":
            return "Full"
        if self.kind == "hyperltl":
            return "HyperLtl"
        if not self.gamma:
            return f"SghltlEmpty(singleton_free={self.singleton_free})"
        gamma = ", ".join(render(g) for g in self.gamma)
        return f"SimpleGamma({{{gamma}}}, singleton_free={self.singleton_free})"


FULL = FragmentClass("full")


def _is_pltl(f: Formula, allow_past: bool = True) -> bool:
    for node in subformulas(f):
        if isinstance(node, (RelProp, RelPltl, Ctx, Knows) + TRACE_QUANTIFIERS + PROP_QUANTIFIERS):
            return False
        if isinstance(node, TEMPORAL) and node.gamma:
            return False
        if not allow_past and isinstance(node, PAST):
            return False
    return True


def _pltl_over(f: Formula, var: str) -> Optional[Formula]:
    """If f only speaks about var through ∅-subscripted PLTL, return that PLTL formula."""
    if isinstance(f, RelProp):
        return Prop(f.prop) if f.var == var else None
    if isinstance(f, RelPltl):
        return f.formula if f.var == var else None
    if isinstance(f, Top):
        return f
    if isinstance(f, (Ctx, Knows) + TRACE_QUANTIFIERS + PROP_QUANTIFIERS) or isinstance(f, Prop):
        return None
    if isinstance(f, TEMPORAL) and f.gamma:
        return None
    kids = []
    for child in f.children():
        mapped = _pltl_over(child, var)
        if mapped is None:
            return None
        kids.append(mapped)
    return f.with_children(kids)


def normalize_contexts(f: Formula) -> Formula:
    """Ctx({x}, φ) with φ plain PLTL over x becomes RelPltl; p@x is left as is."""

    def step(node: Formula) -> Formula:
        if isinstance(node, Ctx) and len(node.vars) == 1:
            mapped = _pltl_over(node.body, node.vars[0])
            if mapped is not None:
                return RelPltl(mapped, node.vars[0])
        return node

    return transform(f, step)


def _hyper_nodes(f: Formula):
    """Nodes at the hyper level: RelPltl bodies and Γ subscripts are not entered."""
    return subformulas(f)


def _is_hyperltl(f: Formula) -> bool:
    node = f
    while isinstance(node, (Exists, Forall)):
        node = node.body
    for sub in _hyper_nodes(node):
        if isinstance(sub, TRACE_QUANTIFIERS + (Ctx, Knows)):
            return False
        if isinstance(sub, TEMPORAL) and (sub.gamma or isinstance(sub, PAST)):
            return False
        if isinstance(sub, RelPltl) and not isinstance(sub.formula, (Prop, Top)):
            return False
    return True


def _singleton_free(f: Formula) -> bool:
    return all(
        isinstance(n.formula, (Prop, Top)) for n in _hyper_nodes(f) if isinstance(n, RelPltl)
    )


def classify_fragment(f: Formula) -> FragmentClass:
    """Most specific fragment of a GHyperLTL sentence."""
    if any(isinstance(n, (Knows, Prop) + PROP_QUANTIFIERS) for n in subformulas(f)):
        raise FragmentError("not a GHyperLTL formula")
    require_sentence(f)
    g = normalize_contexts(f)
    if any(isinstance(n, Ctx) for n in _hyper_nodes(g)):
        return FULL
    gammas = {n.gamma for n in _hyper_nodes(g) if isinstance(n, TEMPORAL)}
    if len(gammas) > 1:
        return FULL
    gamma = next(iter(gammas)) if gammas else ()
    for element in gamma:
        if not _is_pltl(element):
            return FULL
    for node in _hyper_nodes(g):
        if isinstance(node, RelPltl) and not _is_pltl(node.formula):
            return FULL
    if _is_hyperltl(g):
        return FragmentClass("hyperltl", (), True)
    result = FragmentClass("simple", gamma, _singleton_free(g))
    if not matches_simple_grammar(f, gamma):
        # the two walkers must agree on every simple formula
        raise FragmentError(f"grammar check disagrees with classification for {render(f)}")
    return result


def matches_simple_grammar(f: Formula, gamma: Tuple[Formula, ...]) -> bool:
    """
    Independent check of the simple-fragment productions for one Γ:

        φ ::= ⊤ | ⟨x⟩ψ[x] | ¬φ | φ ∨ φ | ∃^P x.φ | X_Γ φ | Y_Γ φ | φ U_Γ φ | φ S_Γ φ

    run on the simple-target desugaring (∧ is read as ¬(¬·∨¬·)).
    """
    gamma = canonical_gamma(gamma)
    core = desugar(normalize_contexts(f), simple=True)

    def ok(node: Formula) -> bool:
        if isinstance(node, Top):
            return True
        if isinstance(node, RelProp):
            return True
        if isinstance(node, RelPltl):
            return _is_pltl(node.formula)
        if isinstance(node, Not):
            return ok(node.arg)
        if isinstance(node, (Or, And)):
            return ok(node.left) and ok(node.right)
        if isinstance(node, ExistsP):
            return ok(node.body)
        if isinstance(node, (Next, Yesterday)):
            return node.gamma == gamma and ok(node.arg)
        if isinstance(node, (Until, Since)):
            return node.gamma == gamma and ok(node.left) and ok(node.right)
        return False

    return ok(core)


def hyper_past_free(f: Formula) -> bool:
    """True if no past operator occurs at the hyper level (RelPltl bodies may use past)."""
    return not any(isinstance(n, PAST) for n in _hyper_nodes(f))


def count_temporal(f: Formula) -> int:
    return sum(1 for n in _hyper_nodes(f) if isinstance(n, TEMPORAL))


__all__ = [
    "FragmentClass",
    "FULL",
    "to_nnf",
    "dual",
    "is_nnf",
    "is_quantifier_free",
    "strong_alternation_depth",
    "qptl_skeleton",
    "desugar",
    "free_trace_vars",
    "free_props",
    "is_sentence",
    "is_qptl_sentence",
    "require_sentence",
    "check_well_named",
    "classify_fragment",
    "matches_simple_grammar",
    "normalize_contexts",
    "hyper_past_free",
    "count_temporal",
    "UNARY_TEMPORAL",
    "BINARY_TEMPORAL",
]
