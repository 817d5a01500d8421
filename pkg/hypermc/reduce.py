"""
Reduction of the simple fragment to Γ-free fair model checking.

The chain has three stages:

1. ``eliminate_pltl_gamma``: every PLTL guard (the Γ subscript and the
   single-variable contexts) is replaced by a fresh proposition, and the
   structure is multiplied with the atoms automaton of the guards so that
   the fresh propositions hold exactly where their guards hold.
2. ``stutter_extension`` (see stutter.py) over the now propositional Γ,
   followed by ``t_sharp`` which drops the subscripts and confines each
   pointed quantifier to the ``#``-free positions of its trace.
3. ``t_guard`` restricts every pointed quantifier to traces satisfying θ_Γ.
"""

import logging
import time
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, List, Mapping, Optional, Set, Tuple

from .automata import AtomsAutomaton, Nba, _Budget, gnba_to_nba, pltl_atoms_gnba
from .errors import FragmentError
from .formula import (
    SHARP,
    TEMPORAL,
    TRUE,
    And,
    Always,
    ExistsP,
    Formula,
    Historically,
    Implies,
    Next,
    Not,
    Once,
    Prop,
    RelPltl,
    RelProp,
    Top,
    Yesterday,
    canonical_gamma,
    origin,
    props_of,
    subformulas,
    transform,
)
from .guards import pltl_core, positive
from .kripke import FairKripke
from .stutter import stutter_extension, theta_gamma
from .syntax import (
    FragmentClass,
    classify_fragment,
    desugar,
    normalize_contexts,
    strong_alternation_depth,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Stage:
    """One (formula, structure) pair of the chain, numbered 1..4."""

    index: int
    name: str
    formula: Formula
    kripke: FairKripke
    seconds: float = 0.0


@dataclass(frozen=True)
class GammaElimination:
    phi: Formula
    kripke: FairKripke
    gamma: Tuple[Formula, ...]
    atoms: Optional[AtomsAutomaton] = None
    ap_extension: Mapping[Formula, str] = field(default_factory=dict, hash=False, compare=False)


@dataclass(frozen=True)
class ReductionArtifacts:
    phi_empty: Formula
    k_empty: FairKripke
    gamma_used: Tuple[Formula, ...]
    ap_extension: Mapping[Formula, str] = field(hash=False, compare=False)
    fragment: Optional[FragmentClass] = None
    stages: Tuple[Stage, ...] = ()

    def stage(self, index: int) -> Stage:
        for st in self.stages:
            if st.index == index:
                return st
        # short-circuited stages repeat the last pair before them
        earlier = [st for st in self.stages if st.index < index]
        return earlier[-1]


# ─────────────────────────────────────────────────────────────────────────────
# PLTL guard elimination
# ─────────────────────────────────────────────────────────────────────────────


def guards_of(phi: Formula, gamma0: Tuple[Formula, ...]) -> Tuple[Formula, ...]:
    """Γ = Γ₀ ∪ {ψ : ⟨x⟩ψ occurs in phi}."""
    found = list(gamma0)
    for node in subformulas(phi):
        if isinstance(node, RelPltl):
            found.append(node.formula)
    return canonical_gamma(found)


def gamma_extension_product(kripke: FairKripke, atoms: AtomsAutomaton, nba: Optional[Nba] = None) -> FairKripke:
    """
    Product of the structure with the degeneralized atoms automaton. A state
    (s, q, ℓ) pairs a structure state with an automaton state whose atom
    agrees with the label of s on the closure propositions; ℓ ∈ {1, 2}
    waits for a fair state of the structure, then for an accepting state
    of the automaton.
    """
    nba = nba or gnba_to_nba(atoms.gnba)
    cl_props = frozenset(g.name for g in atoms.closure if isinstance(g, Prop))
    views = [atoms.props_view(i) for i in range(len(atoms.atoms))]
    succ: Dict[object, List[object]] = {q: [t for _, t in nba.trans.get(q, ())] for q in nba.states}

    def agrees(s: str, q) -> bool:
        return views[q[0]] == kripke.labels[s] & cl_props

    budget = _Budget("gamma-extension")
    roots = [
        (s, q, 1)
        for s in sorted(kripke.init)
        for q in sorted(nba.initial, key=str)
        if agrees(s, q)
    ]
    edges: Dict[tuple, Set[tuple]] = {}
    queue = deque(roots)
    for node in roots:
        edges[node] = set()
        budget.charge()
    while queue:
        node = queue.popleft()
        s, q, level = node
        if level == 1:
            nxt_level = 2 if s in kripke.fair else 1
        else:
            nxt_level = 1 if q in nba.accepting else 2
        for t in kripke.successors[s]:
            for r in succ[q]:
                if not agrees(t, r):
                    continue
                tgt = (t, r, nxt_level)
                edges[node].add(tgt)
                if tgt not in edges:
                    budget.charge()
                    edges[tgt] = set()
                    queue.append(tgt)

    alive = _prune_dead_ends(edges)

    def name(node) -> str:
        s, (i, c), level = node
        return f"{s}__{i}_{c}_{level}"

    ordered = [n for n in edges if n in alive]
    labels = {name(n): kripke.labels[n[0]] | atoms.label(n[1][0]) for n in ordered}
    out = FairKripke(
        states=tuple(name(n) for n in ordered),
        init=frozenset(name(n) for n in roots if n in alive),
        edges=frozenset((name(a), name(b)) for a in ordered for b in edges[a] if b in alive),
        labels=labels,
        fair=frozenset(name(n) for n in ordered if n[2] == 2 and n[1] in nba.accepting),
    ).validate()
    logger.info(
        "stage=gamma-extension states=%s edges=%s atoms=%s pruned=%s",
        len(out.states),
        len(out.edges),
        len(atoms.atoms),
        len(edges) - len(alive),
    )
    return out


def _prune_dead_ends(edges: Mapping[tuple, Set[tuple]]) -> FrozenSet[tuple]:
    alive = set(edges)
    changed = True
    while changed:
        changed = False
        for node in list(alive):
            if not any(t in alive for t in edges[node]):
                alive.discard(node)
                changed = True
    return frozenset(alive)


def _guard_atom(psi: Formula, var: str, names: Mapping[Formula, str]) -> Formula:
    core = pltl_core(psi)
    polarity = True
    while isinstance(core, Not):
        core, polarity = core.arg, not polarity
    if isinstance(core, Top):
        atom = TRUE
    else:
        atom = RelProp(names[core], var)
    return atom if polarity else Not(atom)


def _subscript(gamma: Tuple[Formula, ...], names: Mapping[Formula, str]) -> Tuple[Formula, ...]:
    out = []
    for theta in gamma:
        core = positive(pltl_core(theta))
        if not isinstance(core, Top):
            out.append(Prop(names[core]))
    return canonical_gamma(out)


def eliminate_pltl_gamma(phi: Formula, kripke: FairKripke) -> GammaElimination:
    """
    Replace every PLTL guard by a fresh proposition. The result is
    singleton-free with a propositional subscript Γ′ and is checked against
    the Γ-extension product.
    """
    fc = classify_fragment(phi)
    if not fc.is_simple:
        raise FragmentError(f"not a simple formula: fragment {fc.label}")
    core = desugar(normalize_contexts(phi), simple=True)
    guards = guards_of(core, fc.gamma)
    atoms = pltl_atoms_gnba(guards)
    product = gamma_extension_product(kripke, atoms)
    names = atoms.names

    def step(node: Formula) -> Formula:
        if isinstance(node, RelPltl):
            return _guard_atom(node.formula, node.var, names)
        if isinstance(node, TEMPORAL) and node.gamma:
            return _with_gamma(node, _subscript(node.gamma, names))
        return node

    phi_prime = transform(core, step)
    gamma_prime = _subscript(fc.gamma, names)
    logger.info(
        "stage=eliminate-gamma guards=%s gamma=%s sad=%s",
        len(guards),
        [g.name for g in gamma_prime],
        strong_alternation_depth(phi_prime),
    )
    extension = {g: names[g] for g in atoms.closure if g in names}
    return GammaElimination(phi_prime, product, gamma_prime, atoms, extension)


def _with_gamma(node: Formula, gamma: Tuple[Formula, ...]) -> Formula:
    return replace(node, gamma=gamma)


# ─────────────────────────────────────────────────────────────────────────────
# T_# and the θ_Γ guard
# ─────────────────────────────────────────────────────────────────────────────


def _sharp_free_window(var: str, sharp: str) -> Formula:
    mark = Prop(sharp)
    body = And(
        Next(Always(Not(mark))),
        Implies(Yesterday(TRUE), Yesterday(Historically(Not(mark)))),
    )
    return RelPltl(body, var)


def _require_singleton_free(phi: Formula) -> None:
    for node in subformulas(phi):
        if isinstance(node, RelPltl) and not isinstance(node.formula, (Prop, Top)):
            raise FragmentError("T_# needs a singleton-free formula")


def t_sharp(phi: Formula, sharp: str = SHARP) -> Formula:
    """Drop every subscript and confine each ∃^P x to the #-free part of x."""
    _require_singleton_free(phi)
    if sharp in props_of(phi):
        raise FragmentError(f"proposition {sharp!r} already occurs in the formula")

    def step(node: Formula) -> Formula:
        if isinstance(node, TEMPORAL) and node.gamma:
            return _with_gamma(node, ())
        if isinstance(node, ExistsP):
            return ExistsP(node.var, And(node.body, _sharp_free_window(node.var, sharp)))
        return node

    return transform(phi, step)


def t_guard(phi: Formula, theta: Formula) -> Formula:
    """Conjoin ⟨x⟩O(¬Y⊤ ∧ θ) under every ∃^P x."""
    guard = Once(And(origin(), theta))

    def step(node: Formula) -> Formula:
        if isinstance(node, ExistsP):
            return ExistsP(node.var, And(node.body, RelPltl(guard, node.var)))
        return node

    return transform(phi, step)


# ─────────────────────────────────────────────────────────────────────────────
# Whole chain
# ─────────────────────────────────────────────────────────────────────────────


def reduce_to_empty(phi: Formula, kripke: FairKripke, sharp: str = SHARP) -> ReductionArtifacts:
    """
    (φ∅, K∅) with K ⊨ φ iff K∅ ⊨ φ∅ and φ∅ Γ-free. Without a subscript the
    guards can stay as single-variable contexts and the chain stops after
    stage 1.
    """
    fc = classify_fragment(phi)
    if not fc.is_simple:
        raise FragmentError(f"not a simple formula: fragment {fc.label}")
    stages = [Stage(1, "input", phi, kripke)]

    if not fc.gamma:
        core = desugar(normalize_contexts(phi), simple=True)
        logger.info("stage=reduce gamma=none states=%s note=stutter stages skipped", len(kripke.states))
        return ReductionArtifacts(core, kripke, (), {}, fc, tuple(stages))

    started = time.perf_counter()
    elim = eliminate_pltl_gamma(phi, kripke)
    stages.append(Stage(2, "eliminate-gamma", elim.phi, elim.kripke, time.perf_counter() - started))

    started = time.perf_counter()
    gamma_props = [g.name for g in elim.gamma]
    extended = stutter_extension(elim.kripke, gamma_props, sharp)
    sharp_phi = t_sharp(elim.phi, sharp)
    stages.append(Stage(3, "stutter-extension", sharp_phi, extended, time.perf_counter() - started))

    started = time.perf_counter()
    guarded = t_guard(sharp_phi, theta_gamma(gamma_props, sharp))
    stages.append(Stage(4, "guard", guarded, extended, time.perf_counter() - started))

    logger.info(
        "stage=reduce gamma=%s states=%s sad=%s",
        gamma_props,
        len(extended.states),
        strong_alternation_depth(guarded),
    )
    return ReductionArtifacts(guarded, extended, fc.gamma, elim.ap_extension, fc, tuple(stages))


__all__ = [
    "Stage",
    "GammaElimination",
    "ReductionArtifacts",
    "guards_of",
    "gamma_extension_product",
    "eliminate_pltl_gamma",
    "t_sharp",
    "t_guard",
    "reduce_to_empty",
]
