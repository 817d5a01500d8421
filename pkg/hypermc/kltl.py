"""
Embedding of KLTL (LTL with knowledge operators K[a]) into GHyperLTL.

The result is ∀x.T(ψ, x) where every K[a]φ at trace x becomes a pointed
universal quantifier over traces y that are observationally equivalent to x
for agent a up to the current point:

    T(K[a] φ, x) = ∀^P y. (θ(a, x, y) → T(φ, y))
    θ(a, x, y)   = ∧_{o ∈ Obs(a)} H{Obs(a)} (o@x ↔ o@y) ∧ O{Obs(a)} ([¬Y⊤]@x ∧ [¬Y⊤]@y)

Synchronous perfect recall uses the same θ with empty subscripts.
"""

import logging
import re
from itertools import count
from typing import Dict, FrozenSet, Mapping

from .errors import FragmentError, UnknownAgentError
from .formula import (
    PROP_QUANTIFIERS,
    TEMPORAL,
    TRACE_QUANTIFIERS,
    Ctx,
    Forall,
    ForallP,
    Formula,
    Historically,
    Iff,
    Implies,
    Knows,
    Once,
    Prop,
    RelPltl,
    RelProp,
    Top,
    canonical_gamma,
    conj,
    origin,
    subformulas,
)

logger = logging.getLogger(__name__)

SEMANTICS = ("sync", "async")

_OBS_LINE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*:\s*(.*)$")


def parse_obs_map(text: str) -> Dict[str, FrozenSet[str]]:
    """Parse ``agent: p q r`` lines; ``#`` starts a comment."""
    obs: Dict[str, FrozenSet[str]] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        match = _OBS_LINE.match(line)
        if match is None:
            raise FragmentError(f"observation map line {number}: expected 'agent: p q ...'")
        agent, props = match.group(1), match.group(2).split()
        obs[agent] = obs.get(agent, frozenset()) | frozenset(props)
    return obs


def check_agents(psi: Formula, obs: Mapping[str, FrozenSet[str]]) -> None:
    for node in subformulas(psi):
        if isinstance(node, Knows) and node.agent not in obs:
            raise UnknownAgentError(f"agent {node.agent!r} has no observation set")
        if isinstance(node, (RelProp, RelPltl, Ctx) + TRACE_QUANTIFIERS + PROP_QUANTIFIERS):
            raise FragmentError(f"{type(node).__name__} is not a KLTL node")
        if isinstance(node, TEMPORAL) and node.gamma:
            raise FragmentError("KLTL temporal operators carry no subscript")


def observation_equivalence(observed, x: str, y: str, semantics: str) -> Formula:
    """θ(a, x, y) for the observation set of one agent."""
    gamma = canonical_gamma(Prop(o) for o in observed) if semantics == "async" else ()
    agree = conj(
        Historically(Iff(RelProp(o, x), RelProp(o, y)), gamma) for o in sorted(observed)
    )
    level = Once(conj(RelPltl(origin(), x), RelPltl(origin(), y)), gamma)
    return conj(agree, level)


def translate_kltl(psi: Formula, obs: Mapping[str, FrozenSet[str]], semantics: str = "async") -> Formula:
    if semantics not in SEMANTICS:
        raise ValueError(f"unknown KLTL semantics {semantics!r}")
    check_agents(psi, obs)
    fresh = (f"y{i}" for i in count(1))

    def tr(f: Formula, x: str) -> Formula:
        if isinstance(f, Top):
            return f
        if isinstance(f, Prop):
            return RelProp(f.name, x)
        if isinstance(f, Knows):
            y = next(fresh)
            theta = observation_equivalence(obs[f.agent], x, y, semantics)
            return ForallP(y, Implies(theta, tr(f.arg, y)))
        return f.with_children(tr(child, x) for child in f.children())

    out = Forall("x", tr(psi, "x"))
    logger.debug("kltl semantics=%s size_in=%s", semantics, sum(1 for _ in subformulas(psi)))
    return out


__all__ = ["SEMANTICS", "parse_obs_map", "check_agents", "observation_equivalence", "translate_kltl"]
