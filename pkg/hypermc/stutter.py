"""
Γ-stutter factorizations and the stutter-extension structure.

For a Γ of propositions, the stutter extension K_Γ runs over S × 2^{acc,#}:
summary edges jump over Γ-stuttering path segments, ``#``-states mark one
extra position inside a stuttering segment, and ``acc`` records that the
summarized segment visited a fair state.
"""

import logging
from collections import deque
from dataclasses import dataclass
from typing import FrozenSet, Iterable, Iterator, List, Optional, Set, Tuple

from .errors import FragmentError
from .formula import (
    SHARP,
    Always,
    Formula,
    Iff,
    Implies,
    Next,
    Not,
    Prop,
    conj,
    disj,
)
from .kripke import FairKripke, Lasso, PointedLasso, UPSeq, lcm
from .oracle import gamma_breakpoints, gamma_valuation, next_breakpoint, previous_breakpoint

logger = logging.getLogger(__name__)


# ─────────────────────────────────────────────────────────────────────────────
# Factorizations on lassos
# ─────────────────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class FactorizationView:
    base: Lasso
    gamma: Tuple[Formula, ...]
    valuation: UPSeq
    breakpoints: UPSeq

    def is_breakpoint(self, i: int) -> bool:
        return bool(self.breakpoints.at(i))

    def succ(self, i: int) -> int:
        return next_breakpoint(self.breakpoints, i)

    def pred(self, i: int) -> Optional[int]:
        return previous_breakpoint(self.breakpoints, i)

    def positions(self, count: int) -> List[int]:
        """The first ``count`` breakpoints."""
        out = [0]
        while len(out) < count:
            out.append(self.succ(out[-1]))
        return out[:count]

    def stutter_trace(self) -> Lasso:
        """Letters of the base trace at the breakpoints."""
        letters = self.base.letters
        start = max(self.breakpoints.threshold, letters.threshold)
        span = lcm(self.breakpoints.period, letters.period)
        stem = [letters.at(j) for j in range(start) if self.is_breakpoint(j)]
        loop = [letters.at(j) for j in range(start, start + span) if self.is_breakpoint(j)]
        return Lasso(tuple(stem), tuple(loop)).canonical()

    def gaps(self, upto: int) -> Iterator[Tuple[int, int, int]]:
        """(k, ℓ_k, ℓ_{k+1}) for every nonempty gap between consecutive breakpoints with ℓ_k < upto."""
        k, left = 0, 0
        while left < upto:
            right = self.succ(left)
            if right > left + 1:
                yield k, left, right
            k, left = k + 1, right


def gamma_factorization(lasso: Lasso, gamma: Iterable[Formula]) -> FactorizationView:
    gamma = tuple(gamma)
    return FactorizationView(
        base=lasso,
        gamma=gamma,
        valuation=gamma_valuation(lasso, gamma),
        breakpoints=gamma_breakpoints(lasso, gamma),
    )


def gamma_step(pt: PointedLasso, gamma: Iterable[Formula], direction: str) -> Optional[PointedLasso]:
    """Γ-successor / Γ-predecessor of a pointed lasso; None for the predecessor of position 0."""
    view = gamma_factorization(pt.lasso, gamma)
    if direction == "succ":
        return pt.moved(view.succ(pt.pos))
    if direction == "pred":
        prev = view.pred(pt.pos)
        return None if prev is None else pt.moved(prev)
    raise ValueError(f"unknown direction {direction!r}")


def sharp_extensions(lasso: Lasso, gamma_props: Iterable[str], upto: int, sharp: str = SHARP) -> FrozenSet[Lasso]:
    """
    The stutter trace of the lasso together with its one-``#`` extensions
    whose extra position lies in a gap starting before ``upto``.
    """
    gamma = tuple(Prop(p) for p in sorted(gamma_props))
    view = gamma_factorization(lasso, gamma)
    base = view.stutter_trace()
    found: Set[Lasso] = {base}
    seq = base.letters
    for k, left, right in view.gaps(upto):
        for i in range(left + 1, right):
            extra = lasso.at(i) | {sharp}

            def at(j: int, k=k, extra=extra):
                if j <= k:
                    return seq.at(j)
                return extra if j == k + 1 else seq.at(j - 1)

            ext = UPSeq.from_function(at, max(seq.threshold, k + 1) + 1, seq.period)
            found.add(Lasso(ext.prefix, ext.loop))
    return frozenset(found)


# ─────────────────────────────────────────────────────────────────────────────
# Summary relations and the stutter extension
# ─────────────────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class SummaryRelations:
    r: FrozenSet[Tuple[str, str]]
    r_fair: FrozenSet[Tuple[str, str]]
    r_sharp: FrozenSet[Tuple[str, str]]
    r_sharp_fair: FrozenSet[Tuple[str, str]]


def build_summary_relations(kripke: FairKripke, gamma: Iterable[str]) -> SummaryRelations:
    """
    Endpoints of finite paths s·ρ·s' whose interior keeps the Γ-label of s:
    ``r`` when s' changes the label, ``r_sharp`` when it keeps it. The
    ``*_fair`` variants additionally require a fair state on the path.
    """
    gamma = frozenset(gamma)
    view = {s: kripke.labels[s] & gamma for s in kripke.states}
    r, r_fair, r_sharp, r_sharp_fair = set(), set(), set(), set()
    for s in kripke.states:
        start = (s, s in kripke.fair)
        queue = deque([start])
        seen = {start}
        while queue:
            u, saw = queue.popleft()
            for t in kripke.successors[u]:
                fair = saw or t in kripke.fair
                if view[t] != view[s]:
                    r.add((s, t))
                    if fair:
                        r_fair.add((s, t))
                    continue
                r_sharp.add((s, t))
                if fair:
                    r_sharp_fair.add((s, t))
                if (t, fair) not in seen:
                    seen.add((t, fair))
                    queue.append((t, fair))
    return SummaryRelations(frozenset(r), frozenset(r_fair), frozenset(r_sharp), frozenset(r_sharp_fair))


_FLAG_SUFFIX = {(False, False): "n", (True, False): "a", (False, True): "h", (True, True): "ah"}


def extension_state(state: str, acc: bool, sharp: bool) -> str:
    return f"{state}__{_FLAG_SUFFIX[(acc, sharp)]}"


def stutter_extension(kripke: FairKripke, gamma: Iterable[str], sharp: str = SHARP) -> FairKripke:
    """(K_Γ, F_Γ): states S × 2^{acc,#}, initial (s, ∅), fair = acc-flagged states."""
    gamma = frozenset(gamma)
    if sharp in kripke.ap:
        raise FragmentError(f"proposition {sharp!r} already occurs in the structure")
    rel = build_summary_relations(kripke, gamma)
    plain = set(kripke.edges) | set(rel.r)

    names: List[str] = []
    labels = {}
    fair = set()
    for s in kripke.states:
        for flags in _FLAG_SUFFIX:
            acc, marked = flags
            name = extension_state(s, acc, marked)
            names.append(name)
            labels[name] = kripke.labels[s] | ({sharp} if marked else frozenset())
            if acc:
                fair.add(name)

    edges = set()
    for s in kripke.states:
        for acc, marked in _FLAG_SUFFIX:
            src = extension_state(s, acc, marked)
            for a, b in plain:
                if a == s:
                    edges.add((src, extension_state(b, b in kripke.fair, False)))
            for a, b in rel.r_fair:
                if a == s:
                    edges.add((src, extension_state(b, True, False)))
            if marked:
                continue
            for a, b in rel.r_sharp:
                if a == s:
                    edges.add((src, extension_state(b, b in kripke.fair, True)))
            for a, b in rel.r_sharp_fair:
                if a == s:
                    edges.add((src, extension_state(b, True, True)))

    out = FairKripke(
        states=tuple(names),
        init=frozenset(extension_state(s, False, False) for s in kripke.init),
        edges=frozenset(edges),
        labels=labels,
        fair=frozenset(fair),
    ).validate()
    logger.info(
        "stage=stutter-extension gamma=%s states=%s edges=%s r=%s r_sharp=%s",
        sorted(gamma),
        len(out.states),
        len(out.edges),
        len(rel.r),
        len(rel.r_sharp),
    )
    return out


def theta_gamma(gamma: Iterable[str], sharp: str = SHARP) -> Formula:
    """
    Well-formedness of traces of K_Γ: no ``#`` at the origin, at most one
    ``#``, and at every position one of

    - the Γ-valuation changes at the next position, which carries no ``#``;
    - the Γ-valuation stays constant forever and no ``#`` follows;
    - the next position is the ``#`` one, it repeats the Γ-valuation and the
      position after it changes it.
    """
    props = [Prop(p) for p in sorted(gamma)]
    mark = Prop(sharp)
    changes_next = disj(Iff(p, Not(Next(p))) for p in props)
    same_next = conj(Iff(p, Next(p)) for p in props)
    changes_after = disj(Iff(p, Not(Next(Next(p)))) for p in props)
    step = disj(
        conj(changes_next, Next(Not(mark))),
        Always(conj(Not(mark), same_next)),
        conj(Next(mark), same_next, changes_after),
    )
    return conj(
        Not(mark),
        Always(Implies(mark, Next(Always(Not(mark))))),
        Always(step),
    )


__all__ = [
    "FactorizationView",
    "gamma_factorization",
    "gamma_step",
    "sharp_extensions",
    "SummaryRelations",
    "build_summary_relations",
    "extension_state",
    "stutter_extension",
    "theta_gamma",
]
