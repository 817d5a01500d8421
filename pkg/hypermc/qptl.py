"""
Encodings between the Γ-free simple fragment and QPTL.

``encode_mc_to_qptl`` maps model checking of a fair Kripke structure
against a Γ-free simple sentence to satisfiability of a QPTL sentence.
Every trace variable x is represented by fresh propositions: a forward copy
of its path (states and labels, preceded by ``#→x`` padding) and a backward
copy of a prefix read in reverse (framed by ``#←x``), so that pointed
quantification can place x at any offset from the current position.

``qptl_to_sghltl`` goes the other way: a QPTL sentence over p1..pn becomes
a Γ-free singleton-free sentence checked against a structure whose traces
are block encodings ``tag p1? ... pn?`` of arbitrary traces over p1..pn.
"""

import logging
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

from .errors import FragmentError, NotSentenceError
from .formula import (
    TRUE,
    Always,
    And,
    Eventually,
    Exists,
    ExistsP,
    ExistsProp,
    ForallProp,
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
    RelPltl,
    RelProp,
    Release,
    Since,
    Top,
    Until,
    Yesterday,
    conj,
    disj,
    next_n,
    props_of,
    subformulas,
    transform,
    yesterday_n,
)
from .guards import pltl_core
from .kripke import FairKripke, make_kripke
from .syntax import check_well_named, desugar, free_props, free_trace_vars, is_qptl_sentence

logger = logging.getLogger(__name__)

LEFT, RIGHT = "bwd", "fwd"

Y_TOP = Yesterday(TRUE)
ORIGIN = Not(Y_TOP)


# ─────────────────────────────────────────────────────────────────────────────
# Proposition naming
# ─────────────────────────────────────────────────────────────────────────────


def label_prop(p: str, x: str, direction: str) -> str:
    return f"${'fp' if direction == RIGHT else 'bp'}${p}${x}"


def state_prop(s: str, x: str, direction: str) -> str:
    return f"${'fs' if direction == RIGHT else 'bs'}${s}${x}"


def halt_prop(x: str, direction: str) -> str:
    return f"${'fh' if direction == RIGHT else 'bh'}${x}"


def _p(name: str) -> Prop:
    return Prop(name)


# ─────────────────────────────────────────────────────────────────────────────
# Path encodings
# ─────────────────────────────────────────────────────────────────────────────


class PathEncoding:
    """PLTL constraints tying the x-propositions to paths of one structure."""

    def __init__(self, kripke: FairKripke, ap: Iterable[str]):
        self.kripke = kripke
        self.ap = tuple(sorted(set(ap) | kripke.ap))
        self.states = kripke.states

    def own_props(self, x: str) -> Tuple[str, ...]:
        out: List[str] = []
        for d in (RIGHT, LEFT):
            out.extend(label_prop(p, x, d) for p in self.ap)
            out.extend(state_prop(s, x, d) for s in self.states)
            out.append(halt_prop(x, d))
        return tuple(out)

    def _letter(self, s: str, x: str, d: str) -> Formula:
        label = self.kripke.labels[s]
        lits = [_p(label_prop(p, x, d)) if p in label else Not(_p(label_prop(p, x, d))) for p in self.ap]
        lits.extend(Not(_p(state_prop(t, x, d))) for t in self.states if t != s)
        return conj(lits)

    def _nothing(self, x: str, d: str) -> Formula:
        return conj(
            [Not(_p(label_prop(p, x, d))) for p in self.ap]
            + [Not(_p(state_prop(s, x, d))) for s in self.states]
        )

    def xi_forward(self, s: str, x: str) -> Formula:
        """x→ spells an F-fair path of the structure starting in s."""
        here = _p(state_prop(s, x, RIGHT))
        fair = Always(Eventually(disj(_p(state_prop(t, x, RIGHT)) for t in sorted(self.kripke.fair))))
        steps = conj(
            Always(
                Implies(
                    _p(state_prop(t, x, RIGHT)),
                    conj(
                        self._letter(t, x, RIGHT),
                        Next(disj(_p(state_prop(u, x, RIGHT)) for u in self.kripke.successors[t])),
                    ),
                )
            )
            for t in self.states
        )
        return conj(here, fair, steps)

    def xi_backward(self, s: str, x: str) -> Formula:
        """x← spells, from s, a reversed path prefix ending in an initial state, then #←x forever."""
        halt = _p(halt_prop(x, LEFT))
        here = _p(state_prop(s, x, LEFT))
        ends = disj(
            Eventually(And(_p(state_prop(t, x, LEFT)), Next(halt))) for t in sorted(self.kripke.init)
        )
        steps = conj(
            Always(
                Implies(
                    _p(state_prop(t, x, LEFT)),
                    conj(
                        self._letter(t, x, LEFT),
                        Not(halt),
                        Next(disj(halt, disj(_p(state_prop(u, x, LEFT)) for u in self.kripke.predecessors[t]))),
                    ),
                )
            )
            for t in self.states
        )
        return conj(
            here,
            Eventually(Always(halt)),
            ends,
            Always(Implies(halt, Next(halt))),
            Historically(Always(Implies(halt, self._nothing(x, LEFT)))),
            steps,
        )

    def theta_backward(self, x: str) -> Formula:
        """The x-propositions form a backward encoding of a fair path with a positive offset."""
        body = disj(
            And(self.xi_forward(s, x), disj(Next(self.xi_backward(t, x)) for t in self.kripke.predecessors[s]))
            for s in self.states
        )
        return Once(
            conj(
                ORIGIN,
                _p(halt_prop(x, LEFT)),
                Always(Not(_p(halt_prop(x, RIGHT)))),
                body,
            )
        )

    def theta_forward(self, x: str) -> Formula:
        """The x-propositions form a forward encoding of a fair path with some offset."""
        pad = And(_p(halt_prop(x, RIGHT)), self._nothing(x, RIGHT))
        start = disj(
            And(self.xi_forward(s, x), Always(Not(_p(halt_prop(x, RIGHT))))) for s in sorted(self.kripke.init)
        )
        return Once(
            conj(
                ORIGIN,
                Always(And(_p(halt_prop(x, LEFT)), self._nothing(x, LEFT))),
                Until(pad, start),
            )
        )


# ─────────────────────────────────────────────────────────────────────────────
# Γ-free simple fragment → QPTL
# ─────────────────────────────────────────────────────────────────────────────


class _Encoder:
    def __init__(self, enc: PathEncoding):
        self.enc = enc

    def halt(self, d: str, scope: Sequence[str]) -> Formula:
        return disj(_p(halt_prop(x, d)) for x in scope)

    def tr(self, d: str, f: Formula, scope: Tuple[str, ...], local: bool = False) -> Formula:
        """
        T(d, f). ``scope`` lists the trace variables in scope; inside a
        singleton context ``local`` holds and ``scope`` is that variable.
        """
        if isinstance(f, Top):
            return TRUE
        if isinstance(f, RelProp):
            return _p(label_prop(f.prop, f.var, d))
        if isinstance(f, RelPltl):
            inner = _relativize(pltl_core(f.formula), f.var)
            return self.tr(d, inner, (f.var,), local=True)
        if isinstance(f, Not):
            return Not(self.tr(d, f.arg, scope, local))
        if isinstance(f, Or):
            return Or(self.tr(d, f.left, scope, local), self.tr(d, f.right, scope, local))
        if isinstance(f, And):
            return And(self.tr(d, f.left, scope, local), self.tr(d, f.right, scope, local))
        if getattr(f, "gamma", ()):
            raise FragmentError("the QPTL encoding needs empty stutter subscripts")
        if isinstance(f, Next):
            return self._next(d, f.arg, scope, local)
        if isinstance(f, Yesterday):
            return self._yesterday(d, f.arg, scope, local)
        if isinstance(f, Until):
            return self._until(d, f, scope, local)
        if isinstance(f, Since):
            return self._since(d, f, scope, local)
        if isinstance(f, (Exists, ExistsP)):
            if local:
                raise FragmentError("quantifier inside a singleton context")
            return self._exists(d, f, scope)
        raise FragmentError(f"{type(f).__name__} is outside the Γ-free simple fragment core")

    def _next(self, d, arg, scope, local):
        if d == RIGHT:
            return Next(self.tr(RIGHT, arg, scope, local))
        return Or(
            Yesterday(And(self.tr(LEFT, arg, scope, local), Y_TOP)),
            Yesterday(And(self.tr(RIGHT, arg, scope, local), ORIGIN)),
        )

    def _yesterday(self, d, arg, scope, local):
        if d == LEFT:
            return Next(And(self.tr(LEFT, arg, scope, local), Not(self.halt(LEFT, scope))))
        return Or(
            Yesterday(And(self.tr(RIGHT, arg, scope, local), Not(self.halt(RIGHT, scope)))),
            And(ORIGIN, Next(And(self.tr(LEFT, arg, scope, local), Not(self.halt(LEFT, scope))))),
        )

    def _until(self, d, f, scope, local):
        r1, r2 = self.tr(RIGHT, f.left, scope, local), self.tr(RIGHT, f.right, scope, local)
        if d == RIGHT:
            return Until(r1, r2)
        l1, l2 = self.tr(LEFT, f.left, scope, local), self.tr(LEFT, f.right, scope, local)
        return Or(
            Since(l1, And(Y_TOP, l2)),
            And(Historically(Implies(Y_TOP, l1)), Once(And(ORIGIN, Until(r1, r2)))),
        )

    def _since(self, d, f, scope, local):
        l1, l2 = self.tr(LEFT, f.left, scope, local), self.tr(LEFT, f.right, scope, local)
        back = Until(l1, And(l2, Not(self.halt(LEFT, scope))))
        if d == LEFT:
            return back
        r1, r2 = self.tr(RIGHT, f.left, scope, local), self.tr(RIGHT, f.right, scope, local)
        return Or(
            Since(r1, And(r2, Not(self.halt(RIGHT, scope)))),
            And(Historically(r1), Once(And(ORIGIN, Next(back)))),
        )

    def _exists(self, d, f, scope):
        x = f.var
        inner_scope = tuple(dict.fromkeys(scope + (x,)))
        body = self.tr(d, f.body, inner_scope)
        enc = self.enc
        bwd_halt, fwd_halt = _p(halt_prop(x, LEFT)), _p(halt_prop(x, RIGHT))
        if isinstance(f, Exists):
            if d == LEFT:
                core = conj(enc.theta_backward(x), body, Not(bwd_halt), Next(bwd_halt))
            else:
                core = conj(enc.theta_forward(x), body, Not(fwd_halt), Implies(Y_TOP, Yesterday(fwd_halt)))
        elif d == LEFT:
            core = conj(enc.theta_backward(x), body, Not(bwd_halt))
        else:
            core = And(body, Or(enc.theta_backward(x), And(enc.theta_forward(x), Not(fwd_halt))))
        for name in reversed(enc.own_props(x)):
            core = ExistsProp(name, core)
        return core


def _relativize(f: Formula, var: str) -> Formula:
    def step(node: Formula) -> Formula:
        if isinstance(node, Prop):
            return RelProp(node.name, var)
        return node

    return transform(f, step)


def encode_mc_to_qptl(kripke: FairKripke, phi: Formula) -> Formula:
    """QPTL sentence satisfiable iff the structure satisfies the Γ-free simple sentence ``phi``."""
    if free_trace_vars(phi):
        raise NotSentenceError("the QPTL encoding needs a sentence")
    core = desugar(phi)
    enc = PathEncoding(kripke, props_of(core))
    out = _Encoder(enc).tr(RIGHT, core, ())
    logger.info(
        "stage=qptl-encoding states=%s ap=%s vars=%s",
        len(kripke.states),
        len(enc.ap),
        len({n.var for n in subformulas(core) if isinstance(n, (Exists, ExistsP))}),
    )
    return out


# ─────────────────────────────────────────────────────────────────────────────
# QPTL → Γ-free singleton-free fragment
# ─────────────────────────────────────────────────────────────────────────────

TAG = "$tag"
IN = "$in"
ANCHOR = "$anchor"


def kripke_for_ap(props: Sequence[str]) -> FairKripke:
    """
    Structure whose traces are the block encodings of traces over ``props``:
    every position of the encoded trace becomes ``tag`` followed by one
    position per proposition; ``in`` marks the first block.
    """
    n = len(props)
    states: Dict[str, FrozenSet[str]] = {"in": frozenset({IN, TAG}), "tag": frozenset({TAG})}
    for k, p in enumerate(props, start=1):
        states[f"on_{k}"] = frozenset({p})
        states[f"off_{k}"] = frozenset()
    edges = []
    if n == 0:
        edges = [("in", "tag"), ("tag", "tag")]
    else:
        for src in ("in", "tag"):
            edges += [(src, "on_1"), (src, "off_1")]
        for k in range(1, n):
            for a in (f"on_{k}", f"off_{k}"):
                edges += [(a, f"on_{k + 1}"), (a, f"off_{k + 1}")]
        for a in (f"on_{n}", f"off_{n}"):
            edges.append((a, "tag"))
    return make_kripke(states, edges, ["in"])


def qptl_core(f: Formula) -> Formula:
    """QPTL over ⊤, p, ¬, ∨, ∧, X, Y, U, S and ∃p."""

    def step(node: Formula) -> Formula:
        if isinstance(node, Implies):
            return Or(Not(node.left), node.right)
        if isinstance(node, Iff):
            return Or(And(node.left, node.right), And(Not(node.left), Not(node.right)))
        if isinstance(node, Eventually):
            return Until(TRUE, node.arg)
        if isinstance(node, Always):
            return Not(Until(TRUE, Not(node.arg)))
        if isinstance(node, Once):
            return Since(TRUE, node.arg)
        if isinstance(node, Historically):
            return Not(Since(TRUE, Not(node.arg)))
        if isinstance(node, Release):
            return Not(Until(Not(node.left), Not(node.right)))
        if isinstance(node, PastRelease):
            return Not(Since(Not(node.left), Not(node.right)))
        if isinstance(node, ForallProp):
            return Not(ExistsProp(node.prop, Not(node.body)))
        return node

    return transform(f, step)


def qptl_to_sghltl(psi: Formula) -> Tuple[FairKripke, Formula]:
    """
    (K_AP, φ) with K_AP ⊨ φ iff the QPTL sentence ``psi`` is satisfiable.
    Raises NotWellNamedError when a proposition is quantified twice.
    """
    if free_props(psi):
        raise NotSentenceError(f"free propositions: {', '.join(sorted(free_props(psi)))}")
    check_well_named(psi)
    if not is_qptl_sentence(psi):
        psi = ExistsProp(ANCHOR, psi)
    core = qptl_core(psi)
    props = sorted(props_of(core))
    index = {p: k for k, p in enumerate(props, start=1)}
    n = len(props)

    def var(k: int) -> str:
        return f"x{k}"

    def tr(h: int, f: Formula) -> Formula:
        if isinstance(f, Top):
            return TRUE
        if isinstance(f, Prop):
            if h == 0:
                raise NotSentenceError(f"proposition {f.name!r} outside every quantifier")
            return next_n(RelProp(f.name, var(h)), index[f.name])
        if isinstance(f, Not):
            return Not(tr(h, f.arg))
        if isinstance(f, (Or, And)):
            return type(f)(tr(h, f.left), tr(h, f.right))
        if isinstance(f, Next):
            return next_n(tr(h, f.arg), n + 1)
        if isinstance(f, Yesterday):
            return yesterday_n(tr(h, f.arg), n + 1)
        if isinstance(f, (Until, Since)):
            tag = RelProp(TAG, var(h))
            return type(f)(Implies(tag, tr(h, f.left)), And(tr(h, f.right), tag))
        if isinstance(f, ExistsProp):
            k = index[f.prop]
            if h == 0:
                return Exists(var(k), tr(k, f.body))
            agree = conj(
                Iff(RelProp(p, var(h)), RelProp(p, var(k))) for p in props if p != f.prop
            )
            aligned = Once(conj(RelProp(IN, var(h)), RelProp(IN, var(k)), Always(agree)))
            return ExistsP(var(k), And(tr(k, f.body), aligned))
        raise FragmentError(f"{type(f).__name__} is not a QPTL node")

    phi = tr(0, core)
    logger.info("stage=qptl-to-hyper props=%s vars=%s", n, n)
    return kripke_for_ap(props), phi


__all__ = [
    "label_prop",
    "state_prop",
    "halt_prop",
    "PathEncoding",
    "encode_mc_to_qptl",
    "TAG",
    "IN",
    "kripke_for_ap",
    "qptl_core",
    "qptl_to_sghltl",
]
