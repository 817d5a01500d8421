import pytest

from hypermc.formula import Prop
from hypermc.kltl import parse_obs_map
from hypermc.kripke import Lasso, PointedLasso, fair_lassos_upto
from hypermc.oracle import (
    TraceAssignment,
    Verdict,
    eval_hyper_bounded,
    eval_kltl_sync,
    eval_pltl_lasso,
    gamma_breakpoints,
    joint_step,
    k_and,
    k_not,
    k_or,
    pltl_values,
)
from hypermc.parser import parse_formula

P = (Prop("p"),)


def holds(text, lasso, pos=0):
    return eval_pltl_lasso(PointedLasso(lasso, pos), parse_formula(text, "pltl"))


class TestKleene:
    def test_01_tables(self):
        assert k_and(True, None) is None
        assert k_and(False, None) is False
        assert k_or(True, None) is True
        assert k_or(False, None) is None
        assert k_not(None) is None
        assert Verdict.of(None) is Verdict.UNKNOWN


class TestPltlOnLassos:
    """Exact PLTL evaluation on ultimately periodic words."""

    lasso = Lasso.of([{"p"}, {"p"}, {"q"}], [set(), {"p"}])

    def test_01_future_operators(self):
        assert holds("p U q", self.lasso)
        assert not holds("p U q", self.lasso, 3)
        assert holds("G F p", self.lasso)
        assert not holds("F G p", self.lasso)
        assert holds("X X q", self.lasso)

    def test_02_past_operators(self):
        assert not holds("Y true", self.lasso, 0)
        assert holds("Y p", self.lasso, 2)
        assert holds("p S q", self.lasso, 2)
        assert not holds("O q", self.lasso, 1)
        assert holds("O q", self.lasso, 9)
        assert holds("H p", self.lasso, 1)
        assert not holds("H p", self.lasso, 2)

    def test_03_release_forms(self):
        assert not holds("false R (p | q)", self.lasso)
        assert holds("q R (p | q)", self.lasso)
        assert holds("false P true", self.lasso, 5)

    def test_04_truth_sequence_is_periodic(self):
        seq = pltl_values(self.lasso, parse_formula("X p", "pltl"))
        assert [bool(seq.at(j)) for j in range(7)] == [True, False, False, True, False, True, False]


class TestStutterSteps:
    """Γ-breakpoints and the joint (Γ, C) steps."""

    lasso = Lasso.of([{"p"}, {"p"}], [set()])

    def test_01_breakpoints(self):
        bp = gamma_breakpoints(self.lasso, P)
        assert [j for j in range(6) if bp.at(j)] == [0, 2, 3, 4, 5]

    def test_02_empty_subscript_steps_every_position(self):
        bp = gamma_breakpoints(self.lasso, ())
        assert all(bp.at(j) for j in range(6))

    def test_03_successor_and_predecessor(self):
        cfg = TraceAssignment((("x", 0, 0),), frozenset({"x"}))
        nxt = joint_step([self.lasso], cfg, P, "succ")
        assert nxt.positions == (("x", 0, 2),)
        assert joint_step([self.lasso], cfg, P, "pred") is None
        assert joint_step([self.lasso], nxt, P, "pred").positions == (("x", 0, 0),)

    def test_04_variables_outside_the_context_stay(self):
        cfg = TraceAssignment((("x", 0, 0), ("y", 0, 1)), frozenset({"x"}))
        nxt = joint_step([self.lasso], cfg, P, "succ")
        assert nxt.positions == (("x", 0, 2), ("y", 0, 1))

    def test_05_predecessor_scope(self):
        cfg = TraceAssignment((("x", 0, 3), ("y", 0, 0)), frozenset({"x"}))
        assert joint_step([self.lasso], cfg, P, "pred", "domain") is None
        moved = joint_step([self.lasso], cfg, P, "pred", "context")
        assert moved.positions == (("x", 0, 2), ("y", 0, 0))


class TestBoundedHyper:
    """Three-valued verdicts on finite lasso sets."""

    suffix = "exists x1. existsP x2. (G (p@x1 <-> p@x2) & [Y true]@x2)"

    def test_01_suffix_of_alternator(self, k1):
        assert eval_hyper_bounded(fair_lassos_upto(k1, 3), parse_formula(self.suffix)) is Verdict.TRUE

    def test_02_suffix_of_single_p(self, k2):
        assert eval_hyper_bounded(fair_lassos_upto(k2, 3), parse_formula(self.suffix)) is Verdict.FALSE

    def test_03_plain_quantifiers(self, k1):
        model = fair_lassos_upto(k1, 3)
        assert eval_hyper_bounded(model, parse_formula("exists x. p@x")) is Verdict.TRUE
        assert eval_hyper_bounded(model, parse_formula("forall x. X p@x")) is Verdict.FALSE

    def test_04_response(self, kfast):
        phi = parse_formula("forall x. G (q@x -> X p@x)")
        assert eval_hyper_bounded(fair_lassos_upto(kfast, 3), phi) is Verdict.TRUE

    def test_05_stutter_insensitive_equality(self, sample):
        model = fair_lassos_upto(sample("od_pos"), 4)
        phi = parse_formula("forall x. forall y. G{lo} (lo@x <-> lo@y)")
        assert eval_hyper_bounded(model, phi) is Verdict.TRUE
        strict = parse_formula("forall x. forall y. G (lo@x <-> lo@y)")
        assert eval_hyper_bounded(model, strict) is Verdict.FALSE

    def test_06_stutter_equality_fails(self, sample):
        model = fair_lassos_upto(sample("od_neg"), 4)
        phi = parse_formula("forall x. forall y. G{lo} (lo@x <-> lo@y)")
        assert eval_hyper_bounded(model, phi) is Verdict.FALSE

    def test_07_single_lasso_model(self):
        model = [Lasso.of([], [{"p"}])]
        assert eval_hyper_bounded(model, parse_formula("forall x. G p@x")) is Verdict.TRUE

    def test_08_joint_past_keeps_offsets(self, k1):
        # y starts strictly after x, and both move together, so they never reach their origins at once
        phi = parse_formula("exists x. existsP y. ([Y true]@y & F O ([!Y true]@x & [!Y true]@y))")
        assert eval_hyper_bounded(fair_lassos_upto(k1, 4), phi) is not Verdict.TRUE

    def test_09_joint_past_still_finds_witnesses(self, k1):
        model = fair_lassos_upto(k1, 4)
        aligned = parse_formula("exists x. existsP y. F O ([!Y true]@x & [!Y true]@y)")
        assert eval_hyper_bounded(model, aligned) is Verdict.TRUE
        shifted = parse_formula("exists x. existsP y. ([Y true]@y & F O ([!Y true]@x & [Y true]@y))")
        assert eval_hyper_bounded(model, shifted) is Verdict.TRUE


class TestSynchronousKnowledge:
    def test_01_hidden_choice_is_not_known(self, sample):
        model = fair_lassos_upto(sample("knowledge"), 3)
        obs = parse_obs_map("a: o")
        assert eval_kltl_sync(model, parse_formula("K[a] X o", "kltl"), obs)
        assert not eval_kltl_sync(model, parse_formula("X K[a] p", "kltl"), obs)

    def test_02_observing_the_choice(self, sample):
        model = fair_lassos_upto(sample("knowledge"), 3)
        obs = parse_obs_map("a: o p")
        assert eval_kltl_sync(model, parse_formula("X (p -> K[a] p)", "kltl"), obs)


@pytest.mark.parametrize("scope", ["domain", "context"])
def test_scope_does_not_matter_without_past(k1, scope):
    phi = parse_formula("forall x. exists y. X (p@x <-> p@y)")
    assert eval_hyper_bounded(fair_lassos_upto(k1, 3), phi, pred_scope=scope) is Verdict.TRUE


@pytest.mark.parametrize(
    "name,text",
    [
        ("k1", "exists x. existsP y. ([Y true]@y & F O ([!Y true]@x & [!Y true]@y))"),
        ("k1", "exists x1. existsP x2. (G (p@x1 <-> p@x2) & [Y true]@x2)"),
        ("kfast", "existsP x. (q@x & forallP y. (q@y -> (!p@x U p@y)))"),
        ("kslow", "existsP x. (q@x & forallP y. (q@y -> (!p@x U p@y)))"),
        ("kslow", "forallP x. (p@x -> Y !p@x)"),
    ],
)
def test_larger_position_bounds_only_resolve_unknowns(sample, name, text):
    model = fair_lassos_upto(sample(name), 4)
    phi = parse_formula(text)
    verdicts = [eval_hyper_bounded(model, phi, pos_bound=b) for b in range(1, 7)]
    definite = [i for i, v in enumerate(verdicts) if v is not Verdict.UNKNOWN]
    if definite:
        first = definite[0]
        assert verdicts[first:] == [verdicts[first]] * (len(verdicts) - first), verdicts
