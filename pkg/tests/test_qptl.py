import pytest

from hypermc.errors import NotSentenceError, NotWellNamedError
from hypermc.formula import TRUE, Exists, ExistsProp, Not, Prop, Until, render
from hypermc.kripke import Lasso, PointedLasso, UPSeq, fair_lassos_upto, fair_state_lassos_upto
from hypermc.oracle import HyperEvaluator, TraceAssignment, Verdict, eval_hyper_bounded
from hypermc.parser import parse_formula
from hypermc.qptl import (
    ANCHOR,
    IN,
    LEFT,
    RIGHT,
    TAG,
    PathEncoding,
    _Encoder,
    encode_mc_to_qptl,
    halt_prop,
    kripke_for_ap,
    label_prop,
    qptl_core,
    qptl_to_sghltl,
    state_prop,
)
from hypermc.syntax import classify_fragment, desugar, is_qptl_sentence, is_sentence
from hypermc.translate import qptl_sat, qptl_to_snba


def qptl(text):
    return parse_formula(text, "qptl")


class TestBlockStructure:
    """Traces of K_AP are block encodings: a tag position, then one per proposition."""

    def test_01_tags_every_block(self):
        k = kripke_for_ap(["p", "q"])
        assert len(k.states) == 6
        for lasso in fair_lassos_upto(k, 6):
            for j in range(12):
                assert (TAG in lasso.at(j)) == (j % 3 == 0)
                assert (IN in lasso.at(j)) == (j == 0)

    def test_02_no_propositions(self):
        k = kripke_for_ap([])
        assert k.states == ("in", "tag")
        assert k.edges == frozenset({("in", "tag"), ("tag", "tag")})


class TestQptlToHyper:
    def test_01_single_quantifier(self):
        k, phi = qptl_to_sghltl(qptl("exists p. G (p <-> X !p)"))
        assert isinstance(phi, Exists) and phi.var == "x1"
        assert is_sentence(phi)
        assert classify_fragment(phi).label == "HyperLtl"
        assert k.ap == frozenset({"p", TAG, IN})

    def test_02_nested_quantifier_is_pointed(self):
        _, phi = qptl_to_sghltl(qptl("exists p. (p & X exists q. (q & !p))"))
        assert classify_fragment(phi).label == "SghltlEmpty(singleton_free=True)"

    def test_03_core_form(self):
        core = qptl_core(qptl("forall p. G p"))
        p = Prop("p")
        assert core == Not(ExistsProp("p", Not(Not(Until(TRUE, Not(p))))))

    def test_04_non_sentence_is_anchored(self):
        psi = qptl("G exists p. p")
        assert not is_qptl_sentence(psi)
        k, phi = qptl_to_sghltl(psi)
        assert isinstance(phi, Exists)
        assert ANCHOR in k.ap

    def test_05_rejected_inputs(self):
        with pytest.raises(NotSentenceError):
            qptl_to_sghltl(qptl("exists p. (p & q)"))
        with pytest.raises(NotWellNamedError):
            qptl_to_sghltl(qptl("exists p. X exists p. p"))

    def test_06_printed_output_parses_back(self):
        _, phi = qptl_to_sghltl(qptl("exists p. (p & X exists q. (q & !p))"))
        assert parse_formula(render(phi), allow_internal=True) == phi

    def test_07_bounded_check_of_the_encoding(self):
        k, sat = qptl_to_sghltl(qptl("exists p. (p & X !p)"))
        model = fair_lassos_upto(k, 4)
        assert eval_hyper_bounded(model, sat) is Verdict.TRUE
        _, unsat = qptl_to_sghltl(qptl("exists p. (p & !p)"))
        assert eval_hyper_bounded(model, unsat) is Verdict.FALSE


class TestModelCheckingEncoding:
    """Model checking against a subscript-free sentence as QPTL satisfiability."""

    def test_01_proposition_names(self):
        assert label_prop("p", "x", RIGHT) == "$fp$p$x"
        assert state_prop("s0", "x", "bwd") == "$bs$s0$x"
        assert halt_prop("y", RIGHT) == "$fh$y"

    def test_02_result_is_a_sentence(self, k1):
        psi = encode_mc_to_qptl(k1, parse_formula("exists x. p@x"))
        assert is_qptl_sentence(psi)
        assert isinstance(psi, ExistsProp)

    def test_03_free_variables_are_rejected(self, k1):
        with pytest.raises(NotSentenceError):
            encode_mc_to_qptl(k1, parse_formula("p@x"))

    @pytest.mark.slow
    def test_04_satisfiability_matches_the_structure(self, k1):
        assert qptl_sat(encode_mc_to_qptl(k1, parse_formula("exists x. p@x"))).satisfiable
        assert not qptl_sat(encode_mc_to_qptl(k1, parse_formula("forall x. X p@x"))).satisfiable


def forward_encoding(enc, x, path, offset):
    """Letters of the forward x-encoding of a state lasso, shifted right by ``offset`` padding positions."""
    stem, loop = path
    states = UPSeq(tuple(stem), tuple(loop))

    def at(j):
        if j < offset:
            return frozenset({halt_prop(x, RIGHT), halt_prop(x, LEFT)})
        s = states.at(j - offset)
        labels = {label_prop(p, x, RIGHT) for p in enc.kripke.labels[s] if p in enc.ap}
        return frozenset({state_prop(s, x, RIGHT), halt_prop(x, LEFT)} | labels)

    return UPSeq.from_function(at, offset + len(stem), len(loop))


class TestEncodingCoherence:
    """Quantifier-free bodies agree with their translation on forward encodings of path assignments."""

    bodies = [
        "G (p@x -> F q@y)",
        "p@x U q@y",
        "X (p@x <-> Y q@y)",
        "(!q@x) S p@y",
        "F (p@x & O q@y)",
        "Y Y (p@x | q@y)",
    ]

    @pytest.mark.parametrize("text", bodies)
    def test_01_sampled_assignments(self, kslow, rng, text):
        enc = PathEncoding(kslow, ())
        phi = desugar(parse_formula(text))
        snba = qptl_to_snba(_Encoder(enc).tr(RIGHT, phi, ("x", "y")))
        paths = sorted(fair_state_lassos_upto(kslow, 4))

        def trace(path):
            stem, loop = path
            return Lasso(tuple(kslow.labels[s] for s in stem), tuple(kslow.labels[s] for s in loop))

        checked = 0
        for _ in range(12):
            px, py = rng.choice(paths), rng.choice(paths)
            ix, iy = rng.randrange(3), rng.randrange(3)
            at = max(ix, iy) + rng.randrange(2)
            evaluator = HyperEvaluator([trace(px), trace(py)], phi)
            cfg = TraceAssignment((("x", 0, ix), ("y", 1, iy)), frozenset({"x", "y"}))
            truth = evaluator.value(evaluator.formula, cfg)
            if truth is None:
                continue
            word = forward_encoding(enc, "x", px, at - ix).zip_with(forward_encoding(enc, "y", py, at - iy), frozenset.union)
            assert snba.accepts(PointedLasso(Lasso(word.prefix, word.loop), at)) == truth, (px, py, ix, iy, at)
            checked += 1
        assert checked > 0
