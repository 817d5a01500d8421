import pytest

from hypermc.errors import FragmentError
from hypermc.formula import SHARP, Prop, Until
from hypermc.kripke import Lasso, PointedLasso, fair_lassos_upto, make_kripke
from hypermc.oracle import eval_pltl_lasso
from hypermc.stutter import (
    build_summary_relations,
    extension_state,
    gamma_factorization,
    gamma_step,
    sharp_extensions,
    stutter_extension,
    theta_gamma,
)

PP = Lasso.of([{"p"}, {"p"}], [set()])


class TestFactorization:
    """Γ-stutter factorizations of lassos."""

    def test_01_until_guard_collapses_blocks(self):
        lasso = Lasso.of([{"p"}, {"p"}, {"q"}, {"q"}], [{"r"}])
        view = gamma_factorization(lasso, [Until(Prop("p"), Prop("q"))])
        assert view.stutter_trace() == Lasso.of([{"p"}], [{"r"}])

    def test_02_empty_gamma_keeps_every_position(self, k1):
        (lasso,) = fair_lassos_upto(k1, 2)
        view = gamma_factorization(lasso, [])
        assert view.positions(4) == [0, 1, 2, 3]
        assert view.stutter_trace() == lasso

    def test_03_breakpoints_and_gaps(self):
        view = gamma_factorization(PP, [Prop("p")])
        assert view.positions(4) == [0, 2, 3, 4]
        assert list(view.gaps(4)) == [(0, 0, 2)]

    def test_04_steps(self):
        pt = PointedLasso(PP, 0)
        assert gamma_step(pt, [Prop("p")], "succ").pos == 2
        assert gamma_step(pt, [Prop("p")], "pred") is None
        assert gamma_step(PointedLasso(PP, 3), [Prop("p")], "pred").pos == 2
        with pytest.raises(ValueError):
            gamma_step(pt, [Prop("p")], "sideways")

    def test_05_sharp_extensions(self):
        found = sharp_extensions(PP, {"p"}, upto=4)
        assert found == frozenset({Lasso.of([{"p"}], [set()]), Lasso.of([{"p"}, {"p", SHARP}], [set()])})


class TestSummaryRelations:
    def test_01_alternator_has_no_stutter_edges(self, k1):
        rel = build_summary_relations(k1, {"p"})
        assert rel.r == frozenset({("a", "b"), ("b", "a")})
        assert rel.r_sharp == frozenset()

    def test_02_self_loop_stutters(self, k2):
        rel = build_summary_relations(k2, {"p"})
        assert rel.r == frozenset({("a", "b")})
        assert ("b", "b") in rel.r_sharp

    def test_03_fairness_along_the_summary(self, kslow):
        rel = build_summary_relations(kslow, {"p"})
        assert ("w", "s") in rel.r_fair
        assert ("r", "s") in rel.r
        assert ("r", "s") in rel.r_fair
        assert ("r", "w") in rel.r_sharp and ("r", "w") not in rel.r_sharp_fair


class TestStutterExtension:
    """The 4|S|-state structure and the θ_Γ guard on its traces."""

    def test_01_state_space(self, k1):
        ext = stutter_extension(k1, {"p"})
        assert len(ext.states) == 4 * len(k1.states)
        assert ext.init == frozenset({extension_state("a", False, False)})
        assert SHARP in ext.labels[extension_state("a", True, True)]
        assert ext.fair == frozenset(s for s in ext.states if "__a" in s)

    def test_02_sharp_must_be_fresh(self):
        k = make_kripke({"a": [SHARP]}, [("a", "a")], ["a"])
        with pytest.raises(FragmentError):
            stutter_extension(k, set())

    def test_03_theta_on_hand_made_lassos(self):
        theta = theta_gamma({"p"})

        def ok(stem, loop):
            return eval_pltl_lasso(PointedLasso(Lasso.of(stem, loop), 0), theta)

        assert ok([{"p"}], [set()])
        assert ok([{"p"}, {"p", SHARP}], [set()])
        assert not ok([{"p"}, {"p", SHARP}, {"p"}], [set()])
        assert not ok([{SHARP}], [set()])
        assert not ok([{"p"}, {"p"}], [set()])

    def test_04_guarded_traces_are_the_sharp_extensions(self, sample):
        kpp = sample("stutter")
        ext = stutter_extension(kpp, {"p"})
        theta = theta_gamma({"p"})
        guarded = {l for l in fair_lassos_upto(ext, 6) if eval_pltl_lasso(PointedLasso(l, 0), theta)}
        (trace,) = fair_lassos_upto(kpp, 4)
        assert guarded == set(sharp_extensions(trace, {"p"}, upto=6))
