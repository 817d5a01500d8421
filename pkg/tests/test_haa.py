import pytest

from hypermc.automata import snba_literal, snba_origin, snba_shift_next, snba_shift_prev
from hypermc.errors import HaaValidationError
from hypermc.haa import (
    BACKWARD,
    FORWARD,
    B_FALSE,
    B_TRUE,
    BAnd,
    BLit,
    BMove,
    BOr,
    Component,
    Term,
    TwoWayHaa,
    b_and,
    b_or,
    dnf,
    dualize,
    gn_marks,
    haa_accepts,
    haa_to_snba,
    rank_convert,
    snba_as_haa,
    solve_buchi_game,
    validate_haa,
)
from hypermc.kripke import Lasso, PointedLasso
from hypermc.syntax import to_nnf
from hypermc.tableau import tableau_snba


def make(delta, components, initial="g", f_minus=()):
    return TwoWayHaa(
        states=tuple(delta),
        initial=initial,
        delta=delta,
        f_minus=frozenset(f_minus),
        components=tuple(components),
    )


def always_p():
    return make({"g": BAnd(BLit("p"), BMove(FORWARD, "g"))}, [Component("buchi", frozenset({"g"}), frozenset({"g"}))])


ALL_P = PointedLasso(Lasso.of([], [{"p"}]))
P_THEN_NOT = PointedLasso(Lasso.of([{"p"}], [set()]))


class TestTransitionFormulas:
    def test_01_constants_fold(self):
        assert b_and(B_TRUE, BLit("p")) == BLit("p")
        assert b_or() == B_FALSE
        assert b_or(BLit("p"), B_TRUE) == B_TRUE

    def test_02_dnf_drops_clashes_and_subsumed_terms(self):
        e = BOr(BAnd(BLit("p"), BLit("p", False)), BOr(BLit("q"), BAnd(BLit("q"), BMove(FORWARD, "g"))))
        assert dnf(e) == (Term(frozenset({("q", True)}), frozenset()),)


class TestValidation:
    """Each broken automaton names the requirement it violates."""

    def requirement(self, haa):
        with pytest.raises(HaaValidationError) as info:
            validate_haa(haa)
        return info.value.requirement

    def test_01_well_formed(self):
        assert validate_haa(always_p()) is not None
        validate_haa(snba_as_haa(snba_literal("p")))

    def test_02_component_kind(self):
        assert self.requirement(make({"g": B_TRUE}, [Component("weird", frozenset({"g"}))])) == "component-kind"

    def test_03_partition(self):
        comps = [Component("transient", frozenset({"g"})), Component("transient", frozenset({"g"}))]
        assert self.requirement(make({"g": B_TRUE}, comps)) == "partition"
        assert self.requirement(make({"g": B_TRUE, "h": B_TRUE}, comps[:1])) == "partition"

    def test_04_accepting_subset(self):
        comps = [Component("transient", frozenset({"g"}), frozenset({"g"}))]
        assert self.requirement(make({"g": B_TRUE}, comps)) == "accepting-subset"

    def test_05_unknown_move_target(self):
        comps = [Component("transient", frozenset({"g"}))]
        assert self.requirement(make({"g": BMove(FORWARD, "nowhere")}, comps)) == "moves"

    def test_06_cyclic_components(self):
        delta = {"g": BMove(FORWARD, "h"), "h": BMove(FORWARD, "g")}
        comps = [Component("transient", frozenset({"g"})), Component("transient", frozenset({"h"}))]
        assert self.requirement(make(delta, comps)) == "dag"

    def test_07_directions(self):
        stay = {"g": BMove(FORWARD, "g")}
        assert self.requirement(make(stay, [Component("transient", frozenset({"g"}))])) == "transient"
        assert self.requirement(make(stay, [Component("negative", frozenset({"g"}))])) == "negative-direction"
        back = {"g": BMove(BACKWARD, "g")}
        assert self.requirement(make(back, [Component("buchi", frozenset({"g"}))])) == "buchi-direction"
        assert self.requirement(make(back, [Component("cobuchi", frozenset({"g"}))])) == "cobuchi-direction"

    def test_08_hesitant_branching(self):
        both = {"g": BAnd(BMove(FORWARD, "g"), BMove(FORWARD, "h")), "h": BMove(FORWARD, "h")}
        assert self.requirement(make(both, [Component("buchi", frozenset({"g", "h"}))])) == "existential"
        either = {"g": BOr(BMove(FORWARD, "g"), BMove(FORWARD, "h")), "h": BMove(FORWARD, "h")}
        assert self.requirement(make(either, [Component("cobuchi", frozenset({"g", "h"}))])) == "universal"


class TestMembership:
    """Bottom-up acceptance with Büchi games on the infinite components."""

    def test_01_always(self):
        assert haa_accepts(always_p(), ALL_P)
        assert not haa_accepts(always_p(), P_THEN_NOT)
        assert haa_accepts(always_p(), P_THEN_NOT.moved(1)) is False

    def test_02_dual_is_the_complement(self):
        dual = validate_haa(dualize(always_p()))
        assert dual.components[0].kind == "cobuchi"
        assert not haa_accepts(dual, ALL_P)
        assert haa_accepts(dual, P_THEN_NOT)

    def test_03_embedded_snba_agrees(self):
        word = Lasso.of([{"p"}, set(), {"p", "q"}], [{"q"}])
        for snba in (snba_literal("p"), snba_origin(), snba_shift_prev(snba_literal("p"))):
            haa = snba_as_haa(snba)
            for j in range(5):
                pt = PointedLasso(word, j)
                assert haa_accepts(haa, pt) == snba.accepts(pt)

    def test_04_buchi_game(self):
        owner = {"x": "E", "y": "A", "z": "E"}
        succ = {"x": ["x", "y"], "y": ["x", "z"], "z": ["z"]}
        assert solve_buchi_game(owner, owner, succ, {"x"}, "E") == {"x"}
        assert solve_buchi_game(owner, owner, succ, {"x", "z"}, "E") == {"x", "y", "z"}


class TestDealternation:
    """The nondeterministic automaton accepts what the alternating one does."""

    points = [ALL_P, P_THEN_NOT, P_THEN_NOT.moved(1), PointedLasso(Lasso.of([set()], [{"p"}]), 0)]

    def test_01_buchi_only(self):
        haa = always_p()
        snba = haa_to_snba(haa)
        for pt in self.points:
            assert snba.accepts(pt) == haa_accepts(haa, pt)

    def test_02_rank_conversion(self):
        dual = dualize(always_p())
        ranked = rank_convert(dual)
        assert all(c.kind != "cobuchi" for c in ranked.components)
        assert ranked.initial == ("rk", "g", 2)
        snba = haa_to_snba(dual)
        for pt in self.points:
            assert snba.accepts(pt) == haa_accepts(dual, pt)

    def test_03_round_trip_through_embedding(self):
        word = Lasso.of([{"p"}, set(), {"p", "q"}], [{"q"}])
        for snba in (snba_literal("p"), snba_origin(), snba_shift_prev(snba_literal("p")), snba_shift_next(snba_literal("q"))):
            back = haa_to_snba(snba_as_haa(snba))
            for j in range(5):
                pt = PointedLasso(word, j)
                assert back.accepts(pt) == snba.accepts(pt)


def test_gn_marks():
    assert gn_marks(always_p()) == {0: True}
    assert gn_marks(dualize(always_p())) == {0: False}


def random_automata(random_pltl, count, max_states):
    """Trimmed tableau automata of random one-proposition formulas, small enough to de-alternate."""
    found = []
    for _ in range(count * 50):
        automaton = tableau_snba(to_nnf(random_pltl(props=("p",), depth=2)))
        if 0 < len(automaton.states) <= max_states:
            found.append(automaton)
        if len(found) == count:
            break
    assert len(found) == count
    return found


class TestRandomAutomata:
    """Complement and de-alternation on embeddings of random automata."""

    def check(self, automata, random_lasso):
        for snba in automata:
            haa = snba_as_haa(snba)
            dual = dualize(haa)
            back = haa_to_snba(dual)
            lasso = random_lasso(props=("p",), max_stem=2, max_loop=2)
            for pos in range(3):
                pt = PointedLasso(lasso, pos)
                inside = snba.accepts(pt)
                assert haa_accepts(haa, pt) == inside
                assert haa_accepts(dual, pt) != inside
                assert back.accepts(pt) != inside

    def test_01_few_samples(self, random_pltl, random_lasso):
        self.check(random_automata(random_pltl, 12, 4), random_lasso)

    @pytest.mark.slow
    def test_02_many_samples(self, random_pltl, random_lasso):
        self.check(random_automata(random_pltl, 200, 6), random_lasso)
