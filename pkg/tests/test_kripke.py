import pytest

from hypermc.errors import DuplicateStateError, KripkeFormatError, NotTotalError, UnknownStateError
from hypermc.kripke import (
    Lasso,
    UPSeq,
    fair_lassos_upto,
    fair_state_lassos_upto,
    letter,
    make_kripke,
    parse_kripke,
)


class TestTextFormat:
    """Parsing and printing of the structure text format."""

    def test_01_flags_labels_and_edges(self, kslow):
        assert kslow.states == ("r", "w", "s")
        assert kslow.init == frozenset({"r"})
        assert kslow.fair == frozenset({"s"})
        assert kslow.labels["r"] == letter("q")
        assert kslow.successors["w"] == ("s", "w")
        assert kslow.ap == frozenset({"p", "q"})

    def test_02_no_fair_flag_means_all_fair(self, k1):
        assert k1.fair == frozenset(k1.states)

    def test_03_printed_text_parses_back(self, kslow, k2):
        for k in (kslow, k2):
            assert parse_kripke(k.to_text()) == k

    def test_04_not_total(self):
        with pytest.raises(NotTotalError) as info:
            parse_kripke("state a init { p }\nstate b { }\nedge a b\n")
        assert info.value.state == "b"

    def test_05_unknown_state(self):
        with pytest.raises(UnknownStateError):
            parse_kripke("state a init { }\nedge a c\n")

    def test_06_duplicate_state(self):
        with pytest.raises(DuplicateStateError):
            parse_kripke("state a init { }\nstate a { p }\nedge a a\n")

    def test_07_syntax_error_has_position(self):
        with pytest.raises(KripkeFormatError) as info:
            parse_kripke("state a init { p\nedge a a\n")
        assert info.value.line is not None

    def test_08_dot_output(self, kslow):
        dot = kslow.to_dot("slow")
        assert dot.startswith("digraph slow {")
        assert '"s" [shape=doublecircle' in dot


class TestLassos:
    def test_01_canonical_form(self):
        a = Lasso.of([{"p"}, set()], [{"p"}, set(), {"p"}, set()])
        assert a.canonical() == Lasso.of([], [{"p"}, set()])

    def test_02_same_trace_different_shapes(self):
        a = Lasso.of([{"q"}], [set(), {"p"}, {"q"}])
        b = Lasso.of([], [{"q"}, set(), {"p"}])
        assert a.same_trace(b)
        assert not a.same_trace(Lasso.of([], [{"q"}]))

    def test_03_positions_and_projection(self):
        a = Lasso.of([{"p", "q"}], [{"q"}, set()])
        assert a.unroll(5) == [letter("p", "q"), letter("q"), letter(), letter("q"), letter()]
        assert a.project({"p"}) == Lasso.of([{"p"}], [set(), set()])
        assert a.props() == frozenset({"p", "q"})

    def test_04_empty_loop_is_rejected(self):
        with pytest.raises(ValueError):
            Lasso.of([{"p"}], [])

    def test_05_rotations_keep_the_shortest_stem(self):
        # every shape of the alternator trace lands on the form fair_lassos_upto reports for K1
        shapes = [
            Lasso.of([{"p"}], [set(), {"p"}]),
            Lasso.of([{"p"}, set()], [{"p"}, set()]),
            Lasso.of([], [{"p"}, set(), {"p"}, set()]),
        ]
        assert {s.canonical() for s in shapes} == {Lasso.of([], [{"p"}, set()])}
        assert Lasso.of([set()], [{"p"}, set()]).canonical() == Lasso.of([], [set(), {"p"}])


class TestUltimatelyPeriodic:
    def test_01_shift_and_normalize(self):
        seq = UPSeq((1, 2), (3, 4))
        assert seq.shift(3) == UPSeq((), (4, 3))
        assert UPSeq((4,), (3, 4)).normalized() == UPSeq((), (4, 3))

    def test_02_zip_with_uses_common_period(self):
        a = UPSeq((), (True, False))
        b = UPSeq((), (True, True, False))
        both = a.zip_with(b, lambda x, y: x and y)
        assert [both.at(j) for j in range(6)] == [True, False, False, False, True, False]


class TestBoundedEnumeration:
    """Fair lassos with at most n states before the back-edge."""

    def test_01_alternator(self, k1):
        assert fair_lassos_upto(k1, 1) == frozenset()
        assert fair_lassos_upto(k1, 4) == frozenset({Lasso.of([], [{"p"}, set()])})

    def test_02_fairness_filters_lassos(self, kslow):
        found = fair_lassos_upto(kslow, 4)
        assert Lasso.of([], [{"q"}, set(), {"p"}]) in found
        assert Lasso.of([], [{"q"}, set(), set(), {"p"}]) in found
        assert all(any("p" in a for a in l.loop) for l in found)

    def test_03_state_lassos(self, k2):
        assert fair_state_lassos_upto(k2, 3) == frozenset({(("a",), ("b",))})

    def test_04_bound_must_be_positive(self, k1):
        with pytest.raises(ValueError):
            fair_lassos_upto(k1, 0)


def test_make_kripke_defaults_to_all_fair():
    k = make_kripke({"a": ["p"], "b": []}, [("a", "b"), ("b", "b")], ["a"])
    assert k.fair == frozenset({"a", "b"})
    assert k.stats() == {"states": 2, "edges": 2, "fair": 2}
