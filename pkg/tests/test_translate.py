import pytest

from hypermc.config import Settings
from hypermc.errors import NotSentenceError, ResourceLimitError
from hypermc.formula import ExistsProp
from hypermc.kripke import Lasso, PointedLasso
from hypermc.oracle import eval_pltl_lasso
from hypermc.parser import parse_formula
from hypermc.translate import qptl_sat, qptl_to_snba


def qptl(text):
    return parse_formula(text, "qptl")


class TestSatisfiability:
    """Emptiness of the translated automaton at position 0."""

    def test_01_alternating_witness(self):
        psi = qptl("exists p. G (p <-> X !p)")
        result = qptl_sat(psi)
        assert result.satisfiable
        assert isinstance(psi, ExistsProp)
        assert eval_pltl_lasso(PointedLasso(result.witness, 0), psi.body)

    def test_02_contradiction_is_unsatisfiable(self):
        result = qptl_sat(qptl("exists p. (p & G (p -> X p) & F !p)"))
        assert not result.satisfiable
        assert result.witness is None

    def test_03_universal_root_goes_through_the_negation(self):
        assert not qptl_sat(qptl("forall p. F p")).satisfiable
        valid = qptl_sat(qptl("forall p. (p | !p)"))
        assert valid.satisfiable
        assert valid.witness == Lasso((), (frozenset(),))

    def test_04_free_propositions(self):
        with pytest.raises(NotSentenceError):
            qptl_sat(qptl("G p"))
        assert qptl_sat(qptl("G p"), require_closed=False).satisfiable

    def test_05_alternation_depth_and_stats(self):
        result = qptl_sat(qptl("exists p. forall q. (p | q)"))
        assert result.satisfiable
        assert result.sad == 1
        assert result.stats["formula_size"] > 0
        assert result.stats["snba_states"] == len(result.automaton.states)

    def test_06_past_inside_quantifiers(self):
        assert qptl_sat(qptl("exists p. X (p & Y !p)")).satisfiable
        assert not qptl_sat(qptl("exists p. (p & X Y !p)")).satisfiable


class TestResources:
    def test_01_state_limit(self):
        with pytest.raises(ResourceLimitError):
            qptl_sat(qptl("exists p. G (p <-> X !p)"), limit=1)

    def test_02_component_counts_on_request(self, monkeypatch):
        monkeypatch.setattr(Settings, "gn_report", True)
        result = qptl_sat(qptl("exists p. G (p <-> X !p)"))
        assert "gn_components" in result.stats
        assert "other_components" in result.stats


LASSOS = [
    Lasso.of([{"p"}, {"p"}, {"q"}], [set(), {"p"}]),
    Lasso.of([set()], [{"p", "q"}, {"q"}]),
]


@pytest.mark.parametrize(
    "text",
    [
        "p U q",
        "Y p",
        "X X p",
        "!p R q",
        "G F p",
        "p S q",
        "(p U q) & H (p | q)",
    ],
)
def test_automaton_agrees_with_direct_evaluation(text):
    f = parse_formula(text, "pltl")
    snba = qptl_to_snba(f)
    for lasso in LASSOS:
        for pos in range(4):
            pt = PointedLasso(lasso, pos)
            assert snba.accepts(pt) == eval_pltl_lasso(pt, f), (text, lasso, pos)


class TestRandomFormulas:
    """Translated automata against direct evaluation on random pointed lassos."""

    def check(self, count, depth, random_pltl, random_lasso):
        for _ in range(count):
            f = random_pltl(depth=depth)
            snba = qptl_to_snba(f)
            lasso = random_lasso()
            for pos in range(4):
                pt = PointedLasso(lasso, pos)
                assert snba.accepts(pt) == eval_pltl_lasso(pt, f), (f, lasso, pos)

    def test_01_few_formulas(self, random_pltl, random_lasso):
        self.check(25, 3, random_pltl, random_lasso)

    @pytest.mark.slow
    def test_02_many_formulas(self, random_pltl, random_lasso):
        self.check(300, 4, random_pltl, random_lasso)

    def test_03_existential_closure_is_satisfiable_iff_the_body_is(self, random_pltl):
        for _ in range(10):
            body = random_pltl(props=("p",), depth=2)
            plain = qptl_sat(body, require_closed=False).satisfiable
            assert qptl_sat(ExistsProp("p", body)).satisfiable == plain
