import json

import pytest

from hypermc.errors import CrosscheckError, FragmentError
from hypermc.parser import parse_formula
from hypermc.pipeline import CheckOptions, _sat_stats, crosscheck, quantifier_polarities, run_check, run_oracle
from hypermc.qptl import qptl_to_sghltl
from hypermc.speclib import instantiate
from hypermc.translate import SatResult, qptl_sat

UNIVERSAL = parse_formula("forall x. forall y. G (p@x <-> p@y)")
EXISTENTIAL = parse_formula("exists x. F p@x")


def test_polarities_follow_negation():
    assert quantifier_polarities(UNIVERSAL) == {"forall"}
    assert quantifier_polarities(parse_formula("!exists x. p@x")) == {"forall"}
    assert quantifier_polarities(parse_formula("(exists x. p@x) <-> true")) == {"exists", "forall"}


class TestCrosscheck:
    """The bounded verdict transfers only in the direction its quantifiers allow."""

    def test_01_agreement(self):
        assert crosscheck(UNIVERSAL, "holds", "true") == "oracle agrees: true"

    def test_02_unknown(self):
        assert crosscheck(UNIVERSAL, "holds", "unknown") == "oracle: unknown"

    def test_03_existential_witness_contradicts_fails(self):
        with pytest.raises(CrosscheckError):
            crosscheck(EXISTENTIAL, "fails", "true")

    def test_04_universal_counterexample_contradicts_holds(self):
        with pytest.raises(CrosscheckError):
            crosscheck(UNIVERSAL, "holds", "false")

    def test_05_non_transferable_disagreement_is_a_note(self):
        note = crosscheck(UNIVERSAL, "fails", "true")
        assert "not conclusive" in note


class TestOracleReport:
    def test_01_bounds_are_recorded(self, k1):
        report = run_oracle(k1, EXISTENTIAL, stem_bound=3)
        assert report.verdict == "true"
        assert report.stem_bound == 3
        assert report.lassos >= 1
        assert report.pred_scope == "domain"


def test_check_rejects_non_simple_sentences(k1):
    with pytest.raises(FragmentError):
        run_check(k1, parse_formula("forall x. forall y. <x,y> X p@x"))


class TestEndToEnd:
    """Whole pipeline on the sample structures, one holding and one failing case each."""

    def test_01_suffix_closure(self, k1, k2, samples_dir):
        phi = parse_formula((samples_dir / "suffix.ghyper").read_text(encoding="utf-8"))
        report = run_check(k1, phi)
        assert report.verdict == "holds"
        assert "empty subscript: stutter extension and guards skipped" in report.notes
        assert report.stages[-1].automaton_states <= 200_000
        assert run_check(k2, phi).verdict == "fails"

    @pytest.mark.slow
    def test_02_promptness(self, kfast, kslow, samples_dir):
        phi = parse_formula((samples_dir / "promptness.ghyper").read_text(encoding="utf-8"))
        assert run_check(kfast, phi).verdict == "holds"
        assert run_check(kslow, phi).verdict == "fails"
        response = parse_formula((samples_dir / "response.ghyper").read_text(encoding="utf-8"))
        assert run_check(kslow, response).verdict == "holds"

    def test_03_observational_determinism(self, sample):
        phi = instantiate("od")
        report = run_check(sample("od_pos"), phi)
        assert report.verdict == "holds"
        assert [s.name for s in report.stages][-2:] == ["qptl-encoding", "qptl-sat"]
        assert run_check(sample("od_neg"), phi).verdict == "fails"

    @pytest.mark.slow
    def test_04_after_initialization(self, sample):
        k = sample("after_init")
        assert run_check(k, instantiate("after-init")).verdict == "holds"
        assert run_check(k, instantiate("after-init", quantifiers="forall x", body="G o@x")).verdict == "fails"

    def test_05_artifacts_and_crosscheck(self, k1, tmp_path):
        options = CheckOptions(
            stats_path=tmp_path / "stats.json",
            emit_qptl=tmp_path / "psi.qptl",
            emit_stage=1,
            stage_dir=tmp_path / "stages",
            oracle_crosscheck=True,
        )
        report = run_check(k1, EXISTENTIAL, options)
        assert report.verdict == "holds"
        assert report.oracle_verdict == "true"
        assert "oracle agrees: true" in report.notes
        assert json.loads((tmp_path / "stats.json").read_text(encoding="utf-8"))["verdict"] == "holds"
        assert parse_formula((tmp_path / "psi.qptl").read_text(encoding="utf-8"), "qptl", allow_internal=True)
        assert (tmp_path / "stages" / "stage1.kripke").exists()


@pytest.mark.slow
@pytest.mark.parametrize("text", ["exists p. (p & X !p)", "exists p. (p & !p)", "exists p. G (p <-> X !p)"])
def test_qptl_round_trip_through_model_checking(text):
    psi = parse_formula(text, "qptl")
    k_ap, phi = qptl_to_sghltl(psi)
    expected = "holds" if qptl_sat(psi).satisfiable else "fails"
    assert run_check(k_ap, phi).verdict == expected


def test_component_split_only_on_request():
    counted = SatResult(True, stats={"snba_states": 3, "gn_components": 2, "other_components": 1})
    assert _sat_stats(counted).gn_split == {"gn": 2, "other": 1}
    assert _sat_stats(SatResult(True, stats={"snba_states": 3})).gn_split is None
