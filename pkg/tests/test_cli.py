import json

import pytest
from click.testing import CliRunner

import hypermc.cli
from hypermc.cli import EXIT_DISAGREE, EXIT_FAILS, EXIT_HOLDS, EXIT_UNKNOWN, EXIT_USAGE, cli
from hypermc.errors import CrosscheckError
from hypermc.formula import render
from hypermc.speclib import instantiate


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def run(runner):
    def invoke(*args):
        return runner.invoke(cli, [str(a) for a in args])

    return invoke


class TestTemplates:
    def test_01_list(self, run):
        result = run("spec", "list")
        assert result.exit_code == 0
        names = [line.split()[0] for line in result.stdout.splitlines()]
        assert "od" in names and "suffix" in names

    def test_02_show_with_parameters(self, run):
        result = run("spec", "show", "od", "--param", "low_out=lo hi")
        assert result.exit_code == 0
        assert result.stdout == render(instantiate("od", low_out="lo hi")) + "\n"

    def test_03_bad_parameters(self, run):
        assert run("spec", "show", "od", "--param", "nonsense").exit_code == EXIT_USAGE
        assert run("spec", "show", "nonexistent").exit_code == EXIT_USAGE


def test_kripke_ap_prints_the_block_structure(run):
    result = run("kripke-ap", "p")
    assert result.exit_code == 0
    assert result.stdout.splitlines()[0] == "state in init { $in $tag }"
    assert "edge off_1 tag" in result.stdout


def test_translate_kltl(run, samples_dir):
    result = run("translate-kltl", "--text", "K[a] o", samples_dir / "agents.obs")
    assert result.exit_code == 0
    assert result.stdout.splitlines()[-1] == "fragment: SimpleGamma({o}, singleton_free=False)"


class TestExitCodes:
    """0 holds, 1 fails, 2 usage or input errors, 3 unknown, 4 oracle disagreement."""

    def test_01_oracle_true_and_false(self, run, samples_dir):
        k1 = samples_dir / "k1.kripke"
        ok = run("oracle", "--kripke", k1, "--formula", "exists x. F p@x", "--text")
        assert ok.exit_code == EXIT_HOLDS
        assert ok.stdout.startswith("verdict: true")
        refuted = run("oracle", "--kripke", k1, "--formula", "forall x. X p@x", "--text", "--stem-bound", "3")
        assert refuted.exit_code == EXIT_FAILS

    def test_02_syntax_error(self, run, samples_dir):
        result = run("check", samples_dir / "k1.kripke", "--text", "exists x. (")
        assert result.exit_code == EXIT_USAGE

    def test_03_missing_structure(self, run, tmp_path):
        assert run("check", tmp_path / "absent.kripke", "--text", "exists x. p@x").exit_code == EXIT_USAGE

    def test_04_qptl_sat(self, run):
        assert run("qptl-sat", "--text", "exists p. G (p <-> X !p)").exit_code == EXIT_HOLDS
        assert run("qptl-sat", "--text", "exists p. (p & !p)").exit_code == EXIT_FAILS

    def test_05_state_limit_is_unknown(self, run):
        result = run("qptl-sat", "--text", "--state-limit", "1", "exists p. G (p <-> X !p)")
        assert result.exit_code == EXIT_UNKNOWN

    def test_06_oracle_reads_formula_files(self, run, samples_dir):
        result = run("oracle", "--kripke", samples_dir / "k1.kripke", "--formula", samples_dir / "suffix.ghyper")
        assert result.exit_code == EXIT_HOLDS

    def test_07_oracle_needs_named_options(self, run, samples_dir):
        result = run("oracle", samples_dir / "k1.kripke", "--text", "exists x. F p@x")
        assert result.exit_code == EXIT_USAGE
        assert run("oracle", "--formula", "exists x. p@x", "--text").exit_code == EXIT_USAGE

    def test_08_disagreement_has_its_own_code(self, run, samples_dir, monkeypatch):
        def disagree(*args, **kwargs):
            raise CrosscheckError("pipeline says holds, bounded oracle says false")

        monkeypatch.setattr(hypermc.cli, "run_check", disagree)
        result = run("check", samples_dir / "k1.kripke", "--text", "exists x. p@x", "--oracle-crosscheck")
        assert result.exit_code == EXIT_DISAGREE
        assert "bounded oracle says false" in result.output


def test_check_reports_json(run, samples_dir, tmp_path):
    result = run(
        "check",
        samples_dir / "k1.kripke",
        samples_dir / "suffix.ghyper",
        "--json",
        "--stats",
        tmp_path / "stats.json",
    )
    assert result.exit_code == EXIT_HOLDS
    report = json.loads(result.stdout)
    assert report["verdict"] == "holds"
    assert report["fragment"] == "SghltlEmpty(singleton_free=False)"
    assert (tmp_path / "stats.json").exists()
