import functools
import logging
import sys
from pathlib import Path
from typing import Optional, Tuple

import click

from .config import get_settings
from .emit import write_dot_files
from .errors import (
    CrosscheckError,
    FormulaSyntaxError,
    FragmentError,
    FreeVariableError,
    HaaValidationError,
    HyperMCError,
    KripkeFormatError,
    NotSentenceError,
    NotWellNamedError,
    ResourceLimitError,
    UnknownAgentError,
)
from .formula import render
from .kltl import SEMANTICS, parse_obs_map, translate_kltl
from .kripke import load_kripke
from .parser import parse_formula
from .pipeline import CheckOptions, run_check, run_oracle
from .qptl import kripke_for_ap
from .speclib import get_template, load_library
from .syntax import classify_fragment
from .translate import qptl_sat

logger = logging.getLogger(__name__)

EXIT_HOLDS = 0
EXIT_FAILS = 1
EXIT_USAGE = 2
EXIT_UNKNOWN = 3
EXIT_DISAGREE = 4

_USAGE_ERRORS = (
    FormulaSyntaxError,
    KripkeFormatError,
    FragmentError,
    NotSentenceError,
    FreeVariableError,
    NotWellNamedError,
    UnknownAgentError,
    HaaValidationError,
)


class CliError(click.ClickException):
    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


def _handle_errors(fn):
    """Map library errors onto the exit-code contract."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except _USAGE_ERRORS as exc:
            raise CliError(str(exc), EXIT_USAGE) from exc
        except ResourceLimitError as exc:
            raise CliError(str(exc), EXIT_UNKNOWN) from exc
        except CrosscheckError as exc:
            raise CliError(str(exc), EXIT_DISAGREE) from exc
        except HyperMCError as exc:
            raise CliError(str(exc), EXIT_USAGE) from exc
        except OSError as exc:
            raise CliError(str(exc), EXIT_USAGE) from exc

    return wrapper


def _read_formula(source: str, literal: bool, kind: str):
    text = source if literal else Path(source).read_text(encoding="utf-8")
    return parse_formula(text, kind)


def _configure_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else getattr(logging, get_settings().log_level.upper(), logging.INFO)
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s %(message)s", stream=sys.stderr)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Debug logging.")
def cli(verbose: bool) -> None:
    """Model checking for the simple fragment of GHyperLTL with stuttering and contexts."""
    _configure_logging(verbose)


# ─────────────────────────────────────────────────────────────────────────────
# check / oracle
# ─────────────────────────────────────────────────────────────────────────────


@cli.command()
@click.argument("kripke_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("formula")
@click.option("--text", "literal", is_flag=True, help="FORMULA is the formula itself, not a file.")
@click.option("--emit-qptl", type=click.Path(dir_okay=False), help="Write the QPTL sentence.")
@click.option("--emit-dot", type=click.Path(file_okay=False), help="Write DOT files of structures and automata.")
@click.option("--emit-stage", type=click.IntRange(1, 4), help="Write the formula and structure of one stage.")
@click.option("--stage-dir", type=click.Path(file_okay=False), help="Directory for --emit-stage.")
@click.option("--stats", "stats_path", type=click.Path(dir_okay=False), help="Write the JSON report.")
@click.option("--oracle-crosscheck", is_flag=True, help="Compare with the bounded oracle.")
@click.option("--stem-bound", type=click.IntRange(min=1))
@click.option("--pos-bound", type=click.IntRange(min=0))
@click.option("--pred-scope", type=click.Choice(["domain", "context"]))
@click.option("--state-limit", type=click.IntRange(min=1))
@click.option("--json", "as_json", is_flag=True, help="Print the report as JSON.")
@_handle_errors
def check(
    kripke_path: str,
    formula: str,
    literal: bool,
    emit_qptl: Optional[str],
    emit_dot: Optional[str],
    emit_stage: Optional[int],
    stage_dir: Optional[str],
    stats_path: Optional[str],
    oracle_crosscheck: bool,
    stem_bound: Optional[int],
    pos_bound: Optional[int],
    pred_scope: Optional[str],
    state_limit: Optional[int],
    as_json: bool,
) -> None:
    """Decide whether the structure satisfies a simple sentence."""
    kripke = load_kripke(kripke_path)
    phi = _read_formula(formula, literal, "ghyper")
    options = CheckOptions(
        state_limit=state_limit,
        emit_qptl=Path(emit_qptl) if emit_qptl else None,
        emit_dot=Path(emit_dot) if emit_dot else None,
        emit_stage=emit_stage,
        stage_dir=Path(stage_dir) if stage_dir else None,
        stats_path=Path(stats_path) if stats_path else None,
        oracle_crosscheck=oracle_crosscheck,
        stem_bound=stem_bound,
        pos_bound=pos_bound,
        pred_scope=pred_scope,
    )
    report = run_check(kripke, phi, options)
    if as_json:
        click.echo(report.model_dump_json(indent=2))
    else:
        click.echo(f"verdict: {report.verdict}")
        click.echo(f"fragment: {report.fragment}")
        for stage in report.stages:
            click.echo(
                f"  {stage.name}: states={stage.structure_states or stage.automaton_states} "
                f"size={stage.formula_size} sad={stage.sad} seconds={stage.seconds}"
            )
        for var, trace in (report.witness or {}).items():
            click.echo(f"  witness {var}: stem={trace.stem} loop={trace.loop}")
        for note in report.notes:
            click.echo(f"  note: {note}")
    sys.exit(EXIT_HOLDS if report.verdict == "holds" else EXIT_FAILS)


@cli.command()
@click.option(
    "--kripke",
    "kripke_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
    help="Structure file.",
)
@click.option("--formula", required=True, help="Sentence file, or the sentence itself with --text.")
@click.option("--text", "literal", is_flag=True, help="--formula is the formula itself, not a file.")
@click.option("--stem-bound", type=click.IntRange(min=1))
@click.option("--pos-bound", type=click.IntRange(min=0))
@click.option("--pred-scope", type=click.Choice(["domain", "context"]))
@click.option("--json", "as_json", is_flag=True)
@_handle_errors
def oracle(
    kripke_path: str,
    formula: str,
    literal: bool,
    stem_bound: Optional[int],
    pos_bound: Optional[int],
    pred_scope: Optional[str],
    as_json: bool,
) -> None:
    """Three-valued verdict on the fair lassos up to a stem bound."""
    kripke = load_kripke(kripke_path)
    phi = _read_formula(formula, literal, "ghyper")
    report = run_oracle(kripke, phi, stem_bound, pos_bound, pred_scope)
    if as_json:
        click.echo(report.model_dump_json(indent=2))
    else:
        click.echo(f"verdict: {report.verdict} (lassos={report.lassos}, stem bound={report.stem_bound})")
    sys.exit({"true": EXIT_HOLDS, "false": EXIT_FAILS}.get(report.verdict, EXIT_UNKNOWN))


# ─────────────────────────────────────────────────────────────────────────────
# QPTL and KLTL
# ─────────────────────────────────────────────────────────────────────────────


@cli.command("qptl-sat")
@click.argument("formula")
@click.option("--text", "literal", is_flag=True, help="FORMULA is the formula itself, not a file.")
@click.option("--state-limit", type=click.IntRange(min=1))
@click.option("--emit-dot", type=click.Path(file_okay=False))
@_handle_errors
def qptl_sat_command(formula: str, literal: bool, state_limit: Optional[int], emit_dot: Optional[str]) -> None:
    """Satisfiability of a QPTL sentence."""
    psi = _read_formula(formula, literal, "qptl")
    result = qptl_sat(psi, limit=state_limit)
    click.echo(f"verdict: {'sat' if result.satisfiable else 'unsat'}")
    click.echo(f"sad: {result.sad}")
    if result.witness is not None:
        click.echo(f"witness: {result.witness}")
    if emit_dot and result.automaton is not None:
        write_dot_files(emit_dot, [("snba", result.automaton), ("nba", result.nba)])
    sys.exit(EXIT_HOLDS if result.satisfiable else EXIT_FAILS)


@cli.command("translate-kltl")
@click.argument("formula")
@click.argument("obs_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--text", "literal", is_flag=True, help="FORMULA is the formula itself, not a file.")
@click.option("--semantics", type=click.Choice(SEMANTICS), default="async", show_default=True)
@_handle_errors
def translate_kltl_command(formula: str, obs_path: str, literal: bool, semantics: str) -> None:
    """Print the GHyperLTL sentence of a KLTL formula and its fragment."""
    psi = _read_formula(formula, literal, "kltl")
    obs = parse_obs_map(Path(obs_path).read_text(encoding="utf-8"))
    phi = translate_kltl(psi, obs, semantics)
    click.echo(render(phi))
    click.echo(f"fragment: {classify_fragment(phi).label}")


# ─────────────────────────────────────────────────────────────────────────────
# Template library and K_AP
# ─────────────────────────────────────────────────────────────────────────────


@cli.group()
def spec() -> None:
    """Parameterized sentences."""


@spec.command("list")
def spec_list() -> None:
    for name, template in sorted(load_library().items()):
        click.echo(f"{name:16} {template.description}")


@spec.command("show")
@click.argument("name")
@click.option("--param", "params", multiple=True, metavar="KEY=VALUE")
@_handle_errors
def spec_show(name: str, params: Tuple[str, ...]) -> None:
    template = get_template(name)
    values = {}
    for item in params:
        key, sep, value = item.partition("=")
        if not sep:
            raise click.BadParameter(f"expected KEY=VALUE, got {item!r}", param_hint="--param")
        values[key.strip()] = value.strip()
    phi = template.instantiate(**values)
    click.echo(render(phi))


@cli.command("kripke-ap")
@click.argument("props", nargs=-1)
def kripke_ap(props: Tuple[str, ...]) -> None:
    """Print the block-encoding structure for the given propositions."""
    click.echo(kripke_for_ap(list(props)).to_text(), nl=False)


def main() -> None:
    cli(prog_name="hypermc")


if __name__ == "__main__":
    main()
