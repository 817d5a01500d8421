"""
End-to-end drivers behind the command line: model checking through the
reduction chain and QPTL satisfiability, the bounded oracle, and the
comparison of the two.
"""

import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional

from .config import get_settings
from .emit import output_dir, write_dot_files, write_formula, write_report, write_stage
from .errors import CrosscheckError, FragmentError
from .formula import (
    Exists,
    ExistsP,
    Forall,
    ForallP,
    Formula,
    Iff,
    Implies,
    Not,
    render,
    size,
)
from .kripke import FairKripke, Lasso, fair_lassos_upto
from .oracle import Verdict, eval_hyper_bounded
from .qptl import encode_mc_to_qptl
from .reduce import ReductionArtifacts, reduce_to_empty
from .schemas import CheckReport, OracleReport, StageStats, WitnessTrace
from .syntax import classify_fragment, strong_alternation_depth
from .translate import SatResult, qptl_sat

logger = logging.getLogger(__name__)

_STATE_PREFIX = "$fs$"


@dataclass
class CheckOptions:
    state_limit: Optional[int] = None
    emit_qptl: Optional[Path] = None
    emit_dot: Optional[Path] = None
    emit_stage: Optional[int] = None
    stage_dir: Optional[Path] = None
    stats_path: Optional[Path] = None
    oracle_crosscheck: bool = False
    stem_bound: Optional[int] = None
    pos_bound: Optional[int] = None
    pred_scope: Optional[str] = None


# ─────────────────────────────────────────────────────────────────────────────
# Witness decoding
# ─────────────────────────────────────────────────────────────────────────────


def _witness_vars(witness: Lasso) -> List[str]:
    found = set()
    for name in witness.props():
        if name.startswith(_STATE_PREFIX):
            found.add(name.rsplit("$", 1)[1])
    return sorted(found)


def decode_witness(witness: Lasso, var: str, ap: FrozenSet[str]) -> Optional[Lasso]:
    """
    The trace of ``var`` carried by the forward propositions of a
    satisfying lasso, read from the first position with a state marker.
    """
    states = [n for n in witness.props() if n.startswith(_STATE_PREFIX) and n.endswith(f"${var}")]
    seq = witness.letters
    start = next(
        (j for j in range(seq.threshold + seq.period) if any(s in seq.at(j) for s in states)),
        None,
    )
    if start is None:
        return None

    def letter(a):
        return frozenset(p for p in ap if f"$fp${p}${var}" in a)

    tail = seq.shift(start).map(letter)
    return Lasso(tail.prefix, tail.loop).canonical()


def _witness_report(witness: Lasso, ap: FrozenSet[str]) -> Dict[str, WitnessTrace]:
    out: Dict[str, WitnessTrace] = {}
    for var in _witness_vars(witness):
        trace = decode_witness(witness, var, ap)
        if trace is None:
            continue
        out[var] = WitnessTrace(
            stem=[sorted(a) for a in trace.stem],
            loop=[sorted(a) for a in trace.loop],
        )
    return out


# ─────────────────────────────────────────────────────────────────────────────
# Model checking
# ─────────────────────────────────────────────────────────────────────────────


def _stage_stats(artifacts: ReductionArtifacts) -> List[StageStats]:
    return [
        StageStats(
            name=st.name,
            structure_states=len(st.kripke.states),
            formula_size=size(st.formula),
            sad=strong_alternation_depth(st.formula),
            seconds=round(st.seconds, 6),
        )
        for st in artifacts.stages
    ]


def _sat_stats(result: SatResult) -> StageStats:
    split = None
    if "gn_components" in result.stats:
        split = {"gn": result.stats["gn_components"], "other": result.stats["other_components"]}
    return StageStats(
        name="qptl-sat",
        automaton_states=result.stats.get("snba_states"),
        formula_size=result.stats.get("formula_size"),
        sad=result.sad,
        seconds=round(result.seconds, 6),
        gn_split=split,
    )


def run_check(kripke: FairKripke, phi: Formula, options: Optional[CheckOptions] = None) -> CheckReport:
    """Decide K ⊨ φ for a simple sentence: reduce, encode into QPTL, solve."""
    options = options or CheckOptions()
    fragment = classify_fragment(phi)
    if not fragment.is_simple:
        raise FragmentError(f"the decision procedure needs a simple sentence, got {fragment.label}")

    artifacts = reduce_to_empty(phi, kripke)
    started = time.perf_counter()
    psi = encode_mc_to_qptl(artifacts.k_empty, artifacts.phi_empty)
    encode_seconds = time.perf_counter() - started
    result = qptl_sat(psi, limit=options.state_limit)

    stages = _stage_stats(artifacts)
    stages.append(
        StageStats(
            name="qptl-encoding",
            formula_size=size(psi),
            sad=strong_alternation_depth(psi),
            seconds=round(encode_seconds, 6),
        )
    )
    stages.append(_sat_stats(result))

    verdict = "holds" if result.satisfiable else "fails"
    report = CheckReport(
        verdict=verdict,
        fragment=fragment.label,
        gamma=[render(g) for g in fragment.gamma],
        sad=strong_alternation_depth(phi),
        stages=stages,
    )
    if result.witness is not None:
        report.witness = _witness_report(result.witness, kripke.ap) or None
    if not fragment.gamma:
        report.notes.append("empty subscript: stutter extension and guards skipped")

    _emit(options, artifacts, psi, result)
    if options.oracle_crosscheck:
        oracle = run_oracle(kripke, phi, options.stem_bound, options.pos_bound, options.pred_scope)
        report.oracle_verdict = oracle.verdict
        note = crosscheck(phi, verdict, oracle.verdict)
        if note:
            report.notes.append(note)
    if options.stats_path is not None:
        write_report(options.stats_path, report)
    logger.info("check verdict=%s fragment=%s", verdict, fragment.label)
    return report


def _emit(options: CheckOptions, artifacts: ReductionArtifacts, psi: Formula, result: SatResult) -> None:
    if options.emit_qptl is not None:
        write_formula(options.emit_qptl, psi)
    if options.emit_stage is not None:
        if not 1 <= options.emit_stage <= 4:
            raise ValueError("stage index must be in 1..4")
        st = artifacts.stage(options.emit_stage)
        write_stage(output_dir(options.stage_dir), options.emit_stage, st.formula, st.kripke)
    if options.emit_dot is not None:
        graphs = [(f"stage{st.index}_kripke", st.kripke) for st in artifacts.stages]
        if result.automaton is not None:
            graphs.append(("qptl_snba", result.automaton))
        if result.nba is not None:
            graphs.append(("qptl_nba", result.nba))
        write_dot_files(options.emit_dot, graphs)


# ─────────────────────────────────────────────────────────────────────────────
# Oracle and cross-checking
# ─────────────────────────────────────────────────────────────────────────────


def run_oracle(
    kripke: FairKripke,
    phi: Formula,
    stem_bound: Optional[int] = None,
    pos_bound: Optional[int] = None,
    pred_scope: Optional[str] = None,
) -> OracleReport:
    settings = get_settings()
    n = stem_bound or settings.stem_bound
    bound = pos_bound if pos_bound is not None else settings.pos_bound
    scope = pred_scope or settings.pred_scope
    started = time.perf_counter()
    lassos = fair_lassos_upto(kripke, n)
    verdict = eval_hyper_bounded(lassos, phi, bound or None, scope)
    return OracleReport(
        verdict=verdict.value,
        lassos=len(lassos),
        stem_bound=n,
        pos_bound=bound,
        pred_scope=scope,
        seconds=round(time.perf_counter() - started, 6),
    )


def quantifier_polarities(phi: Formula) -> FrozenSet[str]:
    """{"exists", "forall"} subset: the effective kind of every trace quantifier."""
    found = set()

    def go(f: Formula, positive: bool) -> None:
        if isinstance(f, (Exists, ExistsP)):
            found.add("exists" if positive else "forall")
        elif isinstance(f, (Forall, ForallP)):
            found.add("forall" if positive else "exists")
        if isinstance(f, Not):
            go(f.arg, not positive)
        elif isinstance(f, Implies):
            go(f.left, not positive)
            go(f.right, positive)
        elif isinstance(f, Iff):
            for child in f.children():
                go(child, positive)
                go(child, not positive)
        else:
            for child in f.children():
                go(child, positive)

    go(phi, True)
    return frozenset(found)


def crosscheck(phi: Formula, verdict: str, oracle_verdict: str) -> Optional[str]:
    """
    The oracle sees a finite subset of the fair traces, so its verdict
    transfers only in one direction: true for purely existential sentences,
    false for purely universal ones. Raises CrosscheckError on a
    transferable disagreement; otherwise returns a note for the report.
    """
    kinds = quantifier_polarities(phi)
    expected = {"holds": Verdict.TRUE.value, "fails": Verdict.FALSE.value}[verdict]
    if oracle_verdict == Verdict.UNKNOWN.value:
        return "oracle: unknown"
    transfers = (oracle_verdict == Verdict.TRUE.value and kinds <= {"exists"}) or (
        oracle_verdict == Verdict.FALSE.value and kinds <= {"forall"}
    )
    if oracle_verdict == expected:
        return f"oracle agrees: {oracle_verdict}"
    if transfers:
        raise CrosscheckError(f"pipeline says {verdict}, bounded oracle says {oracle_verdict}")
    return f"oracle says {oracle_verdict} on the bounded trace set; not conclusive for this quantifier prefix"


__all__ = [
    "CheckOptions",
    "decode_witness",
    "run_check",
    "run_oracle",
    "quantifier_polarities",
    "crosscheck",
]
