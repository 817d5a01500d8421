"""
Library of parameterized sentences.

The templates live in ``speclib.yaml`` next to this module; the snippets they
reference (agreement conjunctions, observation points, ...) are built here
from the parameter values.
"""

import logging
import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from string import Template
from typing import Callable, Dict, List, Mapping, Optional, Tuple

import yaml

from .errors import FragmentError
from .formula import Formula
from .parser import parse_formula

logger = logging.getLogger(__name__)

_LIBRARY_PATH = Path(__file__).resolve().parent / "speclib.yaml"
_SPLIT = re.compile(r"[\s,]+")


@dataclass(frozen=True)
class SpecParam:
    name: str
    default: str
    help: str = ""


@dataclass(frozen=True)
class SpecTemplate:
    name: str
    description: str
    template: str
    params: Tuple[SpecParam, ...] = ()
    snippets: Callable[[Mapping[str, str]], Dict[str, str]] = field(default=lambda values: {}, compare=False)

    def text(self, **overrides: str) -> str:
        values = {p.name: p.default for p in self.params}
        unknown = set(overrides) - set(values)
        if unknown:
            raise FragmentError(f"template {self.name!r} has no parameter(s) {', '.join(sorted(unknown))}")
        values.update({k: v for k, v in overrides.items() if v is not None})
        mapping = dict(values)
        mapping.update(self.snippets(values))
        return Template(self.template).substitute(mapping)

    def instantiate(self, **overrides: str) -> Formula:
        return parse_formula(self.text(**overrides))


def prop_list(value: str) -> List[str]:
    return [p for p in _SPLIT.split(value.strip()) if p]


def _conj_text(parts: List[str]) -> str:
    if not parts:
        return "true"
    return "(" + " & ".join(parts) + ")"


def _agree(props: List[str], x: str, y: str, op: str = "") -> str:
    return _conj_text([f"{op}({p}@{x} <-> {p}@{y})" for p in props])


# ─────────────────────────────────────────────────────────────────────────────
# Snippet builders
# ─────────────────────────────────────────────────────────────────────────────


def _od(values: Mapping[str, str]) -> Dict[str, str]:
    low_out = prop_list(values["low_out"])
    if not low_out:
        raise FragmentError("od needs at least one low output")
    return {
        "inputs_agree": _agree(prop_list(values["low_in"]), "x", "y"),
        "outputs_agree": _agree(low_out, "x", "y"),
        "low_out_list": ", ".join(low_out),
    }


def initialized(var: str, init_prop: str) -> str:
    """PI(x): x points at the first position after the initialization phase."""
    return f"(<{var}> (!{init_prop}@{var} & (!Y true | Y {init_prop}@{var})))"


def _after_init(values: Mapping[str, str]) -> Dict[str, str]:
    prefix = []
    items = [q.strip() for q in values["quantifiers"].split(",") if q.strip()]
    if not items:
        raise FragmentError("after-init needs at least one quantifier")
    for item in items:
        parts = item.split()
        if len(parts) != 2 or parts[0] not in ("forall", "exists"):
            raise FragmentError(f"bad quantifier {item!r}: expected 'forall v' or 'exists v'")
        word, var = parts
        glue = "->" if word == "forall" else "&"
        prefix.append(f"{word}P {var}. ({initialized(var, values['init_prop'])} {glue} ")
    return {"prefix": "".join(prefix), "closing": ")" * len(items)}


def observation_point(var: str, observable: List[str]) -> str:
    changes = " | ".join(f"({p} <-> !Y {p})" for p in observable)
    return f"[!Y true | {changes}]@{var}"


def equal_level(x: str, y: str, gamma: str = "") -> str:
    """E(x, y): both pointed traces reach their origins after the same number of steps."""
    return f"O{{{gamma}}} ([!Y true]@{x} & [!Y true]@{y})"


def _diagnosability(values: Mapping[str, str]) -> Dict[str, str]:
    observable = prop_list(values["observable"])
    if not observable:
        raise FragmentError("diagnosability needs at least one observable proposition")
    obs = ", ".join(observable)
    history = " & ".join(f"H{{{obs}}} ({p}@x <-> {p}@y)" for p in observable)
    return {
        "obs_list": obs,
        "obs_point_x": observation_point("x", observable),
        "obs_point_y": observation_point("y", observable),
        "equivalent": f"({history} & {equal_level('x', 'y', obs)})",
    }


def _equal_level(values: Mapping[str, str]) -> Dict[str, str]:
    return {"equal_level": equal_level("x", "y")}


def _suffix(values: Mapping[str, str]) -> Dict[str, str]:
    props = prop_list(values["props"])
    return {"agree": _conj_text([f"G ({p}@x1 <-> {p}@x2)" for p in props])}


_SNIPPETS: Dict[str, Callable[[Mapping[str, str]], Dict[str, str]]] = {
    "od": _od,
    "after-init": _after_init,
    "diagnosability": _diagnosability,
    "equal-level": _equal_level,
    "suffix": _suffix,
}


# ─────────────────────────────────────────────────────────────────────────────
# Loading
# ─────────────────────────────────────────────────────────────────────────────


@lru_cache()
def load_library(path: Optional[str] = None) -> Dict[str, SpecTemplate]:
    source = Path(path) if path else _LIBRARY_PATH
    try:
        raw = yaml.safe_load(source.read_text(encoding="utf-8")) or {}
    except yaml.YAMLError as exc:
        raise FragmentError(f"cannot read template library {source}: {exc}") from exc
    library: Dict[str, SpecTemplate] = {}
    for name, entry in raw.items():
        params = tuple(
            SpecParam(pname, str(spec.get("default", "")), spec.get("help", ""))
            for pname, spec in (entry.get("params") or {}).items()
        )
        library[name] = SpecTemplate(
            name=name,
            description=entry.get("description", ""),
            template=entry["template"],
            params=params,
            snippets=_SNIPPETS.get(name, lambda values: {}),
        )
    logger.debug("spec library path=%s templates=%s", source, len(library))
    return library


def get_template(name: str) -> SpecTemplate:
    library = load_library()
    if name not in library:
        raise FragmentError(f"unknown template {name!r}; known: {', '.join(sorted(library))}")
    return library[name]


def instantiate(name: str, **params: str) -> Formula:
    return get_template(name).instantiate(**params)


__all__ = [
    "SpecParam",
    "SpecTemplate",
    "prop_list",
    "initialized",
    "observation_point",
    "equal_level",
    "load_library",
    "get_template",
    "instantiate",
]
