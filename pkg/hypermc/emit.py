import logging
from pathlib import Path
from typing import Iterable, Optional, Union

from filelock import FileLock
from pydantic import BaseModel

from .config import get_settings
from .formula import Formula, render
from .kripke import FairKripke

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _write_text_atomic(text: str, target_path: Path, suffix: str = ".tmp") -> None:
    """
    Write to a temp file and atomically replace the target. Uses a file lock to avoid
    concurrent writers stepping on each other.
    """
    target_path.parent.mkdir(parents=True, exist_ok=True)
    lock = FileLock(str(target_path) + ".lock")
    with lock:
        tmp_path = target_path.with_name(target_path.name + suffix)
        tmp_path.write_text(text, encoding="utf-8")
        # Path.replace overwrites on both POSIX/Windows.
        tmp_path.replace(target_path)


def output_dir(directory: Optional[PathLike] = None) -> Path:
    return Path(directory) if directory is not None else Path(get_settings().output_dir)


def write_text(path: PathLike, text: str) -> Path:
    target = Path(path)
    _write_text_atomic(text, target)
    logger.debug("wrote path=%s bytes=%s", target, len(text))
    return target


def write_report(path: PathLike, report: BaseModel) -> Path:
    return write_text(path, report.model_dump_json(indent=2) + "\n")


def write_formula(path: PathLike, formula: Formula) -> Path:
    """The printed form re-parses to the same tree."""
    return write_text(path, render(formula) + "\n")


def write_kripke(path: PathLike, kripke: FairKripke) -> Path:
    return write_text(path, kripke.to_text())


def write_dot_files(directory: PathLike, graphs: Iterable[tuple]) -> list:
    """
    ``graphs`` yields (file stem, object with ``to_dot(name)``); one
    ``<stem>.dot`` per object.
    """
    out = []
    base = Path(directory)
    for stem, obj in graphs:
        name = "".join(ch if ch.isalnum() else "_" for ch in stem)
        out.append(write_text(base / f"{stem}.dot", obj.to_dot(name)))
    logger.info("emitted dot files=%s dir=%s", len(out), base)
    return out


def write_stage(directory: PathLike, index: int, formula: Formula, kripke: FairKripke) -> tuple:
    base = Path(directory)
    return (
        write_formula(base / f"stage{index}.formula", formula),
        write_kripke(base / f"stage{index}.kripke", kripke),
    )
