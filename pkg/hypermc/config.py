import os
from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv

# Load environment variables from project root and hypermc/.env if present
_ROOT_ENV = Path(__file__).resolve().parent.parent / ".env"
_PKG_ENV = Path(__file__).resolve().parent / ".env"
load_dotenv(_ROOT_ENV)
load_dotenv(_PKG_ENV)


def _flag(name: str, default: str = "0") -> bool:
    return os.getenv(name, default).strip().lower() in {"1", "true", "yes", "on"}


class Settings:
    """
    Centralized settings with environment overrides.
    """

    # Resource guards
    state_limit: int = int(os.getenv("HYPERMC_STATE_LIMIT", "200000"))

    # Oracle bounds
    stem_bound: int = int(os.getenv("HYPERMC_STEM_BOUND", "4"))
    pos_bound: int = int(os.getenv("HYPERMC_POS_BOUND", "0"))  # 0 -> heuristic default
    pred_scope: str = os.getenv("HYPERMC_PRED_SCOPE", "domain")

    # Automata
    gn_report: bool = _flag("HYPERMC_GN_REPORT")  # report the GN / other component split

    # Output
    log_level: str = os.getenv("HYPERMC_LOG_LEVEL", "INFO")
    output_dir: str = os.getenv(
        "HYPERMC_OUTPUT_DIR", str(Path(__file__).resolve().parent.parent / "out")
    )


@lru_cache()
def get_settings() -> Settings:
    return Settings()
