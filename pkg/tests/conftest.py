import random
from pathlib import Path

import pytest

from hypermc.config import get_settings
from hypermc.formula import (
    TRUE,
    And,
    Always,
    Eventually,
    Historically,
    Next,
    Not,
    Once,
    Or,
    Prop,
    Since,
    Until,
    Yesterday,
)
from hypermc.kripke import Lasso, load_kripke

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def pytest_addoption(parser):
    parser.addoption("--run-slow", action="store_true", default=False, help="run tests marked slow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(autouse=True)
def fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def samples_dir() -> Path:
    return SAMPLES


@pytest.fixture
def sample():
    """Load ``samples/<name>.kripke``."""

    def load(name: str):
        return load_kripke(SAMPLES / f"{name}.kripke")

    return load


@pytest.fixture
def k1(sample):
    return sample("k1")


@pytest.fixture
def k2(sample):
    return sample("k2")


@pytest.fixture
def kfast(sample):
    return sample("kfast")


@pytest.fixture
def kslow(sample):
    return sample("kslow")


# ─────────────────────────────────────────────────────────────────────────────
# Random generators (seeded)
# ─────────────────────────────────────────────────────────────────────────────


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240611)


@pytest.fixture
def random_lasso(rng):
    def make(props=("p", "q"), max_stem: int = 3, max_loop: int = 3) -> Lasso:
        def letter():
            return frozenset(p for p in props if rng.random() < 0.5)

        stem = [letter() for _ in range(rng.randint(0, max_stem))]
        loop = [letter() for _ in range(rng.randint(1, max_loop))]
        return Lasso.of(stem, loop)

    return make


@pytest.fixture
def random_pltl(rng):
    """Random PLTL formula of bounded depth over the given propositions."""
    unary = (Not, Next, Yesterday, Eventually, Always, Once, Historically)
    binary = (And, Or, Until, Since)

    def make(props=("p", "q"), depth: int = 3):
        if depth == 0 or rng.random() < 0.25:
            return TRUE if rng.random() < 0.1 else Prop(rng.choice(props))
        if rng.random() < 0.45:
            return rng.choice(unary)(make(props, depth - 1))
        return rng.choice(binary)(make(props, depth - 1), make(props, depth - 1))

    return make
