import re
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def _key(name: str) -> str:
    return name.lower().replace("_", "-")


def declared_pins():
    text = (ROOT / "pyproject.toml").read_text(encoding="utf-8")
    return {_key(n): v for n, v in re.findall(r'"([A-Za-z0-9_.\-]+)==([^"]+)"', text)}


def locked_pins():
    found = {}
    for line in (ROOT / "requirements.txt").read_text(encoding="utf-8").splitlines():
        name, sep, version = line.strip().partition("==")
        if sep:
            found[_key(name)] = version
    return found


def test_lock_file_pins_every_declared_dependency_at_the_same_version():
    declared, locked = declared_pins(), locked_pins()
    assert "click" in declared and "pytest" in declared
    for name, version in declared.items():
        assert locked.get(name) == version, name


def test_lock_file_only_adds_support_packages_of_the_declared_ones():
    extra = set(locked_pins()) - set(declared_pins())
    # pydantic's own dependencies, and click's console colours on Windows
    assert extra == {"annotated-types", "colorama", "pydantic-core", "typing-inspection", "typing-extensions"}
