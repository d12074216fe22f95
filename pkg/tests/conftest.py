from functools import lru_cache
from pathlib import Path

import pytest

from imds.core import build_lts
from imds.lang import load_system

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
GOLDEN = Path(__file__).resolve().parent / "golden"

# acceptance lines collected during the run, printed in the terminal summary
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@lru_cache(maxsize=None)
def corpus_system(name: str):
    return load_system((CORPUS / name).read_text())[0]


@lru_cache(maxsize=None)
def corpus_lts(name: str):
    return build_lts(corpus_system(name))


@pytest.fixture
def listing_text() -> str:
    return (CORPUS / "two_robots.imds").read_text()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k[2:])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{key} {'PASS' if ok else 'FAIL'}  {detail}")
