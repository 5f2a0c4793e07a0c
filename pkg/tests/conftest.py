from __future__ import annotations

from functools import lru_cache

import pytest

from gsaw.algebra import solve_transfer
from gsaw.automaton import build, minimize


@lru_cache(maxsize=None)
def built(h: int, model: str = "plain"):
    return build(h, model)


@lru_cache(maxsize=None)
def minimal(h: int, model: str = "plain"):
    return minimize(built(h, model))


@lru_cache(maxsize=None)
def gf(h: int, model: str = "plain", x=None, y=None):
    a = built(h, model)
    if x is not None or y is not None:
        a = a.specialize(x=x, y=y)
    return solve_transfer(minimize(a))


@pytest.fixture
def out_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("GSAW_OUTPUT_DIR", str(tmp_path))
    return tmp_path


ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
