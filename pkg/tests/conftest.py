import functools

import pytest

from qham.hamming import HammingSpace, full_bipartite
from qham.spectral import primitive_idempotents
from qham.terwilliger import build_context

ACCEPTANCE_LINES: list[tuple[str, bool, str]] = []


@functools.lru_cache(maxsize=None)
def context(D: int, n: int):
    return build_context(full_bipartite(HammingSpace(D, n)))


@functools.lru_cache(maxsize=None)
def spectral_data(D: int, n: int):
    return primitive_idempotents(context(D, n))


@pytest.fixture
def ctx23():
    return context(2, 3)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, info in ACCEPTANCE_LINES:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {info}")
