import pytest

from renyimi.random_instances import SeededGenerator

_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def gen(request):
    # one substream per test, keyed by the test name, so tests do not share draws
    key = sum(ord(c) * (i + 1) for i, c in enumerate(request.node.name)) % (2**32)
    return SeededGenerator(20240601, (key,))


@pytest.fixture
def acceptance():
    """Record ``(criterion, passed, detail)`` for the end-of-run summary."""

    def record(number: int, passed: bool, detail: str):
        _ACCEPTANCE[number] = (bool(passed), detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[n]
        tr.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
