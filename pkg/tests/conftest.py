import re

import pytest

_LINES = []


@pytest.fixture
def acceptance(capsys):
    """record(n, title, ok, detail): print one PASS/FAIL line and fail the test if not ok."""
    def record(n, title, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {n:>2} ({title}): {detail}"
        _LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: int(re.search(r"criterion\s+(\d+)", s).group(1))):
            terminalreporter.write_line(line)
