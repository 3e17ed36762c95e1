import pytest

# acceptance outcomes, filled by tests/test_acceptance.py
_LINES: dict[int, str] = {}


@pytest.fixture
def record():
    def _record(number: int, title: str, ok: bool, detail: str) -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail}"
        _LINES[number] = line
        print(line)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance")
    for k in sorted(_LINES):
        terminalreporter.write_line(_LINES[k])
