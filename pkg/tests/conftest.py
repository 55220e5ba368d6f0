import pytest

ACCEPTANCE_RESULTS = []


def record_criterion(name: str, ok: bool, note: str = ""):
    ACCEPTANCE_RESULTS.append((name, ok, note))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, ok, note in ACCEPTANCE_RESULTS:
        word = "PASS" if ok else "FAIL"
        suffix = f"  ({note})" if note else ""
        terminalreporter.write_line(f"[{word}] {name}{suffix}")


@pytest.fixture
def criterion():
    def _record(name, ok, note=""):
        record_criterion(name, ok, note)
        return ok
    return _record
