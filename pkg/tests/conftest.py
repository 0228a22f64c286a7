import pytest

_RESULTS = {}


@pytest.fixture
def record():
    """Store ``(criterion, passed, detail)`` for the end-of-run summary."""
    def _record(criterion, passed, detail=""):
        prev = _RESULTS.get(criterion)
        if prev is not None:
            passed = passed and prev[0]
            detail = "; ".join(d for d in (prev[1], detail) if d)
        _RESULTS[criterion] = (passed, detail)
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_RESULTS):
        passed, detail = _RESULTS[k]
        terminalreporter.write_line(
            f"criterion {k}: {'PASS' if passed else 'FAIL'}" + (f"  ({detail})" if detail else ""))
