import pytest

_VERDICTS: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def verdict():
    """Record one acceptance line: ``verdict("C3", ok, "detail")``."""

    def record(key: str, ok: bool, detail: str = ""):
        _VERDICTS[key] = (bool(ok), detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    order = sorted(_VERDICTS, key=lambda k: int(k[1:]))
    for key in order:
        ok, detail = _VERDICTS[key]
        terminalreporter.write_line(f"{key:>4} {'PASS' if ok else 'FAIL'}  {detail}")
