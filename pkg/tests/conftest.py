import pytest

_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def acceptance():
    """Record the outcome of an acceptance criterion: ``acceptance(n, ok, detail)``."""

    def record(n: int, ok: bool, detail: str) -> bool:
        _ACCEPTANCE[n] = (bool(ok), detail)
        print(f"ACCEPTANCE {n:2d} {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[n]
        terminalreporter.write_line(f"ACCEPTANCE {n:2d} {'PASS' if ok else 'FAIL'}  {detail}")
