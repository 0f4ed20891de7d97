import pytest

from hermden.field import PrimeContext
from hermden.lattice import HermMatrix


@pytest.fixture(scope="session")
def ctx3():
    return PrimeContext(3)


@pytest.fixture(scope="session")
def ctx5():
    return PrimeContext(5)


@pytest.fixture
def diag(ctx3):
    def make(*exps, ctx=None):
        return HermMatrix.from_exponents(ctx or ctx3, list(exps))
    return make


_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def acceptance():
    """Record one verdict per acceptance criterion; printed at the end of the run."""
    def record(number: int, ok: bool, detail: str = ""):
        if number in _ACCEPTANCE:
            prev_ok, prev_detail = _ACCEPTANCE[number]
            ok, detail = prev_ok and ok, f"{prev_detail} | {detail}"
        _ACCEPTANCE[number] = (ok, detail)
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
