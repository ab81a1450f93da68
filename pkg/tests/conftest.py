import pytest

# criterion number -> (status, detail), filled by the acceptance suite
ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {status}  {detail}")


@pytest.fixture
def criterion():
    """Record PASS/FAIL/SKIP for one numbered criterion and print it."""
    def record(number: int, status: str, detail: str = "") -> None:
        ACCEPTANCE[number] = (status, detail)
        print(f"criterion {number}: {status}  {detail}")

    return record
