"""Shared collection of acceptance results, printed at the end of the run."""

ACCEPTANCE: list[tuple[str, bool, str]] = []


def record(criterion: str, ok: bool, detail: str) -> bool:
    ACCEPTANCE.append((criterion, ok, detail))
    print(f"{'PASS' if ok else 'FAIL'} {criterion}: {detail}")
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {criterion}: {detail}")
