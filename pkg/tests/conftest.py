"""Shared test plumbing: the acceptance suite records one line per
criterion and the terminal summary prints them after the run."""

ACCEPTANCE_RESULTS = {}


def record_criterion(number: int, passed: bool, detail: str = "") -> None:
    ACCEPTANCE_RESULTS[number] = ("PASS" if passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        status, detail = ACCEPTANCE_RESULTS[number]
        line = f"criterion {number}: {status}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
