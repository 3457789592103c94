from acceptance_log import RESULTS


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(RESULTS):
        status, detail = RESULTS[num]
        terminalreporter.write_line(f"criterion {num}: {status} - {detail}")
