def pytest_terminal_summary(terminalreporter, exitstatus, config):
    from _criteria import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        rec = RESULTS[number]
        status = "PASS" if rec.passed else "FAIL"
        terminalreporter.write_line(
            f"CRITERION {number:02d} {status} "
            f"({rec.elapsed:.2f}s < {rec.limit:g}s) {rec.description}")
