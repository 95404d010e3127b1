def pytest_terminal_summary(terminalreporter):
    from test_acceptance import CRITERIA, RESULTS, format_line

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        if number in RESULTS:
            name, ok, detail = RESULTS[number]
            terminalreporter.write_line(format_line(number, name, ok, detail))
        else:
            terminalreporter.write_line(f"[SKIP] criterion {number}: {CRITERIA[number][0]} -- not run")
