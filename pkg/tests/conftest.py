"""Shared pytest plumbing.

The acceptance module records one (criterion, passed) entry per test; the
terminal-summary hook reprints them after the run so the per-criterion
lines are visible even with output capture enabled.
"""

ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok in ACCEPTANCE:
        terminalreporter.write_line(f"[acceptance] {name}: {'PASS' if ok else 'FAIL'}")
