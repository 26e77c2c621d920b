"""Shared pytest wiring: replay acceptance verdict lines in the terminal
summary, where capture cannot swallow them.

The verdicts live in the acceptance module itself; scanning sys.modules
sidesteps the fact that pytest may import conftest under a different module
identity than `tests.conftest`.
"""

import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = []
    for mod in list(sys.modules.values()):
        lines.extend(getattr(mod, "ACCEPTANCE_VERDICTS", ()))
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
