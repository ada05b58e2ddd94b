import numpy as np
import pytest


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)


@pytest.fixture
def record(request, capsys):
    """Record one PASS/FAIL line for an acceptance criterion.

    The line is written straight to the terminal and repeated in the
    end-of-session summary.
    """

    def _record(number, passed, detail):
        line = f"criterion {number} {'PASS' if passed else 'FAIL'}: {detail}"
        request.config._acceptance_lines.append(line)
        with capsys.disabled():
            print(f"\n{line}")
        return passed

    return _record


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
