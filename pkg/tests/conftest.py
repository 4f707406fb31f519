import sys
from pathlib import Path

import numpy as np
import pytest

from donorqc.dynamics import evolve as evolve_mod

sys.path.insert(0, str(Path(__file__).parent))

# every propagator built anywhere in the run is checked against this budget
PROPAGATOR_ERRORS: list[float] = []
ACCEPTANCE_LINES: list[str] = []

_original_init = evolve_mod.Propagator.__init__


def _recording_init(self, *args, **kwargs):
    _original_init(self, *args, **kwargs)
    PROPAGATOR_ERRORS.append(evolve_mod.unitarity_error(self.unitary))


evolve_mod.Propagator.__init__ = _recording_init


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
    if PROPAGATOR_ERRORS:
        worst = max(PROPAGATOR_ERRORS)
        status = "PASS" if worst < evolve_mod.UNITARITY_TOL else "FAIL"
        terminalreporter.write_line(
            f"[{status}] unitarity over the whole run: {len(PROPAGATOR_ERRORS)} propagators, "
            f"max ||U^+U - I|| = {worst:.3e}")


def pytest_sessionfinish(session, exitstatus):
    if PROPAGATOR_ERRORS and max(PROPAGATOR_ERRORS) >= evolve_mod.UNITARITY_TOL:
        session.exitstatus = 1
