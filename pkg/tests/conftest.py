import time

import pytest

from siegel_sturm.generators import load_lattice, theta_series

ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}
SUITE_BUDGET_SECONDS = 300
_started = time.perf_counter()


@pytest.fixture(scope="session")
def e8():
    return load_lattice("e8")


@pytest.fixture(scope="session")
def theta_e8_2_2(e8):
    return theta_series(e8, 2, 2)


@pytest.fixture(scope="session")
def theta_e8_2_3(e8):
    return theta_series(e8, 2, 3)


@pytest.fixture(scope="session")
def theta_e8_3_1(e8):
    return theta_series(e8, 3, 1)


@pytest.fixture(scope="session")
def theta_deg2_corpus(e8, theta_e8_2_2):
    return {
        "e8": theta_e8_2_2,
        "e8e8": theta_series(load_lattice("e8e8"), 2, 1),
        "d16plus": theta_series(load_lattice("d16plus"), 2, 1),
    }


def pytest_sessionfinish(session, exitstatus):
    # the sweep criterion bounds the runtime of the whole suite
    elapsed = time.perf_counter() - _started
    session.config._suite_elapsed = elapsed
    if elapsed > SUITE_BUDGET_SECONDS and exitstatus == 0:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    elapsed = getattr(config, "_suite_elapsed", time.perf_counter() - _started)
    verdict = "within" if elapsed <= SUITE_BUDGET_SECONDS else "OVER"
    terminalreporter.write_line(f"suite runtime {elapsed:.1f}s ({verdict} the {SUITE_BUDGET_SECONDS}s budget)")
