from pathlib import Path

import pytest

from prescriptive.scm import build_scm, four_segment_preset, null_preset, simpson_preset
from prescriptive.uplift import fit_s_learner, fit_t_learner

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def simpson_scm():
    return build_scm(simpson_preset())


@pytest.fixture(scope="session")
def four_scm():
    return build_scm(four_segment_preset())


@pytest.fixture(scope="session")
def null_scm():
    return build_scm(null_preset())


@pytest.fixture(scope="session")
def simpson_data(simpson_scm):
    return simpson_scm.sample(100_000, 7)


@pytest.fixture(scope="session")
def four_data_50k(four_scm):
    return four_scm.sample(50_000, 11)


@pytest.fixture(scope="session")
def four_data_100k(four_scm):
    return four_scm.sample(100_000, 5)


@pytest.fixture(scope="session")
def t_learner_50k(four_data_50k):
    return fit_t_learner(four_data_50k)


@pytest.fixture(scope="session")
def s_learner_50k(four_data_50k):
    return fit_s_learner(four_data_50k)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
