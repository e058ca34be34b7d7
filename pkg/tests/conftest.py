import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pexpfan import catalog


@pytest.fixture(scope="session")
def p1():
    return catalog.projective_line()


@pytest.fixture(scope="session")
def p2():
    return catalog.projective_plane()


@pytest.fixture(scope="session")
def p112():
    return catalog.weighted_p112()


@pytest.fixture(scope="session")
def cube():
    return catalog.cube_fan()


@pytest.fixture(scope="session")
def complete_corpus():
    return {
        "p1": catalog.projective_line(),
        "p2": catalog.projective_plane(),
        "p1xp1": catalog.p1_times_p1(),
        "hirzebruch2": catalog.hirzebruch(2),
        "p112": catalog.weighted_p112(),
        "cube": catalog.cube_fan(),
    }
