import pytest
from hypothesis import settings

from mvrp.instance import City, DistanceMatrix, Instance, generate_random_instance

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def make_instance(points, depot=1):
    """Instance with ids 1..n at ``points``."""
    return Instance(tuple(City(k + 1, float(x), float(y)) for k, (x, y) in enumerate(points)), depot)


@pytest.fixture
def square():
    # depot at the origin, customers on the other three unit-square corners
    inst = make_instance([(0, 0), (1, 0), (1, 1), (0, 1)])
    return inst, DistanceMatrix(inst)


@pytest.fixture(scope="session")
def paper_instance():
    return generate_random_instance(180, 35.0, 100, seed=42)


# one line per acceptance criterion, filled in by tests/test_acceptance.py
ACCEPTANCE_RESULTS: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(ACCEPTANCE_RESULTS[number])
