import pytest
from hypothesis import HealthCheck, settings

from nbcrit.acceptance import scenario_field
from nbcrit.localfield import GroundFieldSpec, make_ground_field

settings.register_profile(
    "nbcrit",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("nbcrit")


@pytest.fixture(scope="session")
def Q2():
    return make_ground_field(GroundFieldSpec(0, 2))


@pytest.fixture(scope="session")
def F2():
    return make_ground_field(GroundFieldSpec(2, 2))


@pytest.fixture(scope="session")
def Q3z():
    return make_ground_field(GroundFieldSpec(0, 3, (("3", "3", "1"),)))


@pytest.fixture(scope="session")
def built():
    """``built(name) -> (scenario, N, ramification data)`` for shipped scenarios."""
    return scenario_field


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
