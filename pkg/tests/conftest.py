import os

import pytest
from hypothesis import HealthCheck, settings

from fpiter import Player, build_game

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

E, O = Player.EVEN, Player.ODD

E1_NODES = [(0, E, [1, 2]), (1, O, [4]), (2, O, [3]), (3, O, [0]), (4, O, [0])]


@pytest.fixture
def e1():
    return build_game(E1_NODES)


def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture(scope="session")
def acceptance_log(request):
    return request.config._acceptance_lines


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
