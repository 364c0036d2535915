import pytest
from hypothesis import HealthCheck, settings

from sensorkey.ec import SECP160R1, TOY16
from sensorkey.kgc import generate_network

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def net160():
    return generate_network(6, SECP160R1, master_seed=7)


@pytest.fixture(scope="session")
def net_toy():
    return generate_network(6, TOY16, master_seed=7)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import VERDICTS
    except ImportError:
        return
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(VERDICTS):
            terminalreporter.write_line(VERDICTS[n])
