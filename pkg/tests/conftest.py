import hypothesis
import pytest

from mprp.generator import GenParams, generate
from mprp.model import Instance, Site

hypothesis.settings.register_profile("default", deadline=None, max_examples=100)
hypothesis.settings.register_profile("fast", deadline=None, max_examples=10)
hypothesis.settings.load_profile("default")


def make_instance(sites, m=1, capacity=100.0, horizon=100.0, depot=(0.0, 0.0)):
    """sites: iterable of (x, y, start, end, quantity); ids assigned in order."""
    return Instance(
        tuple(Site(i, *spec) for i, spec in enumerate(sites)), depot[0], depot[1], m, capacity, horizon
    )


@pytest.fixture
def preset_instance():
    return generate(GenParams())


@pytest.fixture
def small_instances():
    return [generate(GenParams(n=7, m=2, capacity=cap, seed=s)) for s in range(10) for cap in (400.0, 5000.0)]


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
