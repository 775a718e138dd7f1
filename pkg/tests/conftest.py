import importlib.resources

import pytest

from rislink.channel import load_scenario


def shipped_scenario(name):
    """Load one of the packaged figure scenarios by file name."""
    path = importlib.resources.files("rislink") / "scenarios" / name
    return load_scenario(str(path))


@pytest.fixture(scope="session")
def fig1_cfg():
    return shipped_scenario("fig1.cfg")


@pytest.fixture(scope="session")
def fig2_cfg():
    return shipped_scenario("fig2.cfg")


@pytest.fixture(scope="session")
def fig5_cfg():
    return shipped_scenario("fig5.cfg")
