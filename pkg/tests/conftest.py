import pytest

from padictheta.config import load_config
from padictheta.pipeline import build_setup


@pytest.fixture(scope="session")
def cfg():
    return load_config()


@pytest.fixture(scope="session")
def setup(cfg):
    return build_setup(cfg)


@pytest.fixture(scope="session")
def eig(setup):
    return setup.eig


@pytest.fixture(scope="session")
def algebra(setup):
    return setup.algebra
