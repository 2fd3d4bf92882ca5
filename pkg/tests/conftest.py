import pytest

from farpoint.config import default_config, default_display


@pytest.fixture(scope="session")
def display():
    return default_display()


@pytest.fixture()
def config():
    return default_config()
