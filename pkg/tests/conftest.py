import pathlib

import pytest


@pytest.fixture(scope="session")
def fixture_dir():
    return pathlib.Path(__file__).parent / "data"
