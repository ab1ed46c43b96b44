import pytest

from fogmind.rules import default_rulebook, proximity_fixture_rulebase


@pytest.fixture(scope="session")
def rb():
    return default_rulebook()


@pytest.fixture(scope="session")
def fixture_rb():
    return proximity_fixture_rulebase()
