import pytest

from wikicite.langconfig import load_language_config


@pytest.fixture(scope="session")
def en_config():
    return load_language_config("en")


@pytest.fixture(scope="session")
def fr_config():
    return load_language_config("fr")
