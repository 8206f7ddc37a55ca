import pytest

from hygroscale.materials import find, load_database


@pytest.fixture(scope="session")
def db():
    return load_database()


@pytest.fixture(scope="session")
def by_name(db):
    def lookup(key):
        return find(db, key)
    return lookup
