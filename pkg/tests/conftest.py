import pytest
from hypothesis import settings

from cayley_machines import groups

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def q8():
    return groups.quaternion()


@pytest.fixture(scope="session")
def d8():
    return groups.dihedral8()


@pytest.fixture(scope="session")
def c2():
    return groups.cyclic(2)
