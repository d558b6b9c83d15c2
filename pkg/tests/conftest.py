import pytest

from souvlaki.assembly import assemble_tn, spine_truncation
from souvlaki.topology import FULL, MeatballSpec, materialize_meatball


@pytest.fixture(scope="session")
def m1():
    return materialize_meatball(MeatballSpec(1), FULL)


@pytest.fixture(scope="session")
def m2():
    return materialize_meatball(MeatballSpec(2), FULL)


@pytest.fixture(scope="session")
def m3():
    return materialize_meatball(MeatballSpec(3), FULL)


@pytest.fixture(scope="session")
def tn1():
    return assemble_tn(1, 7)


@pytest.fixture(scope="session")
def tn2():
    return assemble_tn(2, 7)


@pytest.fixture(scope="session")
def spine2():
    return spine_truncation(2)


@pytest.fixture(scope="session")
def spine3():
    return spine_truncation(3)


@pytest.fixture(scope="session")
def spine4():
    return spine_truncation(4)
