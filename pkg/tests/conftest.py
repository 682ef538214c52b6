import pytest

from normtower.tower import build_tower


@pytest.fixture(scope="session")
def tower_3_2():
    return build_tower(3, 2, 3, 6)


@pytest.fixture(scope="session")
def tower_3_4():
    return build_tower(3, 4, 3, 6)


@pytest.fixture(scope="session")
def tower_5_2():
    return build_tower(5, 2, 1, 4)
