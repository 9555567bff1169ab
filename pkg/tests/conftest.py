import warnings

import pytest

warnings.filterwarnings("ignore", message=".*TBB.*")

from planarmaps.maps import MapClass, fly_map, parallel_edges_map
from planarmaps.patterns import Pattern


@pytest.fixture(scope="session")
def fly():
    return Pattern(fly_map())


@pytest.fixture(scope="session")
def twogon():
    return Pattern(parallel_edges_map(2))


@pytest.fixture(scope="session")
def fly_types(fly):
    from planarmaps.patterns import enumerate_intersection_types

    return enumerate_intersection_types(fly, MapClass.ALL)


@pytest.fixture(scope="session")
def fly_solution(fly, fly_types):
    from planarmaps.series import build_pattern_equation, solve_pattern_equation

    eq = build_pattern_equation(fly, fly_types, MapClass.ALL)
    return solve_pattern_equation(eq, 8, 2)


@pytest.fixture()
def fly_file(tmp_path):
    from planarmaps.maps import save_map

    p = tmp_path / "fly.map"
    save_map(fly_map(), p)
    return str(p)


@pytest.fixture()
def twogon_file(tmp_path):
    from planarmaps.maps import save_map

    p = tmp_path / "twogon.map"
    save_map(parallel_edges_map(2), p)
    return str(p)
