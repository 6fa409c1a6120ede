import numpy as np
import pytest

from arrmorse.arrangement import Arrangement
from arrmorse.lattice import (arrangement_rank, build_lattice, essentialize, euler_characteristic, is_central,
                              is_essential, poincare_coefficients)

from catalog import CATALOG, braid, central_triple, generic_lines, points
from oracles import deletion_restriction_chi, exact_rows, whitney_oracle


SMALL = [k for k, f in CATALOG.items() if f().m <= 6]


@pytest.mark.parametrize("name", SMALL)
def test_lattice_matches_whitney_oracle(name):
    arr = CATALOG[name]()
    lat = build_lattice(arr)
    oracle = whitney_oracle(arr)
    got = {f.generators: f.moebius for f in lat.flats}
    assert got == oracle


@pytest.mark.parametrize("name", SMALL)
def test_chi_matches_deletion_restriction(name):
    arr = CATALOG[name]()
    assert euler_characteristic(build_lattice(arr)) == deletion_restriction_chi(exact_rows(arr), arr.n)


@pytest.mark.parametrize("name", SMALL)
def test_float_mode_agrees_with_exact_mode(name):
    arr = CATALOG[name]()
    exact = build_lattice(arr, exact=True)
    approx = build_lattice(arr, exact=False)
    assert {f.generators: f.moebius for f in exact.flats} == {f.generators: f.moebius for f in approx.flats}


@pytest.mark.parametrize("name", list(CATALOG))
def test_structural_invariants(name):
    arr = CATALOG[name]()
    lat = build_lattice(arr)
    assert sum(1 for f in lat.flats if f.codim == 0) == 1
    assert lat.bottom.moebius == 1
    for f in lat.flats:
        assert f.codim == arr.n - f.dim
        # closed generator sets: no further hyperplane contains the flat
        for j in range(arr.m):
            if j not in f.generators:
                assert not _contains(arr, j, f)
        if f.codim:
            below = [g for g in lat.flats if g.generators < f.generators]
            assert f.moebius == -sum(g.moebius for g in below)


def _contains(arr, j, f):
    a = arr.A[j]
    return abs(a @ f.point + arr.c[j]) < 1e-9 and np.allclose(a @ f.basis, 0, atol=1e-9)


def test_two_points():
    lat = build_lattice(points([0, 1]))
    assert sorted((len(f.generators), f.moebius) for f in lat.flats) == [(0, 1), (1, -1), (1, -1)]
    assert euler_characteristic(lat) == -1
    assert arrangement_rank(lat) == 1 and is_essential(lat)


def test_generic_lines_counts():
    for m, chi in [(3, 1), (4, 3), (5, 6), (6, 10)]:
        lat = build_lattice(generic_lines(m))
        assert euler_characteristic(lat) == chi
        assert poincare_coefficients(lat) == [1, m, m * (m - 1) // 2]


def test_central_triple():
    lat = build_lattice(central_triple())
    point = [f for f in lat.flats if f.codim == 2]
    assert len(point) == 1 and point[0].moebius == 2
    assert euler_characteristic(lat) == 0 and is_central(lat)


def test_braid_rank_and_essentialization():
    arr = braid()
    lat = build_lattice(arr)
    assert arrangement_rank(lat) == 2 and not is_essential(lat)
    red = essentialize(arr)
    core = build_lattice(red.arrangement)
    assert red.arrangement.n == 2 and red.arrangement.m == 3
    assert is_essential(core) and euler_characteristic(core) == euler_characteristic(lat) == 0


@pytest.mark.parametrize("name", list(CATALOG))
def test_chi_invariant_under_essentialization(name):
    arr = CATALOG[name]()
    lat = build_lattice(arr)
    red = essentialize(arr)
    assert euler_characteristic(build_lattice(red.arrangement)) == euler_characteristic(lat)
    if is_essential(lat):
        assert red.identity and red.arrangement is arr


def test_single_hyperplane_in_plane():
    arr = Arrangement.from_rows([[1, 1]], [-1])
    red = essentialize(arr)
    assert red.arrangement.n == 1 and red.arrangement.m == 1
    # the functional is preserved under project / lift
    z = np.array([0.3 + 1j, -2.0])
    w = red.project(z)
    xi_core = red.arrangement.A @ w + red.arrangement.c
    assert np.allclose(xi_core, arr.A @ z + arr.c)
