import numpy as np
import pytest

from arrmorse.arrangement import Arrangement, Weights, log_f_alpha
from arrmorse.errors import BudgetExhausted, NotCritical, PointOnArrangement
from arrmorse.lattice import build_lattice, euler_characteristic
from arrmorse.master import (SolverConfig, certify_morse, common_point, critical_equation_residual,
                             euler_residual_lower_bound, find_critical_points, log_gradient, real_hessian,
                             residual_jacobian, residual_map)

from oracles import fd_gradient, fd_hessian
from catalog import (CATALOG, central_planes, central_triple, complex_lines, generic_lines, generic_planes, ones,
                     points, random_point, triangle_plus_parallel)


def test_log_gradient_examples():
    two = points([0, 1])
    assert np.allclose(log_gradient(two, ones(two), [0.5]).value, 0)
    one = points([0])
    assert np.allclose(log_gradient(one, Weights(["1"]), [2.0]).value, [0.5])


def test_critical_equation_examples():
    two = points([0, 1])
    assert critical_equation_residual(two, ones(two), [0.5]) == pytest.approx(0, abs=1e-15)
    assert critical_equation_residual(two, Weights(["1", "2"]), [1 / 3]) == pytest.approx(0, abs=1e-15)


@pytest.mark.parametrize("name", list(CATALOG))
def test_gradient_matches_finite_differences(name):
    arr = CATALOG[name]()
    w = Weights([1.0 + 0.5 * k for k in range(arr.m)])
    rng = np.random.default_rng(7)
    for _ in range(200):
        z = random_point(arr, rng)
        assert np.allclose(log_gradient(arr, w, z).value, fd_gradient(arr, w, z), atol=1e-6)


@pytest.mark.parametrize("name", list(CATALOG))
def test_residual_equivalence_and_unit_gradients(name):
    arr = CATALOG[name]()
    w = ones(arr)
    rng = np.random.default_rng(11)
    for _ in range(50):
        z = random_point(arr, rng)
        v = log_gradient(arr, w, z).value
        assert np.allclose(v, np.conj(residual_map(arr, w, z)), atol=1e-12)
        assert critical_equation_residual(arr, w, z) == pytest.approx(np.linalg.norm(v), rel=1e-12)
        # each u_j has norm |a_j|
        xi = arr.values(z)
        u = (xi / np.abs(xi))[:, None] * np.conj(arr.A)
        assert np.allclose(np.linalg.norm(u, axis=1), np.linalg.norm(arr.A, axis=1))


def test_jacobian_matches_finite_differences():
    arr = complex_lines()
    w = Weights([1.0, 2.0, 0.5, 1.5])
    rng = np.random.default_rng(2)
    z = random_point(arr, rng)
    h = 1e-6
    J = residual_jacobian(arr, w, z)
    for k in range(arr.n):
        e = np.zeros(arr.n, dtype=complex)
        e[k] = h
        col = (residual_map(arr, w, z + e) - residual_map(arr, w, z - e)) / (2 * h)
        assert np.allclose(J[:, k], col, atol=1e-6)


def test_hessian_matches_finite_differences_at_random_points():
    arr = generic_lines(4)
    w = ones(arr)
    rng = np.random.default_rng(5)
    for _ in range(5):
        z = random_point(arr, rng, 1.0)
        assert np.allclose(real_hessian(arr, w, z), fd_hessian(arr, w, z), atol=1e-4)


def test_two_points_single_critical_point():
    arr = points([0, 1])
    (p,) = find_critical_points(arr, ones(arr))
    assert abs(p.location[0] - 0.5) < 1e-12
    assert p.hessian_signature == (1, 1)


def test_unequal_weights_closed_form():
    arr = points([0, 1])
    (p,) = find_critical_points(arr, Weights(["1", "2"]))
    assert abs(p.location[0] - 1 / 3) < 1e-12


@pytest.mark.parametrize("m", [2, 3, 4, 5, 6])
def test_companion_matrix_oracle(m):
    rng = np.random.default_rng(100 + m)
    ps = np.sort(rng.uniform(-5, 5, m))
    alpha = [f"{k}/{d}" for k, d in zip(rng.integers(1, 9, m), rng.integers(1, 5, m))]
    arr = points(list(ps))
    w = Weights(alpha)
    found = np.sort_complex(np.array([p.location[0] for p in find_critical_points(arr, w)]))
    # sum alpha_i prod_{j != i} (z - p_j)
    poly = np.zeros(m)
    for i in range(m):
        poly = poly + float(w.values[i]) * np.poly(np.delete(ps, i))
    roots = np.sort_complex(np.roots(poly))
    assert len(found) == m - 1 == abs(euler_characteristic(build_lattice(arr)))
    assert np.allclose(found, roots, atol=1e-8)


@pytest.mark.parametrize("arr,target", [(generic_lines(4), 3), (triangle_plus_parallel(), 2)],
                         ids=["g4", "triangle_parallel"])
def test_real_arrangements_one_point_per_chamber(arr, target):
    pts = find_critical_points(arr, ones(arr))
    assert len(pts) == target
    assert all(p.is_real and p.basin_tag for p in pts)
    assert len({p.basin_tag for p in pts}) == target


@pytest.mark.parametrize("make", [complex_lines, generic_planes], ids=["complex_lines", "generic_planes"])
def test_count_identity_beyond_chambers(make):
    arr = make()
    pts = find_critical_points(arr, ones(arr), SolverConfig(use_chambers=False, seed=1))
    assert len(pts) == abs(euler_characteristic(build_lattice(arr)))
    assert all(p.hessian_signature == (arr.n, arr.n) for p in pts)


@pytest.mark.parametrize("make", [central_triple, central_planes])
def test_central_vanishing_and_euler_bound(make):
    arr = make()
    w = Weights([1.0 + k for k in range(arr.m)])
    lat = build_lattice(arr)
    assert find_critical_points(arr, w, lat=lat) == []
    center = common_point(lat)
    rng = np.random.default_rng(0)
    for _ in range(100):
        z = random_point(arr, rng)
        bound = euler_residual_lower_bound(arr, w, z, center)
        assert bound > 0
        assert critical_equation_residual(arr, w, z) >= bound * (1 - 1e-12)


def test_certify_rejects_non_critical_point():
    arr = generic_lines(3)
    with pytest.raises(NotCritical):
        certify_morse(arr, ones(arr), np.array([0.3 + 0.1j, 0.7]))


def test_point_on_arrangement_rejected():
    with pytest.raises(PointOnArrangement):
        log_gradient(points([0, 1]), Weights(["1", "1"]), [0.0])


def test_budget_exhaustion_keeps_found_points():
    arr = generic_planes()
    cfg = SolverConfig(use_chambers=False, rounds=1, starts_per_missing=1, seed=3)
    try:
        pts = find_critical_points(arr, ones(arr), cfg)
    except BudgetExhausted as exc:
        assert exc.target == 3 and len(exc.found) < 3
        assert "possibly non-generic or budget too small" in str(exc)
    else:
        assert len(pts) == 3


def test_non_essential_input_rejected():
    arr = Arrangement.from_rows([[1, -1, 0], [0, 1, -1], [1, 0, -1]], [0, 0, 1])
    with pytest.raises(ValueError):
        find_critical_points(arr, ones(arr))
