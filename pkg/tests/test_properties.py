import math
from fractions import Fraction

import numpy as np
from hypothesis import assume, given, settings, strategies as st

from arrmorse.arrangement import Arrangement, Weights
from arrmorse.errors import ArrangementError
from arrmorse.flows import weight_rank
from arrmorse.lattice import build_lattice, essentialize, euler_characteristic
from arrmorse.master import log_gradient
from arrmorse.os_aomoto import aomoto_cohomology, build_os_algebra

from oracles import deletion_restriction_chi, exact_rows, whitney_oracle

small_int = st.integers(-3, 3)
line = st.tuples(small_int, small_int, small_int)


def _lines(raw):
    try:
        return Arrangement.from_rows([[a, b] for a, b, _ in raw], [c for _, _, c in raw])
    except ArrangementError:
        return None


@settings(max_examples=40, deadline=None)
@given(st.lists(line, min_size=1, max_size=5))
def test_lattice_agrees_with_whitney_on_random_lines(raw):
    arr = _lines(raw)
    assume(arr is not None)
    lat = build_lattice(arr)
    assert {f.generators: f.moebius for f in lat.flats} == whitney_oracle(arr)
    assert euler_characteristic(lat) == deletion_restriction_chi(exact_rows(arr), 2)


@settings(max_examples=40, deadline=None)
@given(st.lists(line, min_size=1, max_size=5))
def test_essentialization_preserves_chi(raw):
    arr = _lines(raw)
    assume(arr is not None)
    chi = euler_characteristic(build_lattice(arr))
    assert euler_characteristic(build_lattice(essentialize(arr).arrangement)) == chi


@settings(max_examples=30, deadline=None)
@given(st.lists(line, min_size=2, max_size=5), st.lists(st.integers(-4, 4), min_size=5, max_size=5))
def test_aomoto_euler_characteristic_is_weight_independent(raw, a):
    arr = _lines(raw)
    assume(arr is not None)
    lat = build_lattice(arr)
    cx = aomoto_cohomology(build_os_algebra(arr, lat), a[: arr.m])
    assert cx.euler() == euler_characteristic(lat)


@given(st.lists(st.fractions(min_value=Fraction(1, 12), max_value=12, max_denominator=12), min_size=1, max_size=6))
def test_rational_weights_have_rank_one(values):
    wr = weight_rank(Weights(values))
    assert wr.rank == 1
    # every weight is an integer multiple of period / 2 pi
    g = wr.period / (2 * math.pi)
    for v in values:
        assert abs(float(v) / g - round(float(v) / g)) < 1e-9


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 10), st.floats(-3, 3), st.floats(-3, 3))
def test_log_gradient_is_homogeneous_of_degree_minus_one(mu, x, y):
    arr = Arrangement.from_rows([[1, 0], [0, 1], [1, 1]], [0, 0, 0])
    z = np.array([x + 1j * y, y - 0.5j * x])
    assume(arr.distance_to_union(z) > 1e-3)
    w = Weights(["1", "2", "3"])
    assert np.allclose(log_gradient(arr, w, mu * z).value, log_gradient(arr, w, z).value / mu, rtol=1e-10)
