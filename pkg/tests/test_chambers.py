import numpy as np
import pytest

from arrmorse.chambers import bounded_chambers
from arrmorse.lattice import build_lattice, euler_characteristic

from catalog import complex_lines, generic_lines, points, triangle_plus_parallel


@pytest.mark.parametrize("arr", [generic_lines(3), generic_lines(4), generic_lines(5), generic_lines(6),
                                 points([0, 1, 3, -2]), triangle_plus_parallel()],
                         ids=["g3", "g4", "g5", "g6", "four_points", "triangle_parallel"])
def test_bounded_chamber_count_is_abs_chi(arr):
    chambers = bounded_chambers(arr)
    assert len(chambers) == abs(euler_characteristic(build_lattice(arr)))
    assert len({c.signs for c in chambers}) == len(chambers)
    A, c = arr.A.real, arr.c.real
    for ch in chambers:
        vals = A @ ch.center + c
        assert np.all(np.sign(vals) == np.array(ch.signs))
        assert ch.radius > 0


def test_sampling_oracle_for_four_lines():
    # every sign vector seen on a dense random cloud inside the vertex hull belongs to a chamber found
    arr = generic_lines(4)
    A, c = arr.A.real, arr.c.real
    found = {ch.signs for ch in bounded_chambers(arr)}
    rng = np.random.default_rng(1)
    verts = np.array([f.point.real for f in build_lattice(arr).vertices()])
    lo, hi = verts.min(axis=0), verts.max(axis=0)
    cloud = rng.uniform(lo, hi, size=(20000, 2))
    seen = {tuple(int(s) for s in np.sign(A @ x + c)) for x in cloud}
    bounded_seen = {s for s in seen if s in found}
    assert bounded_seen == found


def test_complex_data_rejected():
    with pytest.raises(ValueError):
        bounded_chambers(complex_lines())
