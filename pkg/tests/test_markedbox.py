from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pcl import geom, markedbox as mb
from pcl.geom import Point
from pcl.markedbox import BoxCoords, op_i, op_tau1, op_tau2

fracs = st.builds(lambda d, k: F(k % (d - 1) + 1, d), st.integers(2, 60), st.integers(0, 10**6))


def boxes(draw_seed):
    return mb.random_convex_box(np.random.default_rng(draw_seed))


def test_unit_square_midpoints():
    box = mb.make_box(*mb.UNIT_FRAME, Point(F(1, 2), 1, 1), Point(F(1, 2), 0, 1))
    assert mb.box_coords(box) == BoxCoords(F(1, 2), F(1, 2))


def test_not_convex_and_not_incident():
    A1, A3, B3, B1 = mb.UNIT_FRAME
    with pytest.raises(mb.NotConvex):
        mb.make_box(A1, A3, B3, B1, Point(2, 1, 1), Point(F(1, 2), 0, 1))
    with pytest.raises(mb.NotIncident):
        mb.make_box(A1, A3, B3, B1, Point(F(1, 2), 2, 1), Point(F(1, 2), 0, 1))


def test_coords_roundtrip_and_tau1_action():
    box = mb.box_from_coords(F(1, 3), F(1, 4))
    assert mb.box_coords(box) == BoxCoords(F(1, 3), F(1, 4))
    assert mb.box_coords(op_tau1(box)) == BoxCoords(F(1, 4), F(2, 3))


def test_canonical_representative():
    assert BoxCoords.canonical(F(3, 4), F(1, 3)) == BoxCoords(F(1, 4), F(2, 3))
    assert BoxCoords.canonical(F(1, 2), F(3, 4)) == BoxCoords(F(1, 2), F(1, 4))


@given(st.integers(0, 2**32))
def test_lemma_relations(seed):
    box = boxes(seed)
    assert box.is_convex()
    assert op_i(op_i(box)) == box
    assert op_tau1(op_i(op_tau2(box))) == op_i(box)
    assert op_tau2(op_i(op_tau1(box))) == op_i(box)
    assert op_tau1(op_i(op_tau1(box))) == op_tau2(box)
    assert op_tau2(op_i(op_tau2(box))) == op_tau1(box)


@given(st.integers(0, 2**32))
def test_tau1_inverse(seed):
    box = boxes(seed)
    assert op_i(op_tau2(op_i(op_tau1(box)))) == box


@given(fracs, fracs)
def test_coordinate_action(x, y):
    box = mb.box_from_coords(x, y)
    want = BoxCoords.canonical(1 - y, x)
    for op in (op_i, op_tau1, op_tau2):
        assert mb.box_coords(op(box)) == want


@given(st.integers(0, 2**32))
def test_operations_preserve_convexity(seed):
    box = boxes(seed)
    for op in (op_i, op_tau1, op_tau2):
        assert op(box).is_convex()


@given(st.integers(0, 2**32))
def test_order3_symmetry(seed):
    box = boxes(seed)
    M = mb.order3_symmetry(box)
    assert M.power(3).is_scalar()
    assert not M.is_scalar()
    assert op_i(box).map(M) == op_tau1(box)
    assert op_tau1(box).map(M) == op_tau2(box)


def test_order3_symmetric_box():
    M = mb.order3_symmetry(mb.box_from_coords(F(1, 2), F(1, 2)))
    assert M.power(3).is_scalar()


@given(st.integers(0, 2**32))
def test_duality_symmetry(seed):
    box = boxes(seed)
    C = mb.duality_symmetry(box)
    assert C.target_space == "dual"
    dual = mb.dual_box(box)
    src = op_i(box)
    imgs = [C(p) for p in src.points()]
    assert tuple(imgs) == dual.points() or tuple(imgs) == dual.flipped().points()


def test_dual_box_incidences():
    box = mb.box_from_coords(F(1, 3), F(2, 5))
    d = mb.dual_box(box)
    # in the dual plane A2 (line a) passes through the meet of its two top lines
    assert geom.incident(geom.meet(d.A1, d.A3), d.A2)
    assert geom.incident(geom.meet(d.B1, d.B3), d.B2)
    assert d.is_convex()


def test_orbit_sizes_and_addresses():
    nodes = mb.orbit_to_depth(mb.box_from_coords(F(1, 3), F(1, 4)), 3)
    assert len(nodes) == 2 * (2**4 - 1)
    assert len({n.address for n in nodes}) == len(nodes)
    with pytest.raises(mb.DepthTooLarge):
        mb.orbit_to_depth(mb.box_from_coords(F(1, 3), F(1, 4)), 21)


def test_curve_points_depth0():
    box = mb.box_from_coords(F(1, 3), F(1, 4))
    pts = mb.curve_points(box, 0)
    assert len(pts) == 2
    assert box.A2 in pts


def test_symmetric_curve_is_a_line():
    pts = mb.curve_points(mb.box_from_coords(F(1, 2), F(1, 2)), 6)
    assert len(pts) == 2**7
    for p in pts[2:]:
        assert geom.collinear(pts[0], pts[1], p)


def test_generic_curve_is_not_a_line():
    pts = mb.curve_points(mb.box_from_coords(F(3, 10), F(1, 5)), 3)
    assert any(not geom.collinear(pts[0], pts[1], p) for p in pts[2:])


def test_curve_array_matches_exact():
    box = mb.box_from_coords(F(3, 10), F(1, 5))
    exact = mb.curve_points(box, 4)
    arr = mb.curve_array(box, 4)
    for p, v in zip(exact, arr):
        assert geom.proportional(tuple(float(x) for x in p.coords), tuple(v))


def test_order3_maps_subarcs():
    box = mb.box_from_coords(F(3, 10), F(1, 5))
    M = mb.order3_symmetry(box)
    a = mb.curve_points(op_i(box), 2)
    b = mb.curve_points(op_tau1(box), 2)
    assert {M(p) for p in a} == set(b)


# -- box dimension ---------------------------------------------------------


def _brute_counts(pts, scales):
    import math
    lo, hi = pts.min(axis=0).tolist(), pts.max(axis=0).tolist()
    out = []
    for s in scales:
        n = [max(math.ceil((h - l) / s * (1 - 1e-9)), 1) for l, h in zip(lo, hi)]
        cells = {tuple(min(int((v - l) // s), k - 1) for v, l, k in zip(p, lo, n)) for p in pts.tolist()}
        out.append(len(cells))
    return out


def test_box_counts_match_bruteforce(rng):
    pts = np.vstack([rng.random((3000, 2)), [[0, 0], [1, 1]]])
    scales = [0.5, 0.1, 0.03, 0.25]
    assert mb.box_counts(pts, scales) == _brute_counts(pts, scales)


def test_dimension_segment():
    t = np.linspace(0, 1, 20000)
    est = mb.box_dimension(np.column_stack([t, 0.3 * t]))
    assert abs(est.dimension - 1.0) <= 0.05


def test_dimension_square_grid():
    g = np.linspace(0, 1, 200)
    X, Y = np.meshgrid(g, g)
    est = mb.box_dimension(np.column_stack([X.ravel(), Y.ravel()]), [2.0**-k for k in range(1, 7)])
    assert abs(est.dimension - 2.0) <= 0.1


def test_dimension_errors():
    with pytest.raises(mb.TooFewPoints):
        mb.box_dimension(np.zeros((10, 2)))
    with pytest.raises(mb.DegenerateScaleRange):
        mb.box_dimension(np.random.default_rng(0).random((2000, 2)), [0.1])


def test_symmetric_curve_dimension_is_one():
    est = mb.pappus_dimension(F(1, 2), F(1, 2), depth=10)
    assert abs(est.dimension - 1.0) <= 0.05


def test_transversality_counts():
    counts = mb.transversality_check(mb.box_from_coords(F(3, 10), F(1, 5)))
    assert counts and all(c == 1 for c in counts)
