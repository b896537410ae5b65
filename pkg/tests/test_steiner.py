from fractions import Fraction as F

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from pcl import geom, steiner as stn
from pcl.geom import Line, Point
from pcl.steiner import IDENTITY, S3, SIGMA, TAU, compose, parity, permute


def _setup(seed):
    rng = np.random.default_rng(seed)
    O = Point(*(int(v) for v in rng.integers(-30, 31, size=2)), 1)
    a, b = stn.random_line_through(O, rng), stn.random_line_through(O, rng)
    return rng, O, a, b, stn.random_triple_on(a, rng, avoid=(O,)), stn.random_triple_on(b, rng, avoid=(O,))


def _sym_pappus(A, B):
    """Pappus line recomputed with sympy cross products."""
    v = lambda p: sympy.Matrix([sympy.Rational(x) for x in p.coords])
    A, B = [v(p) for p in A], [v(p) for p in B]
    J = lambda p, q: p.cross(q)
    cs = [J(J(A[i], B[j]), J(A[j], B[i])) for i, j in ((1, 2), (0, 2), (0, 1))]
    assert sympy.Matrix.hstack(*cs).det() == 0
    return J(cs[0], cs[1])


def test_permutation_conventions():
    assert permute(SIGMA, ("a", "b", "c")) == ("c", "a", "b")
    assert permute(TAU, ("a", "b", "c")) == ("b", "a", "c")
    assert sorted(parity(s) for s in S3) == [0, 0, 0, 1, 1, 1]
    assert compose(SIGMA, compose(SIGMA, SIGMA)) == IDENTITY


@given(st.integers(0, 2**32))
def test_pappus_line_matches_sympy(seed):
    _, _, _, _, A, B = _setup(seed)
    try:
        l = stn.pappus_line(A, B)
    except stn.DegenerateInput:
        return
    assert geom.proportional(tuple(l), tuple(int(x) for x in _sym_pappus(A, B)))


@given(st.integers(0, 2**32))
def test_pappus_line_relabel_symmetry(seed):
    _, _, _, _, A, B = _setup(seed)
    try:
        l = stn.pappus_line(A, B)
    except stn.DegenerateInput:
        return
    for s in S3:
        assert stn.pappus_line(permute(s, A), permute(s, B)) == l


def test_same_line_degenerate():
    A = (Point(0, 0, 1), Point(1, 0, 1), Point(2, 0, 1))
    B = (Point(3, 0, 1), Point(5, 0, 1), Point(7, 0, 1))
    with pytest.raises(stn.DegenerateInput):
        stn.pappus_line(A, B)


def test_dual_pappus_point_concurrent_output():
    _, _, _, _, A, B = _setup(3)
    dual = lambda T: tuple(Line(p.coords) for p in T)
    P = stn.dual_pappus_point(dual(A), dual(B))
    assert isinstance(P, Point)
    assert tuple(P.coords) == tuple(stn.pappus_line(A, B).coords)


@given(st.integers(0, 2**32))
def test_steiner_and_rigby(seed):
    _, O, a, b, A, B = _setup(seed)
    try:
        phi, psi = stn.steiner_lines(A, B)
        pts = stn.rigby_points(A, B)
    except stn.DegenerateInput:
        return
    assert geom.det_residual(*phi) == 0 and geom.det_residual(*psi) == 0
    for s, p in pts.items():
        assert geom.incident(p, a if parity(s) == 0 else b)


def test_rigby_independence_of_b():
    rng, O, a, b, A, B = _setup(11)
    even = {s: p for s, p in stn.rigby_points(A, B).items() if parity(s) == 0}
    b2 = stn.random_line_through(O, rng)
    B2 = stn.random_triple_on(b2, rng, avoid=(O,))
    even2 = {s: p for s, p in stn.rigby_points(A, B2).items() if parity(s) == 0}
    assert set(even.values()) == set(even2.values())


def test_steiner_map_independent_of_b_and_labels():
    rng, O, a, b, A, B = _setup(5)
    out1 = stn.steiner_map(A, O, rng=np.random.default_rng(1))
    out2 = stn.steiner_map(A, O, rng=np.random.default_rng(2))
    assert out1 == out2
    for s in S3:
        assert set(stn.steiner_map(permute(s, A), O, rng=rng)) == set(out1)
    assert all(geom.incident(p, a) for p in out1)


def test_steiner_map_bad_origin():
    _, O, a, b, A, B = _setup(5)
    with pytest.raises(stn.DegenerateInput):
        stn.steiner_map(A, A[0])
    with pytest.raises(stn.DegenerateInput):
        stn.steiner_map(A, B[0])


@pytest.mark.parametrize("tid", list(stn.STEINER_THEOREMS))
def test_theorem_drivers(tid):
    rep = stn.run_steiner_theorem(tid, trials=5, seed=2)
    assert rep.ok and rep.trials_completed == 5


# -- cubics and the normal form --------------------------------------------


def test_vieta_example():
    assert stn.cubic_from_roots([1, 2, 3]) == (1, -6, 11, -6)


def test_triple_to_cubic_matches_sympy():
    O, E = (0, 0, 1), (1, 0, 0)
    T = [Point(F(1), 0, 1), Point(F(-2, 3), 0, 1), Point(5, 0, 1)]
    c = stn.triple_to_cubic(T, (O, E))
    z = sympy.symbols("z")
    want = sympy.Poly(sympy.expand((z - 1) * (z + sympy.Rational(2, 3)) * (z - 5)), z).all_coeffs()
    ratio = [F(str(w)) / x for w, x in zip(want, c)]
    assert len(set(ratio)) == 1


def test_twisted_cubic_point():
    c = stn.cubic_from_roots([2, 2, 2])
    assert stn.hessian(c) == (0, 0, 0)
    assert stn.secant_coordinate(c).x == 0


def test_zero_root_has_coordinate_minus_one():
    c = stn.cubic_from_roots([0, 2, F(-1, 3)])
    sc = stn.secant_coordinate(c)
    assert abs(sc.x + 1) < 1e-12


def test_swapping_roots_inverts_coordinate():
    c = (1, F(-3, 2), F(7, 5), 4)
    sc = stn.secant_coordinate(c)
    other = stn.secant_coordinate(c, pq=(sc.q, sc.p))
    assert abs(other.x * sc.x - 1) < 1e-12
    assert abs(sc.swapped().x - other.x) < 1e-12


def test_coincident_hessian_roots():
    # f = z^2 (z - 3 w) sits on the tangent variety: its Hessian is a square
    with pytest.raises(stn.CoincidentHessianRoots):
        stn.hessian_roots(stn.cubic_from_roots([0, 0, 3]))


def test_square_law_samples_small():
    for s in stn.square_law_samples(4, seed=1):
        assert s["residual"] <= 1e-9 and s["secant_preserved"]


def test_doubling_samples_small():
    for d in stn.doubling_samples(6, seed=1):
        assert d["residual"] <= 1e-9
        assert d["modulus_defect"] <= 1e-9
