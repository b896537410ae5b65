import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import brentq

from pcl import poncelet as pc

GAMMA = (2.0, 1.0)


def cayley_defect(lam, n, a1=2.0, a2=1.0):
    """Cayley's criterion for the table and the confocal caustic member(lam).

    With A(t) the Taylor series of sqrt(det(t C + D)), n = 3 closes when A2 = 0
    and n = 5 when A2 A4 - A3^2 = 0.
    """
    with mpmath.workdps(40):
        c = [1 / mpmath.mpf(a1) ** 2, 1 / mpmath.mpf(a2) ** 2, -1]
        d = [1 / (a1**2 + mpmath.mpf(lam)), 1 / (a2**2 + mpmath.mpf(lam)), -1]
        f = lambda t: mpmath.sqrt(-((t * c[0] + d[0]) * (t * c[1] + d[1]) * (t * c[2] + d[2])))
        A = mpmath.taylor(f, 0, 4)
        if n == 3:
            return float(A[2])
        if n == 5:
            return float(A[2] * A[4] - A[3] ** 2)
    raise ValueError(n)


@pytest.mark.parametrize("n", [3, 5])
def test_caustic_matches_cayley(n):
    lam_oracle = brentq(lambda l: cayley_defect(l, n), -0.999, -1e-3, xtol=1e-15)
    assert pc.find_caustic_for_n(GAMMA, n) == pytest.approx(lam_oracle, abs=1e-12)


@pytest.mark.parametrize("n", [3, 5, 7, 9])
def test_rotation_number_at_caustic(n):
    lam = pc.find_caustic_for_n(GAMMA, n)
    assert abs(pc.rotation_number(lam, GAMMA) - 1 / n) < 1e-10
    assert abs(pc.closure_error(lam, GAMMA, n, phi0=1.234)) < 1e-9


@given(st.floats(0.1, 0.9))
def test_circle_rotation_number(r):
    R = 1.0
    lam = r * r - R * R
    rho = pc.rotation_number(lam, (R, R), iterations=2000)
    assert rho == pytest.approx(math.acos(r / R) / math.pi, abs=1e-10)


@given(st.floats(-0.95, -0.05), st.floats(0, 2 * math.pi))
def test_caustic_step_matches_reflection(lam, phi):
    ray = pc.tangent_ray(GAMMA, lam, phi)
    out = pc.billiard_reflect(ray, GAMMA)
    assert pc.tangency_residual(out, GAMMA, lam) < 1e-9
    want = pc._tangent_line(pc.ConfocalFamily(*GAMMA), lam, float(pc.caustic_step(phi, lam, GAMMA)))
    u, v, w = out.line()
    got = np.array([u, v, w]) / -w
    assert np.allclose(got, want, atol=1e-9)


def test_family_and_errors():
    fam = pc.ConfocalFamily(2.0, 1.0)
    assert fam.focus == pytest.approx(math.sqrt(3))
    lo, hi = fam.lambdas_through(1.0, 0.5)
    assert abs(fam.poly_residual(lo, 1.0, 0.5)) < 1e-12 and abs(fam.poly_residual(hi, 1.0, 0.5)) < 1e-12
    assert lo < -1 < hi
    with pytest.raises(ValueError):
        pc.ConfocalFamily(1.0, 2.0)
    with pytest.raises(ValueError):
        pc.find_caustic_for_n(GAMMA, 4)
    with pytest.raises(ValueError):
        pc.poncelet_grid(GAMMA, 6, lam=-0.5)
    with pytest.raises(ValueError):
        pc.caustic_step(0.0, 0.5, GAMMA)


@pytest.mark.parametrize("n", [5, 7, 9])
def test_grid_report(n):
    grid = pc.poncelet_grid(GAMMA, n, phi0=0.3)
    rep = pc.grid_report(grid)
    assert len(rep["concentric"]) == (n + 1) // 2
    assert all(r["kind"] == "ellipse" for r in rep["concentric"][1:])
    assert all(r.get("kind", "hyperbola") == "hyperbola" for r in rep["radial"])
    assert rep["max_conic_residual"] < 1e-8
    assert rep["all_equivalent"]
    assert all(r["ivory_residual"] < 1e-8 for r in rep["equivalence"])


def test_grid_point_sets():
    grid = pc.poncelet_grid(GAMMA, 7)
    assert len(grid.points) == 28
    assert len(grid.P(2)) == 7
    assert sum(len(grid.Q(k)) for k in range(7)) == 28


def test_ivory():
    assert pc.ivory_check(-0.7, -0.2, GAMMA).max() < 1e-12


@given(st.floats(0, 2 * math.pi), st.floats(0.2, 2.0))
def test_reye_chasles(phi, gap):
    fam = pc.ConfocalFamily(*GAMMA)
    A = fam.point(0.0, phi)
    B = fam.point(0.0, phi + gap)
    try:
        r = pc.reye_chasles_check(GAMMA, A, B, -0.6)
    except ValueError:
        return  # arcs do not overlap: no convex quadrilateral
    assert r["hyperbola_residual"] < 1e-9
    assert r["pitot_residual"] < 1e-9
    assert r["incircle_residual"] < 1e-9


def test_common_tangents():
    lines, res = pc.confocal_common_tangents(GAMMA, -0.5, 0.3, -0.1)
    assert len(lines) == 4
    # the common tangents are the isotropic lines through the foci, so they
    # touch every member of the family
    assert res < 1e-12
    for u, v, w in lines:
        assert abs(u * u + v * v) < 1e-12


def test_reye_chasles_rejects_disjoint_arcs():
    fam = pc.ConfocalFamily(*GAMMA)
    with pytest.raises(ValueError):
        pc.reye_chasles_check(GAMMA, fam.point(0.0, 0.0), fam.point(0.0, 2.5), -0.6)


@given(st.floats(0, 2 * math.pi), st.floats(0.2, 1.5))
def test_commutation(phi, mu):
    assert pc.commutation_residual(phi, -0.6, pc.ConfocalFamily(*GAMMA), mu) < 1e-9


def test_shift_constancy():
    fam = pc.ConfocalFamily(*GAMMA)
    coord = pc.canonical_coordinate(-0.6, fam)
    assert pc.shift_constancy(coord, fam, -0.6) < 1e-6
    other = fam.rebased(0.8)
    assert pc.shift_constancy(coord, other, -0.6 - 0.8) < 1e-6


@pytest.mark.parametrize("n", [5, 7])
def test_polygon_shift(n):
    assert pc.polygon_shift_residual(GAMMA, n) < 1e-6


def test_to_confocal_roundtrip():
    fam = pc.ConfocalFamily(3.0, 2.0)
    lam = -2.5
    outer = np.diag([1 / 9, 1 / 4, -1.0])
    inner = np.diag([1 / (9 + lam), 1 / (4 + lam), -1.0])
    # disguise the pair with a projective map
    H = np.array([[1.0, 0.2, 0.1], [0.1, 1.3, -0.2], [0.05, 0.02, 1.0]])
    Hi = np.linalg.inv(H)
    col, fam2, lam2 = pc.to_confocal(Hi.T @ outer @ Hi, Hi.T @ inner @ Hi)
    # the normal form is unique up to scale of the family
    s = fam2.a1 / fam.a1
    assert fam2.a2 == pytest.approx(s * fam.a2, rel=1e-9)
    assert lam2 == pytest.approx(lam * s * s, rel=1e-9)
