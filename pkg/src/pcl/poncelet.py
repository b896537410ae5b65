"""Billiards in confocal ellipses, Poncelet polygons and the Poncelet grid.

Everything here is floating point.  A caustic is the member
x^2/(a1^2+lam) + y^2/(a2^2+lam) = 1 of the confocal family with
-a2^2 < lam < 0, and a point on it is parametrized by phi as
(A cos phi, B sin phi).  The forward tangent ray at phi goes in the
counterclockwise direction (-A sin phi, B cos phi).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import geom
from .geom import Point, find_equivalence

TWO_PI = 2.0 * math.pi


class NoIntersection(ValueError):
    pass


class TangentRay(ValueError):
    pass


class NotBracketed(ValueError):
    pass


class PointInsideInner(ValueError):
    pass


class ResonantCaustic(ValueError):
    pass


@dataclass(frozen=True)
class ConfocalFamily:
    """Conics x^2/(a1^2+lam) + y^2/(a2^2+lam) = 1; lam = 0 is the table."""

    a1: float
    a2: float

    def __post_init__(self):
        if not (self.a1 >= self.a2 > 0):
            raise ValueError("need a1 >= a2 > 0")

    def axes(self, lam: float):
        p, q = self.a1**2 + lam, self.a2**2 + lam
        if q <= 0:
            raise ValueError(f"lam={lam} is not an ellipse of the family")
        return math.sqrt(p), math.sqrt(q)

    def value(self, lam, x, y):
        """x^2/(a1^2+lam) + y^2/(a2^2+lam) - 1."""
        return x * x / (self.a1**2 + lam) + y * y / (self.a2**2 + lam) - 1.0

    def poly_residual(self, lam, x, y):
        """Cleared-denominator membership residual, fine on degenerate members."""
        p, q = self.a1**2 + lam, self.a2**2 + lam
        return (x * x * q + y * y * p - p * q) / max(self.a1**4, 1.0)

    def rebased(self, mu: float) -> "ConfocalFamily":
        """Same family with member(mu) as the table (lam shifts by -mu)."""
        return ConfocalFamily(*self.axes(mu))

    @property
    def focus(self) -> float:
        return math.sqrt(self.a1**2 - self.a2**2)

    def lambdas_through(self, x, y):
        """(hyperbola lam, ellipse lam) of the two members through (x, y)."""
        s1, s2 = self.a1**2, self.a2**2
        b = s1 + s2 - x * x - y * y
        c = s1 * s2 - x * x * s2 - y * y * s1
        disc = math.sqrt(max(b * b - 4 * c, 0.0))
        lo, hi = (-b - disc) / 2, (-b + disc) / 2
        # stable smaller root
        if b > 0:
            lo = -(b + disc) / 2
            hi = c / lo if lo != 0 else hi
        return lo, hi

    def point(self, lam, phi):
        A, B = self.axes(lam)
        return np.array([A * np.cos(phi), B * np.sin(phi)])


def _family(gamma) -> ConfocalFamily:
    return gamma if isinstance(gamma, ConfocalFamily) else ConfocalFamily(*gamma)


# -- billiard on rays ------------------------------------------------------


@dataclass(frozen=True)
class Ray:
    point: tuple
    direction: tuple

    @staticmethod
    def make(point, direction) -> "Ray":
        d = np.asarray(direction, dtype=float)
        nd = np.hypot(*d)
        if nd == 0:
            raise ValueError("zero direction")
        return Ray(tuple(map(float, point)), tuple(d / nd))

    def line(self):
        """(u, v, w) with u x + v y + w = 0 and (u, v) a unit normal."""
        (x, y), (dx, dy) = self.point, self.direction
        u, v = -dy, dx
        return u, v, -(u * x + v * y)


def billiard_reflect(ray: Ray, gamma, lam: float = 0.0, eps: float = 1e-12) -> Ray:
    """Reflect ``ray`` at its forward (exit) point on member(lam)."""
    fam = _family(gamma)
    g1, g2 = fam.axes(lam)
    (x, y), (dx, dy) = ray.point, ray.direction
    a = dx * dx / g1**2 + dy * dy / g2**2
    b = 2 * (x * dx / g1**2 + y * dy / g2**2)
    c = x * x / g1**2 + y * y / g2**2 - 1
    disc = b * b - 4 * a * c
    if disc < -eps:
        raise NoIntersection("ray misses the ellipse")
    if abs(disc) <= eps:
        raise TangentRay("ray is tangent to the ellipse")
    t = (-b + math.sqrt(disc)) / (2 * a)
    if t <= eps:
        raise NoIntersection("ellipse is behind the ray")
    X = np.array([x + t * dx, y + t * dy])
    n = np.array([X[0] / g1**2, X[1] / g2**2])
    n /= np.hypot(*n)
    d = np.array([dx, dy])
    return Ray.make(X, d - 2 * np.dot(d, n) * n)


def tangency_residual(ray: Ray, gamma, lam: float) -> float:
    """p u^2 + q v^2 - w^2 for the unit-normal line of the ray (0 iff tangent)."""
    fam = _family(gamma)
    u, v, w = ray.line()
    return abs((fam.a1**2 + lam) * u * u + (fam.a2**2 + lam) * v * v - w * w)


def tangent_ray(gamma, lam: float, phi: float) -> Ray:
    fam = _family(gamma)
    A, B = fam.axes(lam)
    return Ray.make((A * math.cos(phi), B * math.sin(phi)), (-A * math.sin(phi), B * math.cos(phi)))


# -- the circle map on a caustic ---------------------------------------------


def _forward_t(phi, A, B, g1, g2):
    """Ray parameter at which the forward tangent at phi leaves the table."""
    c, s = np.cos(phi), np.sin(phi)
    # X(t) = (A(c - t s), B(s + t c))
    p0 = A * c / g1, B * s / g2
    p1 = -A * s / g1, B * c / g2
    qa = p1[0] ** 2 + p1[1] ** 2
    qb = 2 * (p0[0] * p1[0] + p0[1] * p1[1])
    qc = p0[0] ** 2 + p0[1] ** 2 - 1
    return (-qb + np.sqrt(qb * qb - 4 * qa * qc)) / (2 * qa)


def caustic_step(phi, lam: float, gamma):
    """Next tangency parameter after one reflection in the table of ``gamma``.

    In the caustic's scaled coordinates the exit point has polar angle
    phi + atan t, and the second tangent from it touches at phi + 2 atan t.
    Works elementwise on arrays.
    """
    fam = _family(gamma)
    if not (-fam.a2**2 < lam < 0):
        raise ValueError("caustic must be a confocal ellipse inside the table")
    A, B = fam.axes(lam)
    t = _forward_t(phi, A, B, fam.a1, fam.a2)
    return phi + 2 * np.arctan(t)


def orbit(phi0: float, lam: float, gamma, steps: int) -> np.ndarray:
    """Lifted orbit phi_0, ..., phi_steps (monotone increasing)."""
    fam = _family(gamma)
    A, B = fam.axes(lam)
    out = np.empty(steps + 1)
    out[0] = phi = float(phi0)
    for k in range(1, steps + 1):
        t = _forward_t(phi, A, B, fam.a1, fam.a2)
        phi = phi + 2 * math.atan(t)
        out[k] = phi
    return out


def _bump_weights(N: int) -> np.ndarray:
    t = (np.arange(1, N + 1)) / (N + 1)
    w = np.exp(-1.0 / (t * (1 - t)))
    return w / w.sum()


def rotation_number(lam: float, gamma, iterations: int = 20000, phi0: float = 0.0) -> float:
    """Weighted Birkhoff average of the displacement, divided by 2 pi.

    The smooth bump weights make the average converge faster than any power
    of 1/N on a smooth invariant circle, so plain extrapolation is not needed.
    """
    if iterations < 2:
        raise ValueError("need at least two iterations")
    phis = orbit(phi0, lam, gamma, iterations)
    disp = np.diff(phis)
    return float(np.dot(_bump_weights(iterations), disp) / TWO_PI)


def closure_error(lam: float, gamma, n: int, phi0: float = 0.0) -> float:
    """Lifted n-step displacement minus one full turn, in radians."""
    phis = orbit(phi0, lam, gamma, n)
    return float(phis[-1] - phis[0] - TWO_PI)


def lambda_range(gamma, margin: float = 1e-9):
    fam = _family(gamma)
    s = fam.a2**2
    return -s * (1 - margin), -s * margin


def find_caustic_for_n(gamma, n: int, xtol: float = 1e-15) -> float:
    """Caustic lam on which every billiard orbit is n-periodic (one turn).

    The root of the n-step closure defect is located by Brent's method; at
    that lam the rotation number is exactly 1/n.
    """
    if n < 3 or n % 2 == 0:
        raise ValueError("n must be odd and at least 3")
    lo, hi = lambda_range(gamma)
    flo, fhi = closure_error(lo, gamma, n), closure_error(hi, gamma, n)
    if flo * fhi > 0:
        raise NotBracketed(f"rotation number 1/{n} not reached for this table")
    return brentq(lambda l: closure_error(l, gamma, n), lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)


# -- Poncelet grid ---------------------------------------------------------


def _tangent_line(fam: ConfocalFamily, lam: float, phi: float):
    A, B = fam.axes(lam)
    # x cos(phi)/A + y sin(phi)/B = 1
    return np.array([math.cos(phi) / A, math.sin(phi) / B, -1.0])


def _meet(l1, l2):
    p = np.cross(l1, l2)
    return p[:2] / p[2]


@dataclass
class PonceletGrid:
    family: ConfocalFamily
    lam: float
    n: int
    phis: np.ndarray  # tangency parameters, increasing
    points: dict = field(default_factory=dict)  # (i, j) with i <= j -> xy

    def P(self, k: int):
        """Concentric set i - j = +-k (mod n), ordered by i."""
        n = self.n
        return [self.point(i, (i + k) % n) for i in range(n)]

    def Q(self, k: int):
        """Radial set i + j = k (mod n)."""
        n = self.n
        out = []
        for i in range(n):
            j = (k - i) % n
            if i <= j:
                out.append(self.point(i, j))
        return out

    def point(self, i, j):
        return self.points[(min(i, j), max(i, j))]

    @property
    def concentric_count(self) -> int:
        return (self.n + 1) // 2


def poncelet_grid(gamma, n: int, phi0: float = 0.0, lam: float | None = None) -> PonceletGrid:
    if n % 2 == 0:
        raise ValueError("the grid is only set up for odd n")
    fam = _family(gamma)
    if lam is None:
        lam = find_caustic_for_n(fam, n)
    phis = orbit(phi0, lam, fam, n - 1)
    lines = [_tangent_line(fam, lam, p) for p in phis]
    pts = {}
    for i in range(n):
        pts[(i, i)] = fam.point(lam, phis[i])
        for j in range(i + 1, n):
            pts[(i, j)] = _meet(lines[i], lines[j])
    return PonceletGrid(fam, lam, n, phis, pts)


def _fit_conic(pts):
    """Normalized conic through the first five points plus residuals of all.

    The points are scaled to unit homogeneous vectors first, since grid
    points far from the caustic otherwise swamp the least-squares fit.
    """
    V = np.array([[x, y, 1.0] for x, y in pts])
    V /= np.linalg.norm(V, axis=1)[:, None]
    mono = lambda v: [v[0] ** 2, v[0] * v[1], v[1] ** 2, v[0] * v[2], v[1] * v[2], v[2] ** 2]
    rows = np.array([mono(v) for v in V[:5]])
    a, b, c, d, e, f = np.linalg.svd(rows)[2][-1]
    m = np.array([[2 * a, b, d], [b, 2 * c, e], [d, e, 2 * f]])
    m /= np.linalg.norm(m)
    res = np.abs(np.einsum("ij,jk,ik->i", V, m, V))
    return m, float(res.max())


def _conic_kind(m) -> str:
    """ellipse / hyperbola / parabola from the affine part."""
    d = m[0, 0] * m[1, 1] - m[0, 1] ** 2
    if abs(d) < 1e-12 * np.abs(m).max() ** 2:
        return "parabola"
    return "ellipse" if d > 0 else "hyperbola"


def _sort_by_angle(pts):
    return sorted(pts, key=lambda p: math.atan2(p[1], p[0]))


def _set_distance(a, b) -> float:
    """Max over a of the distance to the nearest point of b (equal sizes)."""
    A, B = np.asarray(a), np.asarray(b)
    d = np.linalg.norm(A[:, None, :] - B[None, :, :], axis=2)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def _diag_map(fam, lam_from, lam_to):
    p0, q0 = fam.a1**2 + lam_from, fam.a2**2 + lam_from
    p1, q1 = fam.a1**2 + lam_to, fam.a2**2 + lam_to
    return np.array([math.sqrt(p1 / p0), math.sqrt(abs(q1 / q0))])


def grid_report(grid: PonceletGrid, eq_eps: float = 1e-6) -> dict:
    """Residuals for the claims about the grid's concentric and radial sets."""
    fam, n = grid.family, grid.n
    rep = {"n": n, "lam": grid.lam, "concentric": [], "radial": [], "equivalence": []}
    lam_P = []
    for k in range(grid.concentric_count):
        pts = grid.P(k)
        m, fit = _fit_conic(pts)
        lh = fam.lambdas_through(*pts[0])[1]
        conf = max(abs(fam.poly_residual(lh, *p)) for p in pts)
        lam_P.append(lh)
        rep["concentric"].append({"k": k, "size": len(pts), "fit_residual": fit, "kind": _conic_kind(m),
                                  "confocal_lambda": lh, "confocal_residual": conf})
    lam_Q = []
    for k in range(n):
        pts = grid.Q(k)
        row = {"k": k, "size": len(pts)}
        if len(pts) >= 5:
            m, fit = _fit_conic(pts)
            row.update(fit_residual=fit, kind=_conic_kind(m))
        lh = fam.lambdas_through(*pts[0])[0]
        row.update(confocal_lambda=lh, confocal_residual=max(abs(fam.poly_residual(lh, *p)) for p in pts))
        lam_Q.append(lh)
        rep["radial"].append(row)
    # concentric sets: Ivory diagonal map plus an independent projective search
    for k in range(1, grid.concentric_count):
        for m_ in range(k + 1, grid.concentric_count):
            src, dst = np.array(grid.P(k)), np.array(grid.P(m_))
            img = src * _diag_map(fam, lam_P[k], lam_P[m_])
            ivory = min(_set_distance(img, dst), _set_distance(img, -dst))
            eq = find_equivalence([Point(x, y, 1.0) for x, y in _sort_by_angle(src)],
                                  [Point(x, y, 1.0) for x, y in _sort_by_angle(dst)],
                                  allow_dual=False, eps=eq_eps)
            rep["equivalence"].append({"sets": ["P", k, m_], "ivory_residual": ivory,
                                       "found": eq is not None, "residual": None if eq is None else eq.residual})
    # radial sets: match through the diagonal map between the hyperbolas
    if (n + 1) // 2 >= 4:
        for k in range(n):
            m_ = (k + 1) % n
            if min(abs(fam.a2**2 + lam_Q[k]), abs(fam.a2**2 + lam_Q[m_])) < 1e-9:
                continue  # a radial set on the major axis (symmetric polygon)
            src, dst = np.array(grid.Q(k)), np.array(grid.Q(m_))
            img = src * _diag_map(fam, lam_Q[k], lam_Q[m_])
            best, order = math.inf, None
            for sx in (1, -1):
                for sy in (1, -1):
                    cand = img * (sx, sy)
                    d = _set_distance(cand, dst)
                    if d < best:
                        best = d
                        order = [int(np.argmin(np.linalg.norm(dst - c, axis=1))) for c in cand]
            eq = None
            if len(set(order)) == len(order):
                eq = find_equivalence([Point(x, y, 1.0) for x, y in src],
                                      [Point(*dst[o], 1.0) for o in order],
                                      allow_dual=False, allow_cyclic_shift=False, allow_reflection=False, eps=eq_eps)
            rep["equivalence"].append({"sets": ["Q", k, m_], "ivory_residual": best,
                                       "found": eq is not None, "residual": None if eq is None else eq.residual})
    rep["max_conic_residual"] = max(
        [r["confocal_residual"] for r in rep["concentric"] + rep["radial"]]
        + [r["fit_residual"] for r in rep["concentric"] + rep["radial"] if "fit_residual" in r])
    found = [r for r in rep["equivalence"] if r["found"]]
    rep["all_equivalent"] = len(found) == len(rep["equivalence"])
    rep["max_equivalence_residual"] = max([r["residual"] for r in found], default=0.0)
    return rep


# -- classical checks ------------------------------------------------------


def ivory_check(lam_small: float, lam_big: float, gamma, samples: int = 50, rng=None) -> np.ndarray:
    """For P on member(lam_small), the hyperbola through P also contains A(P)."""
    fam = _family(gamma)
    rng = np.random.default_rng(0) if rng is None else rng
    A = _diag_map(fam, lam_small, lam_big)
    phis = rng.uniform(0, TWO_PI, samples)
    out = []
    for phi in phis:
        p = fam.point(lam_small, phi)
        lh = fam.lambdas_through(*p)[0]
        q = p * A
        out.append(abs(fam.poly_residual(lh, *q)))
    return np.array(out)


def _tangency_params(fam, lam, X):
    """Tangency parameters (phi-, phi+) of the two tangents from X."""
    A, B = fam.axes(lam)
    u = np.array([X[0] / A, X[1] / B])
    r = math.hypot(*u)
    if r <= 1.0:
        raise PointInsideInner("point is not outside the inner ellipse")
    a = math.atan2(u[1], u[0])
    d = math.acos(1.0 / r)
    return a - d, a + d


def _unwrap_near(x, ref):
    return ref + ((x - ref + math.pi) % TWO_PI - math.pi)


def reye_chasles_check(gamma, A_pt, B_pt, lam_inner: float) -> dict:
    """Quadrilateral from the tangents of A and B to an inner confocal ellipse.

    C is where A's later tangent meets B's earlier one, D where A's earlier
    tangent meets B's later one.  Reports the confocal-hyperbola residual of
    C and D, the signed side sum |AD|-|AC|+|BC|-|BD| and the miss distance
    of the fourth side from the circle tangent to the other three.  Raises
    ValueError when ACBD is not a convex quadrilateral.
    """
    fam = _family(gamma)
    A_pt, B_pt = np.asarray(A_pt, float), np.asarray(B_pt, float)
    if np.allclose(A_pt, B_pt):
        raise ValueError("A and B coincide")
    am, ap = _tangency_params(fam, lam_inner, A_pt)
    bm, bp = _tangency_params(fam, lam_inner, B_pt)
    bm, bp = _unwrap_near(bm, am), _unwrap_near(bp, ap)
    if bm < am:  # B comes first: swap roles
        A_pt, B_pt, am, ap, bm, bp = B_pt, A_pt, bm, bp, am, ap
    if bm >= ap or bp <= ap:
        raise ValueError("the caustic arcs seen from A and B do not overlap")
    if bp - am >= math.pi:
        raise ValueError("outer tangents of A and B meet through infinity; ACBD is not convex")
    L = {k: _tangent_line(fam, lam_inner, v) for k, v in (("am", am), ("ap", ap), ("bm", bm), ("bp", bp))}
    C = _meet(L["ap"], L["bm"])
    D = _meet(L["am"], L["bp"])
    lh = fam.lambdas_through(*C)[0]
    hyp = max(abs(fam.poly_residual(lh, *C)), abs(fam.poly_residual(lh, *D)))
    dist = lambda p, q: float(np.linalg.norm(p - q))
    pitot = dist(A_pt, D) - dist(A_pt, C) + dist(B_pt, C) - dist(B_pt, D)
    # circle tangent to three sides, then distance to the fourth
    centroid = (A_pt + B_pt + C + D) / 4
    sides = []
    for key in ("ap", "bm", "am", "bp"):
        l = L[key] / np.hypot(*L[key][:2])
        if l[:2] @ centroid + l[2] < 0:
            l = -l
        sides.append(l)
    M = np.array([[s[0], s[1], -1.0] for s in sides[:3]])
    rhs = np.array([-s[2] for s in sides[:3]])
    cx, cy, r = np.linalg.solve(M, rhs)
    s4 = sides[3]
    incircle = abs(s4[0] * cx + s4[1] * cy + s4[2] - r)
    return {"A": A_pt, "B": B_pt, "C": C, "D": D, "hyperbola_residual": hyp,
            "pitot_residual": abs(pitot), "incircle_residual": float(incircle),
            "center": (float(cx), float(cy)), "radius": float(r)}


def confocal_common_tangents(gamma, lam1: float, lam2: float, lam3: float):
    """Common tangents of member(lam1), member(lam2) tested against member(lam3).

    A line u x + v y = w is tangent to member(lam) iff
    (a1^2+lam) u^2 + (a2^2+lam) v^2 = w^2.  With w = 1 two members give a
    linear system in (u^2, v^2), whose four square-root choices are the
    common tangents.  Returns (lines, max residual on member(lam3)).
    """
    fam = _family(gamma)
    if lam1 == lam2:
        raise ValueError("need two distinct members")
    M = np.array([[fam.a1**2 + lam1, fam.a2**2 + lam1], [fam.a1**2 + lam2, fam.a2**2 + lam2]], dtype=complex)
    s, t = np.linalg.solve(M, np.ones(2, dtype=complex))
    su, sv = np.sqrt(s), np.sqrt(t)
    lines = [(eu * su, ev * sv, 1.0 + 0j) for eu in (1, -1) for ev in (1, -1)]
    p3, q3 = fam.a1**2 + lam3, fam.a2**2 + lam3
    res = max(abs(p3 * u * u + q3 * v * v - w * w) / max(abs(u), abs(v), 1.0) ** 2 for u, v, w in lines)
    return lines, float(res)


# -- canonical coordinate --------------------------------------------------


@dataclass
class CanonicalCoordinate:
    """Monotone table phi -> x (mod 1) conjugating the billiard to a shift."""

    lam: float
    family: ConfocalFamily  # table used to build the conjugacy
    rho: float
    phi0: float
    phi: np.ndarray  # sorted, in [phi0, phi0 + 2 pi)
    x: np.ndarray

    def __call__(self, phi):
        ph = self.phi0 + np.mod(np.asarray(phi, float) - self.phi0, TWO_PI)
        xp = np.concatenate([self.phi, [self.phi0 + TWO_PI]])
        fp = np.concatenate([self.x, [1.0]])
        return np.interp(ph, xp, fp)


def canonical_coordinate(lam: float, gamma, grid_size: int = 20000, phi0: float = 0.0,
                         max_gap: float = 5e-3) -> CanonicalCoordinate:
    """Build x with x(phi0) = 0 from one long orbit: x(phi_k) = k rho mod 1."""
    fam = _family(gamma)
    rho = rotation_number(lam, fam, iterations=grid_size, phi0=phi0)
    phis = orbit(phi0, lam, fam, grid_size - 1)
    xs = np.mod(np.arange(grid_size) * rho, 1.0)
    ph = phi0 + np.mod(phis - phi0, TWO_PI)
    order = np.argsort(ph)
    ph, xs = ph[order], xs[order]
    gaps = np.diff(np.concatenate([ph, [phi0 + TWO_PI]]))
    if gaps.max() > max_gap:
        raise ResonantCaustic(f"orbit leaves a gap of {gaps.max():.3g} rad (rho={rho:.12f})")
    if np.any(np.diff(xs) < 0):
        raise ResonantCaustic("orbit order disagrees with the rotation order")
    return CanonicalCoordinate(lam, fam, rho, phi0, ph, xs)


def _circ_spread(vals) -> float:
    """Spread of values on R/Z around their circular mean."""
    v = np.asarray(vals, float)
    ref = v[0]
    d = np.mod(v - ref + 0.5, 1.0) - 0.5
    return float(d.max() - d.min())


def shift_constancy(coord: CanonicalCoordinate, table: ConfocalFamily, lam_in_table: float, samples: int = 200) -> float:
    """Spread of x(step(phi)) - x(phi) for reflections in another table."""
    phis = np.linspace(coord.phi0, coord.phi0 + TWO_PI, samples, endpoint=False)
    out = caustic_step(phis, lam_in_table, table)
    return _circ_spread(coord(out) - coord(phis))


def string_coordinates(coord: CanonicalCoordinate, fam: ConfocalFamily, lam: float, X):
    """(x1, x2) of the tangency points of the two tangents from X."""
    a, b = _tangency_params(fam, lam, X)
    return float(coord(a)), float(coord(b))


def commutation_residual(phi, lam: float, fam: ConfocalFamily, mu: float) -> float:
    """|T o T' - T' o T| on a caustic shared by member(0) and member(mu)."""
    other = fam.rebased(mu)
    a = caustic_step(caustic_step(phi, lam - mu, other), lam, fam)
    b = caustic_step(caustic_step(phi, lam, fam), lam - mu, other)
    return float(np.max(np.abs(a - b)))


def polygon_shift_residual(gamma, n: int, lam: float | None = None, mu: float = 0.5,
                           phi0: float = 0.3) -> float:
    """Canonical coordinates of a Poncelet n-gon's tangency points vs k/n.

    The conjugacy is built from the billiard in the confocal table
    member(mu), which shares the caustic but has an irrational rotation number.
    """
    fam = _family(gamma)
    if lam is None:
        lam = find_caustic_for_n(fam, n)
    coord = canonical_coordinate(lam - mu, fam.rebased(mu), phi0=phi0)
    phis = orbit(phi0, lam, fam, n - 1)
    xs = coord(phis)
    return _circ_spread(xs - np.arange(n) / n)


# -- normalization of a nested pair ---------------------------------------


def to_confocal(outer, inner, eps: float = 1e-9):
    """Projective map taking a nested pair of ellipses to a confocal pair.

    ``outer`` and ``inner`` are 3x3 symmetric conic matrices.  Returns
    (Collineation, ConfocalFamily, lam) where the family's table is the
    image of ``outer`` and member(lam) the image of ``inner``.
    """
    from scipy.linalg import eig

    C1, C2 = np.asarray(outer, float), np.asarray(inner, float)
    w, V = eig(C2, C1)
    if np.max(np.abs(w.imag)) > eps:
        raise geom.DegenerateConic("pencil has complex eigenvalues; conics are not nested")
    V = V.real
    d1 = np.diag(V.T @ C1 @ V)
    d2 = np.diag(V.T @ C2 @ V)
    for k in range(3):
        i, j = [m for m in range(3) if m != k]
        ok = all(np.sign(d[i]) == np.sign(d[j]) == -np.sign(d[k]) for d in (d1, d2))
        if not ok:
            continue
        al = [-d1[k] / d1[i], -d1[k] / d1[j]]  # outer semi-axes squared
        be = [-d2[k] / d2[i], -d2[k] / d2[j]]
        if (al[0] - be[0]) * (al[1] - be[1]) <= 0:
            continue
        # y -> sqrt(r) y makes the two axis differences agree
        r = (al[1] - be[1]) / (al[0] - be[0])
        P = np.zeros((3, 3))
        P[i, 0] = P[j, 1] = P[k, 2] = 1.0
        T = V @ P @ np.diag([1.0, math.sqrt(r), 1.0])
        a1s, a2s = al[0], al[1] / r
        if a1s < a2s:
            T = T[:, [1, 0, 2]]
            a1s, a2s = a2s, a1s
        col = geom.Collineation(np.linalg.inv(T).tolist())
        fam = ConfocalFamily(math.sqrt(a1s), math.sqrt(a2s))
        Ci = T.T @ C2 @ T
        Ci = Ci / -Ci[2, 2]
        lam = 1.0 / Ci[0, 0] - fam.a1**2
        return col, fam, float(lam)
    raise geom.DegenerateConic("could not find a real confocal normal form")
