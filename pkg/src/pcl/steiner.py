"""Steiner and Rigby theorems, the Steiner map S_O and its normal form.

Triples are tuples of three Points (or three Lines for the dual
constructions).  The S_3 action is s(B)_i = B_{s^-1(i)} with permutations
written as tuples i -> s[i] (0-based); sigma = (1 -> 2 -> 3 -> 1) and
tau = swap(1, 2).

For the normal form a line a carrying the triple is given the affine
coordinate z/w with O at 0; a triple becomes the binary cubic
prod(w_i z - z_i w) and S_O acts on the secant of the twisted cubic through
that cubic as x -> x^2.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from . import geom
from . import linalg as la
from .geom import Line, Point, join, meet
from .scalars import GaussianRational, QuadExt, all_exact

SIGMA = (1, 2, 0)
TAU = (1, 0, 2)
IDENTITY = (0, 1, 2)


class DegenerateInput(ValueError):
    pass


class CoincidentHessianRoots(ValueError):
    pass


class SecantThroughOrigin(ValueError):
    pass


def compose(s, t):
    """(s o t)(i) = s(t(i))."""
    return tuple(s[t[i]] for i in range(3))


def inverse(s):
    out = [0, 0, 0]
    for i, j in enumerate(s):
        out[j] = i
    return tuple(out)


def permute(s, triple):
    """s(B)_i = B_{s^-1(i)}."""
    inv = inverse(s)
    return tuple(triple[inv[i]] for i in range(3))


def parity(s) -> int:
    return sum(1 for i, j in itertools.combinations(range(3), 2) if s[i] > s[j]) % 2


S3 = [IDENTITY, SIGMA, compose(SIGMA, SIGMA), TAU, compose(TAU, SIGMA), compose(TAU, compose(SIGMA, SIGMA))]


def pappus_line(A, B, eps: float = 1e-9):
    """Line through the three Pappus points of collinear triples A and B.

    Dually, for two concurrent line triples this is the point l*(A, B).
    """
    try:
        a, b = join(A[0], A[1]), join(B[0], B[1])
        if a == b:
            raise DegenerateInput("triples lie on the same line")
        cs = []
        for i, j in ((1, 2), (0, 2), (0, 1)):
            cs.append(meet(join(A[i], B[j]), join(A[j], B[i])))
        out = join(cs[0], cs[1])
    except geom.GeometryError as e:
        raise DegenerateInput(str(e)) from None
    if not geom.incident(cs[2], out, eps):
        raise AssertionError("Pappus points are not collinear")
    return out


dual_pappus_point = pappus_line


def steiner_lines(A, B, eps: float = 1e-9):
    """phi (even permutations of B) and psi (odd ones), each a concurrent triple."""
    s2 = compose(SIGMA, SIGMA)
    phi = tuple(pappus_line(A, permute(s, B), eps) for s in (IDENTITY, SIGMA, s2))
    psi = tuple(pappus_line(A, permute(s, B), eps) for s in (TAU, compose(TAU, SIGMA), compose(TAU, s2)))
    for tri in (phi, psi):
        if not geom.collinear(*tri, eps=eps):
            raise AssertionError("Steiner lines are not concurrent")
    return phi, psi


def steiner_points(A, B, eps: float = 1e-9):
    """The two Steiner points (even, odd)."""
    phi, psi = steiner_lines(A, B, eps)
    try:
        return meet(phi[0], phi[1]), meet(psi[0], psi[1])
    except geom.GeometryError as e:
        raise DegenerateInput(str(e)) from None


def rigby_points(A, B, eps: float = 1e-9):
    """{s: l*(phi, s(psi))} for all six permutations s."""
    phi, psi = steiner_lines(A, B, eps)
    return {s: dual_pappus_point(phi, permute(s, psi), eps) for s in S3}


def _line_of(T):
    return join(T[0], T[1])


def random_line_through(O, rng, bound: int = 50):
    while True:
        q = Point(*(int(v) for v in rng.integers(-bound, bound + 1, size=3)))
        if q != O:
            return join(O, q)


def random_triple_on(line, rng, bound: int = 50, avoid=()):
    """Three distinct random rational points of a line, avoiding given points."""
    u, v = _basis_on(line)
    while True:
        pts = []
        for _ in range(3):
            s, t = (int(x) for x in rng.integers(-bound, bound + 1, size=2))
            if s == 0 and t == 0:
                break
            pts.append(Point(tuple(s * x + t * y for x, y in zip(u, v))))
        if len(pts) == 3 and len(set(pts)) == 3 and not set(pts) & set(avoid):
            return tuple(pts)


def _basis_on(line):
    cands = [la.cross(tuple(line), e) for e in la.identity(3)]
    cands = [c for c in cands if any(x != 0 for x in c)]
    u = cands[0]
    v = next(c for c in cands[1:] if not geom.proportional(u, c))
    return u, v


def steiner_map(A, O, B=None, rng=None, eps: float = 1e-9):
    """S_O(A) = (l*(phi, psi), l*(phi, sigma^2 psi), l*(phi, sigma psi)).

    The auxiliary triple B (on a line through O) is drawn at random when not
    supplied; the result does not depend on it.
    """
    a = _line_of(A)
    if not geom.incident(O, a, eps) or any(O == p for p in A):
        raise DegenerateInput("O must lie on the line of A and differ from its points")
    if B is None:
        rng = rng if rng is not None else np.random.default_rng(0)
        for _ in range(100):
            B = random_triple_on(random_line_through(O, rng), rng, avoid=(O,))
            try:
                return steiner_map(A, O, B, eps=eps)
            except DegenerateInput:
                continue
        raise DegenerateInput("no admissible auxiliary triple found")
    if not geom.incident(O, _line_of(B), eps):
        raise DegenerateInput("auxiliary triple must lie on a line through O")
    phi, psi = steiner_lines(A, B, eps)
    s2 = compose(SIGMA, SIGMA)
    return tuple(dual_pappus_point(phi, permute(s, psi), eps) for s in (IDENTITY, s2, SIGMA))


# -- binary cubics ----------------------------------------------------------


def line_chart(a, O):
    """Basis (O, E) of line a: a point is w*O + z*E, coordinate z/w."""
    u, v = _basis_on(a)
    e = u if not geom.proportional(u, tuple(O)) else v
    return tuple(O), e


def chart_coordinate(p, chart):
    """Homogeneous (z, w) of p in the chart (exact when possible)."""
    o, e = chart
    pc = tuple(p)
    # p = w*o + z*e: solve with the two columns of largest minor
    best = None
    for i, j in itertools.combinations(range(3), 2):
        det = o[i] * e[j] - o[j] * e[i]
        if best is None or abs(complex(det)) > abs(complex(best[0])):
            best = (det, i, j)
    det, i, j = best
    w = (pc[i] * e[j] - pc[j] * e[i])
    z = (o[i] * pc[j] - o[j] * pc[i])
    return z, w


def triple_to_cubic(T, chart):
    """Coefficients (c0, c1, c2, c3) of prod(w_i z - z_i w), c0 leading in z."""
    c = [Fraction(1)] if all_exact([x for p in T for x in p]) else [1.0]
    for p in T:
        z, w = chart_coordinate(p, chart)
        # multiply by (w z' - z w') in the variables (z', w')
        nxt = [0] * (len(c) + 1)
        for k, ck in enumerate(c):
            nxt[k] = nxt[k] + ck * w
            nxt[k + 1] = nxt[k + 1] - ck * z
        c = nxt
    return tuple(c)


def cubic_from_roots(roots):
    """Cubic with the given affine roots (None for a root at infinity)."""
    c = [1]
    for r in roots:
        z, w = (1, 0) if r is None else (r, 1)
        nxt = [0] * (len(c) + 1)
        for k, ck in enumerate(c):
            nxt[k] += ck * w
            nxt[k + 1] -= ck * z
        c = nxt
    return tuple(c)


def cubic_to_triple(c, chart):
    """Roots of the cubic as points of the line (complex floats)."""
    roots = mpmath.polyroots([complex(x) for x in c], maxsteps=200, extraprec=100) if complex(c[0]) != 0 else None
    o, e = chart
    if roots is None:
        raise ValueError("cubic has a root at infinity; change chart")
    out = []
    for r in roots:
        r = complex(r)
        out.append(Point(tuple(complex(x) + r * complex(y) for x, y in zip(o, e))))
    return tuple(out)


def hessian(c):
    """Hessian quadratic (h0, h1, h2) of c0 z^3 + c1 z^2 w + c2 z w^2 + c3 w^3."""
    third = Fraction(1, 3) if all_exact(c) else 1 / 3
    a, b, cc, d = c[0], third * c[1], third * c[2], c[3]
    return (a * cc - b * b, a * d - b * cc, b * d - cc * cc)


def _mpf(f: Fraction):
    return mpmath.mpf(f.numerator) / f.denominator


def _mpc(x):
    if isinstance(x, GaussianRational):
        return mpmath.mpc(_mpf(x.u), _mpf(x.v))
    if isinstance(x, QuadExt):
        th = type(x).theta_value()
        return _mpf(x.u) + _mpf(x.v) * mpmath.mpc(th.real, th.imag)
    if isinstance(x, Fraction):
        return mpmath.mpc(mpmath.mpf(x.numerator) / x.denominator)
    return mpmath.mpc(x)


@dataclass
class SecantCoordinate:
    p: complex
    q: complex
    x: complex

    def swapped(self) -> "SecantCoordinate":
        return SecantCoordinate(self.q, self.p, 1 / self.x if self.x != 0 else mpmath.inf)


def hessian_roots(c, dps: int = 50):
    h = [_mpc(x) for x in hessian(c)]
    with mpmath.workdps(dps):
        if all(abs(x) == 0 for x in h):
            return None
        if abs(h[0]) == 0:
            raise SecantThroughOrigin("Hessian has a root at infinity")
        disc = h[1] ** 2 - 4 * h[0] * h[2]
        if abs(disc) <= mpmath.mpf(10) ** (-dps // 2) * max(abs(x) for x in h) ** 2:
            raise CoincidentHessianRoots("cubic lies on the tangent variety of the twisted cubic")
        s = mpmath.sqrt(disc)
        return (-h[1] + s) / (2 * h[0]), (-h[1] - s) / (2 * h[0])


def secant_coordinate(c, pq=None, dps: int = 50) -> SecantCoordinate:
    """Coordinate of the cubic on its secant: p -> 0, q -> infinity, Pi -> -1.

    ``pq`` fixes the labelling of the Hessian roots (used to compare the
    input and the image of S_O on the same secant).
    """
    with mpmath.workdps(dps):
        cm = [_mpc(x) for x in c]
        if pq is None:
            roots = hessian_roots(c, dps)
            if roots is None:
                # on the twisted cubic: the point p itself
                r = -cm[1] / (3 * cm[0]) if abs(cm[0]) else mpmath.inf
                return SecantCoordinate(complex(r), complex(mpmath.nan), 0j)
            p, q = roots
        else:
            p, q = (mpmath.mpc(t) for t in pq)
        if abs(p) == 0 or abs(q) == 0:
            raise SecantThroughOrigin("secant passes through the cubic z^3")
        # f = u (z - p w)^3 + v (z - q w)^3, least squares over 4 coefficients
        cols = [[1, -3 * r, 3 * r * r, -r ** 3] for r in (p, q)]
        m = mpmath.matrix([[cols[0][k], cols[1][k]] for k in range(4)])
        rhs = mpmath.matrix(cm)
        mh = m.transpose_conj()
        u, v = mpmath.lu_solve(mh * m, mh * rhs)
        if abs(u) == 0:
            x = mpmath.inf
        else:
            x = (v * q ** 3) / (u * p ** 3)
        return SecantCoordinate(complex(p), complex(q), complex(x))


def _x_mp(c, p, q, dps=50):
    """Secant coordinate in mpmath precision with fixed p, q."""
    with mpmath.workdps(dps):
        cm = [_mpc(x) for x in c]
        cols = [[1, -3 * r, 3 * r * r, -r ** 3] for r in (p, q)]
        m = mpmath.matrix([[cols[0][k], cols[1][k]] for k in range(4)])
        mh = m.transpose_conj()
        u, v = mpmath.lu_solve(mh * m, mh * mpmath.matrix(cm))
        return (v * q ** 3) / (u * p ** 3)


def hessians_proportional(c1, c2) -> bool:
    h1, h2 = hessian(c1), hessian(c2)
    if all_exact(list(h1) + list(h2)):
        return geom.proportional(h1, h2)
    return geom.proportional(h1, h2, 1e-9)


@dataclass
class SquareLawResult:
    x_in: complex
    x_out: complex
    residual: float
    secant_preserved: bool


def verify_square_law(A, O, rng=None, dps: int = 50) -> SquareLawResult:
    """|x(S_O(A)) - x(A)^2| with a common labelling of the Hessian roots."""
    a = _line_of(A)
    chart = line_chart(a, O)
    img = steiner_map(A, O, rng=rng)
    f_in, f_out = triple_to_cubic(A, chart), triple_to_cubic(img, chart)
    same = hessians_proportional(f_in, f_out)
    with mpmath.workdps(dps):
        roots = hessian_roots(f_in, dps)
        if roots is None:
            xi, xo = mpmath.mpc(0), mpmath.mpc(0)
        else:
            p, q = roots
            xi, xo = _x_mp(f_in, p, q, dps), _x_mp(f_out, p, q, dps)
        res = float(abs(xo - xi ** 2))
    return SquareLawResult(complex(xi), complex(xo), res, same)


def doubling_residual(A, O, rng=None, dps: int = 50):
    """For a real triple: t = arg(x)/2pi on R/Z, returns (t_in, t_out, circle distance of t_out and 2 t_in)."""
    r = verify_square_law(A, O, rng, dps)
    t_in = (np.angle(r.x_in) / (2 * np.pi)) % 1.0
    t_out = (np.angle(r.x_out) / (2 * np.pi)) % 1.0
    d = (t_out - 2 * t_in) % 1.0
    return t_in, t_out, min(d, 1 - d), abs(abs(r.x_in) - 1)


def random_complex_setup(rng, bound: int = 20):
    """Random line a, point O on it and a triple A, all over Q(i)."""
    def gi():
        return GaussianRational(int(rng.integers(-bound, bound + 1)), int(rng.integers(-bound, bound + 1)))

    while True:
        a = Line(*(int(v) for v in rng.integers(-bound, bound + 1, size=3)))
        u, v = _basis_on(a)
        pts = []
        for _ in range(4):
            s, t = gi(), gi()
            if s == 0 and t == 0:
                break
            pts.append(Point(tuple(s * x + t * y for x, y in zip(u, v))))
        if len(pts) == 4 and len(set(pts)) == 4:
            return a, pts[0], tuple(pts[1:])


def random_real_setup(rng, bound: int = 50):
    while True:
        a = Line(*(int(v) for v in rng.integers(-bound, bound + 1, size=3)))
        if all(x == 0 for x in a.coords):
            continue
        pts = random_triple_on(a, rng, bound)
        o = random_triple_on(a, rng, bound, avoid=pts)[0]
        return a, o, pts


# -- theorem drivers -------------------------------------------------------

EVEN = (IDENTITY, SIGMA, compose(SIGMA, SIGMA))


def _two_triples(rng):
    """A on a random line a, B on a random line b, O = a & b kept off both triples."""
    a, O, A = random_real_setup(rng)
    b = random_line_through(O, rng)
    if b == a:
        raise DegenerateInput("b = a")
    B = random_triple_on(b, rng, avoid=(O,))
    if O in A:
        raise DegenerateInput("O is a point of A")
    return a, b, O, A, B


def _check_concurrency(rng):
    a, b, O, A, B = _two_triples(rng)
    phi, psi = steiner_lines(A, B)
    res = [geom.det_residual(*phi), geom.det_residual(*psi)]
    return all(r == 0 for r in res), {"phi": phi, "psi": psi}


def _check_rigby(rng):
    a, b, O, A, B = _two_triples(rng)
    pts = rigby_points(A, B)
    ok = all(geom.incident(p, a if parity(s) == 0 else b) for s, p in pts.items())
    return ok, {"points": [pts[s] for s in S3]}


def _check_rigby_independence(rng):
    a, b, O, A, B = _two_triples(rng)
    b2 = random_line_through(O, rng)
    if b2 in (a, b):
        raise DegenerateInput("b' coincides with a or b")
    B2 = random_triple_on(b2, rng, avoid=(O,))
    p1, p2 = rigby_points(A, B), rigby_points(A, B2)
    ok = all(p1[s] == p2[s] for s in EVEN)
    return ok, {"even_points": [p1[s] for s in EVEN]}


def _check_map_independence(rng):
    a, b, O, A, B = _two_triples(rng)
    b2 = random_line_through(O, rng)
    B2 = random_triple_on(b2, rng, avoid=(O,))
    out1, out2 = steiner_map(A, O, B), steiner_map(A, O, B2)
    ok = out1 == out2 and all(geom.incident(p, a) for p in out1)
    return ok, {"image": out1}


STEINER_THEOREMS = {
    "steiner-concurrency": _check_concurrency,
    "rigby-collinearity": _check_rigby,
    "rigby-independence": _check_rigby_independence,
    "steiner-map-independence": _check_map_independence,
}


def run_steiner_theorem(theorem_id: str, trials: int = 20, seed: int = 0, max_resamples: int = 100):
    from .dsl import trial_rng
    from .report import EXHAUSTED, FALSIFIED, VerificationReport

    if theorem_id not in STEINER_THEOREMS:
        raise KeyError(f"unknown theorem {theorem_id!r}; known: {', '.join(STEINER_THEOREMS)}")
    fn = STEINER_THEOREMS[theorem_id]
    rep = VerificationReport(theorem_id, seed, trials)
    for t in range(trials):
        rng = trial_rng(seed, t)
        for _ in range(max_resamples):
            try:
                ok, info = fn(rng)
                break
            except (DegenerateInput, geom.GeometryError):
                continue
        else:
            rep.verdict = EXHAUSTED
            return rep
        rep.trials_completed = t + 1
        rep.max_residuals.append(0 if ok else 1)
        if not ok:
            rep.verdict = FALSIFIED
            rep.witness = {"trial": t, **info}
            break
    return rep


def square_law_samples(samples: int = 50, seed: int = 0):
    """Per-sample square-law residuals on Q(i) triples."""
    from .dsl import trial_rng

    out = []
    for k in range(samples):
        rng = trial_rng(seed, k)
        for _ in range(100):
            a, O, A = random_complex_setup(rng)
            try:
                r = verify_square_law(A, O, rng)
                break
            except (DegenerateInput, CoincidentHessianRoots, SecantThroughOrigin, geom.GeometryError):
                continue
        else:
            raise DegenerateInput("no admissible sample")
        out.append({"x_in": r.x_in, "x_out": r.x_out, "residual": r.residual, "secant_preserved": r.secant_preserved})
    return out


def doubling_samples(samples: int = 50, seed: int = 0):
    """Real triples: t on R/Z must go to 2t mod 1."""
    from .dsl import trial_rng

    out = []
    for k in range(samples):
        rng = trial_rng(seed, 10**6 + k)
        for _ in range(100):
            a, O, A = random_real_setup(rng)
            try:
                t_in, t_out, dist, mod = doubling_residual(A, O, rng)
                break
            except (DegenerateInput, CoincidentHessianRoots, SecantThroughOrigin, geom.GeometryError):
                continue
        else:
            raise DegenerateInput("no admissible sample")
        out.append({"t_in": t_in, "t_out": t_out, "residual": dist, "modulus_defect": mod})
    return out
