"""Projective plane kernel: points, lines, conics, collineations.

Coordinates are homogeneous triples over any scalar backend from
:mod:`pcl.scalars`.  Exact triples are stored in a canonical form (primitive
integer vector with positive leading entry for rationals, leading entry 1
for the quadratic extensions) so equality and hashing are exact.  Float
triples are scaled so that the entry of largest modulus is 1 and compared by
a relative proportionality test.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg as la
from .scalars import DEFAULT_EPS, QuadExt, all_exact, is_exact, magnitude


class GeometryError(ValueError):
    pass


class CoincidentPoints(GeometryError):
    pass


class CoincidentLines(GeometryError):
    pass


class NotCollinear(GeometryError):
    pass


class RepeatedPoint(GeometryError):
    pass


class DegenerateFrame(GeometryError):
    pass


class TooFewPoints(GeometryError):
    pass


class UnderdeterminedConic(GeometryError):
    pass


class DegenerateConic(GeometryError):
    pass


def _normalize(coords):
    coords = tuple(coords)
    if len(coords) != 3:
        raise ValueError(f"expected a homogeneous triple, got {coords!r}")
    if all_exact(coords):
        if any(isinstance(x, QuadExt) for x in coords):
            lead = next((x for x in coords if x != 0), None)
            if lead is None:
                raise ValueError("zero vector is not a projective element")
            cls = next(type(x) for x in coords if isinstance(x, QuadExt))
            return tuple(cls(0) + x / lead for x in coords)
        fr = [Fraction(x) for x in coords]
        den = math.lcm(*(f.denominator for f in fr))
        ints = [int(f * den) for f in fr]
        g = math.gcd(*ints)
        if g == 0:
            raise ValueError("zero vector is not a projective element")
        lead = next(x for x in ints if x != 0)
        if lead < 0:
            g = -g
        return tuple(x // g for x in ints)
    vals = [complex(x) if isinstance(x, (complex, QuadExt)) else float(x) for x in coords]
    big = max(vals, key=abs)
    if big == 0 or not all(map(np.isfinite, vals)):
        raise ValueError(f"invalid homogeneous triple {coords!r}")
    out = tuple(v / big for v in vals)
    if all(isinstance(v, float) or v.imag == 0 for v in out) and not any(
        isinstance(x, (complex, QuadExt)) for x in coords
    ):
        out = tuple(float(v.real) if isinstance(v, complex) else v for v in out)
    return out


class _Proj:
    __slots__ = ("coords",)

    def __init__(self, *coords):
        if len(coords) == 1:
            coords = tuple(coords[0])
        self.coords = _normalize(coords)

    @property
    def exact(self) -> bool:
        return all_exact(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __len__(self):
        return 3

    def proportional(self, other, eps: float = DEFAULT_EPS) -> bool:
        return proportional(self.coords, other.coords, eps)

    def __eq__(self, other):
        if type(self) is not type(other):
            return NotImplemented
        return self.proportional(other)

    def __hash__(self):
        if not self.exact:
            raise TypeError("float projective elements are not hashable; compare with ==")
        return hash((type(self).__name__, self.coords))

    def numeric(self) -> np.ndarray:
        return np.array([complex(x) if isinstance(x, QuadExt) else x for x in self.coords])

    def affine(self):
        """Affine chart z = 1 (raises ZeroDivisionError at infinity)."""
        x, y, z = self.coords
        return (x / z, y / z) if not is_exact(z) else (Fraction(x) / z, Fraction(y) / z)

    def __repr__(self):
        return f"{type(self).__name__}({', '.join(map(str, self.coords))})"


class Point(_Proj):
    __slots__ = ()


class Line(_Proj):
    __slots__ = ()


def proportional(a, b, eps: float = DEFAULT_EPS) -> bool:
    c = la.cross(a, b)
    if all_exact(tuple(a) + tuple(b)):
        return all(x == 0 for x in c)
    return la.max_norm(c) <= eps * la.max_norm(a) * la.max_norm(b)


def incident(p, l, eps: float = DEFAULT_EPS) -> bool:
    """Point/line incidence (arguments in either order)."""
    a, b = tuple(p), tuple(l)
    d = la.dot(a, b)
    if all_exact(a + b):
        return d == 0
    return magnitude(d) <= eps * la.max_norm(a) * la.max_norm(b)


def join(p, q, eps: float = DEFAULT_EPS) -> Line:
    """Line through two points (works verbatim on lines in the dual plane)."""
    c = la.cross(tuple(p), tuple(q))
    if proportional(tuple(p), tuple(q), eps):
        raise CoincidentPoints(f"cannot join coincident elements {p!r}, {q!r}")
    out_cls = Line if not isinstance(p, Line) else Point
    return out_cls(c)


def meet(l, m, eps: float = DEFAULT_EPS) -> Point:
    """Intersection point of two lines."""
    if proportional(tuple(l), tuple(m), eps):
        raise CoincidentLines(f"cannot meet coincident lines {l!r}, {m!r}")
    out_cls = Point if not isinstance(l, Point) else Line
    return out_cls(la.cross(tuple(l), tuple(m)))


def det_residual(a, b, c):
    """Determinant of three triples (collinearity / concurrency residual)."""
    return la.det3(tuple(a), tuple(b), tuple(c))


def collinear(a, b, c, eps: float = DEFAULT_EPS) -> bool:
    d = det_residual(a, b, c)
    if all_exact(tuple(a) + tuple(b) + tuple(c)):
        return d == 0
    scale = la.max_norm(tuple(a)) * la.max_norm(tuple(b)) * la.max_norm(tuple(c))
    return magnitude(d) <= eps * scale


concurrent = collinear


def in_general_position(pts, eps: float = DEFAULT_EPS) -> bool:
    return all(not collinear(a, b, c, eps) for a, b, c in itertools.combinations(pts, 3))


def cross_ratio(a, b, c, d, eps: float = DEFAULT_EPS):
    """cr(a,b;c,d) = |ac||bd| / (|bc||ad|) for four collinear points.

    Also accepts four concurrent lines.  Negative exactly when the pairs
    {a,b} and {c,d} separate each other.
    """
    pts = [tuple(x) for x in (a, b, c, d)]
    for i, j in itertools.combinations(range(4), 2):
        if proportional(pts[i], pts[j], eps):
            raise RepeatedPoint(f"repeated element in cross-ratio: {pts[i]}")
    if not (collinear(*pts[:3], eps=eps) and collinear(pts[0], pts[1], pts[3], eps=eps)):
        raise NotCollinear("cross-ratio needs four collinear points")
    carrier = la.cross(pts[0], pts[1])
    # drop a coordinate in which the carrier is nonzero; the projection is
    # injective on the carrier
    k = max(range(3), key=lambda i: magnitude(carrier[i]))
    keep = [i for i in range(3) if i != k]

    def br(u, v):
        return u[keep[0]] * v[keep[1]] - u[keep[1]] * v[keep[0]]

    pa, pb, pc, pd = pts
    num = br(pa, pc) * br(pb, pd)
    den = br(pb, pc) * br(pa, pd)
    if all_exact(pa + pb + pc + pd) and not any(isinstance(x, QuadExt) for x in pa + pb + pc + pd):
        return Fraction(num) / Fraction(den)
    return num / den


# -- collineations ---------------------------------------------------------


def _as_matrix(m):
    return tuple(tuple(r) for r in m)


@dataclass(frozen=True)
class Collineation:
    """Invertible 3x3 matrix up to scale.

    ``target_space='plane'`` maps points to points; ``'dual'`` is a
    correlation taking points to lines.
    """

    m: tuple
    target_space: str = "plane"

    def __post_init__(self):
        object.__setattr__(self, "m", _as_matrix(self.m))

    def apply_coords(self, v):
        return la.matvec(self.m, tuple(v))

    def __call__(self, obj):
        if isinstance(obj, Line):
            # incidence-preserving action on lines: l -> M^{-T} l
            img = la.matvec(la.transpose(la.adjugate3(self.m)), obj.coords)
            return Line(img) if self.target_space == "plane" else Point(img)
        img = self.apply_coords(obj)
        if self.target_space == "dual":
            return Line(img)
        return Point(img)

    def __matmul__(self, other: "Collineation") -> "Collineation":
        space = "plane" if self.target_space == other.target_space else "dual"
        return Collineation(la.matmul(self.m, other.m), space)

    def power(self, k: int) -> "Collineation":
        out = Collineation(la.identity(3), "plane")
        for _ in range(k):
            out = Collineation(la.matmul(self.m, out.m), "plane")
        return out

    def is_scalar(self, eps: float = DEFAULT_EPS) -> bool:
        """True when the matrix is proportional to the identity."""
        return matrix_proportional(self.m, la.identity(3), eps)

    def numeric(self) -> np.ndarray:
        return np.array([[complex(x) if isinstance(x, QuadExt) else x for x in r] for r in self.m])


def matrix_proportional(a, b, eps: float = DEFAULT_EPS) -> bool:
    fa = [x for r in a for x in r]
    fb = [x for r in b for x in r]
    exact = all_exact(fa + fb)
    # all 2x2 minors of the 2 x 9 matrix [fa; fb] vanish
    if exact:
        return all(fa[i] * fb[j] - fa[j] * fb[i] == 0 for i, j in itertools.combinations(range(9), 2))
    scale = la.max_norm(fa) * la.max_norm(fb)
    return all(
        magnitude(fa[i] * fb[j] - fa[j] * fb[i]) <= eps * scale
        for i, j in itertools.combinations(range(9), 2)
    )


def _frame_matrix(pts, eps: float):
    p1, p2, p3, p4 = (tuple(p) for p in pts)
    cols = la.transpose((p1, p2, p3))
    try:
        lam = la.solve(cols, p4, eps)
    except ValueError:
        raise DegenerateFrame("three frame points are collinear") from None
    scale = la.max_norm(lam) or 1.0
    if any(magnitude(x) <= (0 if is_exact(x) else eps * scale) for x in lam):
        raise DegenerateFrame("frame point lies on a side of the frame triangle")
    return la.transpose((
        tuple(lam[0] * x for x in p1),
        tuple(lam[1] * x for x in p2),
        tuple(lam[2] * x for x in p3),
    ))


def collineation_from_frames(src, dst, target_space: str = "plane", eps: float = DEFAULT_EPS) -> Collineation:
    """Unique (up to scale) projective map sending src[i] to dst[i], i < 4."""
    if len(src) != 4 or len(dst) != 4:
        raise ValueError("frames must have exactly four elements")
    fs = _frame_matrix(src, eps)
    fd = _frame_matrix(dst, eps)
    m = la.matmul(fd, la.adjugate3(fs))
    return Collineation(m, target_space)


@dataclass(frozen=True)
class Equivalence:
    collineation: Collineation
    shift: int = 0
    reflected: bool = False
    residual: float = 0.0

    def labeling(self, n: int):
        """Index of the target element matched with source index i."""
        if self.reflected:
            return [(self.shift - i) % n for i in range(n)]
        return [(i + self.shift) % n for i in range(n)]


def _labelings(n, allow_cyclic_shift, allow_reflection):
    yield 0, False
    if allow_cyclic_shift:
        for s in range(1, n):
            yield s, False
    if allow_reflection:
        for s in range(n) if allow_cyclic_shift else [n - 1]:
            yield s, True


def find_equivalence(
    ps,
    qs,
    allow_dual: bool = True,
    allow_cyclic_shift: bool = True,
    allow_reflection: bool = True,
    eps: float = DEFAULT_EPS,
):
    """Find a projective map taking ps[i] to qs[label(i)].

    Tries the identity labeling, then cyclic shifts, then reflections and
    returns the first :class:`Equivalence` found, or ``None``.
    """
    ps, qs = list(ps), list(qs)
    n = len(ps)
    if n != len(qs):
        raise ValueError("point lists differ in length")
    if n < 4:
        raise TooFewPoints("need at least four points")
    dual = any(isinstance(q, Line) for q in qs)
    if dual and not allow_dual:
        return None
    space = "dual" if dual else "plane"
    frame = next(
        (idx for idx in itertools.combinations(range(n), 4)
         if in_general_position([ps[i] for i in idx], eps)),
        None,
    )
    if frame is None:
        raise DegenerateFrame("no four source points in general position")
    pc = [tuple(p) for p in ps]
    qc = [tuple(q) for q in qs]
    exact = all_exact([x for v in pc + qc for x in v])
    for shift, refl in _labelings(n, allow_cyclic_shift, allow_reflection):
        lab = [(shift - i) % n if refl else (i + shift) % n for i in range(n)]
        try:
            col = collineation_from_frames([pc[i] for i in frame], [qc[lab[i]] for i in frame], space, eps)
        except DegenerateFrame:
            continue
        worst = 0.0
        ok = True
        for i in range(n):
            img = col.apply_coords(pc[i])
            if exact:
                if not proportional(img, qc[lab[i]]):
                    ok = False
                    break
            else:
                r = _proportionality_residual(img, qc[lab[i]])
                worst = max(worst, r)
                if r > eps:
                    ok = False
                    break
        if ok:
            return Equivalence(col, shift, refl, worst)
    return None


def _proportionality_residual(a, b) -> float:
    na, nb = la.max_norm(a), la.max_norm(b)
    if na == 0 or nb == 0:
        return math.inf
    return la.max_norm(la.cross(a, b)) / (na * nb)


# -- conics ----------------------------------------------------------------


def _monomials(p):
    x, y, z = p
    return (x * x, x * y, y * y, x * z, y * z, z * z)


def _conic_from_vector(v):
    a, b, c, d, e, f = v
    # doubled so integer coefficient vectors stay integral
    return Conic(((2 * a, b, d), (b, 2 * c, e), (d, e, 2 * f)))


@dataclass(frozen=True)
class Conic:
    """Symmetric 3x3 matrix up to scale: p on conic iff p^T m p = 0."""

    m: tuple

    def __post_init__(self):
        object.__setattr__(self, "m", _as_matrix(self.m))

    @property
    def exact(self) -> bool:
        return all_exact([x for r in self.m for x in r])

    def value(self, p):
        v = tuple(p)
        return la.dot(v, la.matvec(self.m, v))

    def residual(self, p) -> float:
        """|p^T m p| normalised by |m| |p|^2 (0 exactly on exact data)."""
        v = tuple(p)
        val = self.value(v)
        if self.exact and all_exact(v):
            return 0.0 if val == 0 else float(magnitude(val)) / (self.norm() * la.max_norm(v) ** 2)
        return float(magnitude(val)) / (self.norm() * la.max_norm(v) ** 2)

    def norm(self) -> float:
        return float(la.max_norm([x for r in self.m for x in r]))

    def contains(self, p, eps: float = DEFAULT_EPS) -> bool:
        if self.exact and all_exact(tuple(p)):
            return self.value(p) == 0
        return self.residual(p) <= eps

    def det(self):
        return la.det3m(self.m)

    def is_degenerate(self, eps: float = DEFAULT_EPS) -> bool:
        d = self.det()
        if self.exact:
            return d == 0
        return magnitude(d) <= eps * self.norm() ** 3

    def polar(self, p) -> Line:
        return Line(la.matvec(self.m, tuple(p)))

    def pole(self, l, eps: float = DEFAULT_EPS) -> Point:
        if self.is_degenerate(eps):
            raise DegenerateConic("pole is undefined for a degenerate conic")
        return Point(la.matvec(la.adjugate3(self.m), tuple(l)))

    def dual(self) -> "Conic":
        """Conic of tangent lines (adjugate matrix)."""
        return Conic(la.adjugate3(self.m))

    def tangent_to(self, l, eps: float = DEFAULT_EPS) -> bool:
        return self.dual().contains(l, eps)

    def transform(self, col: Collineation) -> "Conic":
        """Image of the conic under a plane collineation p -> M p."""
        a = la.adjugate3(col.m)
        return Conic(la.matmul(la.transpose(a), la.matmul(self.m, a)))

    def kind(self, eps: float = DEFAULT_EPS) -> str:
        """'ellipse', 'hyperbola', 'parabola' or 'degenerate' (real conics)."""
        if self.is_degenerate(eps):
            return "degenerate"
        m = [[float(np.real(complex(x))) for x in r] for r in self.m]
        d2 = m[0][0] * m[1][1] - m[0][1] ** 2
        scale = max(abs(x) for r in m for x in r) ** 2
        if abs(d2) <= eps * scale:
            return "parabola"
        return "ellipse" if d2 > 0 else "hyperbola"

    def __eq__(self, other):
        if not isinstance(other, Conic):
            return NotImplemented
        return matrix_proportional(self.m, other.m)

    def __hash__(self):
        return hash(Point([self.m[0][0], self.m[1][1], self.m[2][2]]).coords) if self.exact else 0


STANDARD_CONIC = Conic(((1, 0, 0), (0, 1, 0), (0, 0, -1)))


def conic_through_five(pts, eps: float = DEFAULT_EPS) -> Conic:
    """The conic through five points (null space of the 5x6 incidence system)."""
    pts = [tuple(p) for p in pts]
    if len(pts) != 5:
        raise ValueError("need exactly five points")
    rows = [_monomials(p) for p in pts]
    if all_exact([x for r in rows for x in r]):
        basis = la.nullspace(rows)
        if len(basis) != 1:
            raise UnderdeterminedConic(f"incidence system has rank {6 - len(basis)} < 5")
        return _conic_from_vector(basis[0])
    a = np.array([[complex(x) if isinstance(x, QuadExt) else x for x in r] for r in rows])
    a = a / np.abs(a).max(axis=1, keepdims=True)
    _, s, vh = np.linalg.svd(a)
    if s[4] <= eps * s[0]:
        raise UnderdeterminedConic("incidence system has rank < 5")
    v = vh[-1].conj()
    if np.all(np.abs(v.imag) <= 1e-14 * np.abs(v).max()):
        v = v.real
    v = v / v[np.argmax(np.abs(v))]
    return _conic_from_vector([x.item() for x in v])


def is_degenerate(c: Conic, eps: float = DEFAULT_EPS) -> bool:
    return c.is_degenerate(eps)


def polar(p, c: Conic) -> Line:
    return c.polar(p)


def pole(l, c: Conic, eps: float = DEFAULT_EPS) -> Point:
    return c.pole(l, eps)


def rational_conic_point(t) -> Point:
    """Point (1-t^2 : 2t : 1+t^2) of x^2 + y^2 = z^2."""
    return Point(1 - t * t, 2 * t, 1 + t * t)


def tangent_at(t) -> Line:
    """Tangent line of x^2 + y^2 = z^2 at rational_conic_point(t)."""
    return Line(1 - t * t, 2 * t, -(1 + t * t))
