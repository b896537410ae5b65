"""Marked boxes, the iterated Pappus operations and the Pappus curve.

A marked box is stored in the order (A1, A3, B3, B1; A2, B2): a quadrilateral
whose top side carries A2 and whose bottom side carries B2.  The Pappus
points are

    C1 = A1B2 . A2B1,   C2 = A1B3 . A3B1,   C3 = A2B3 . A3B2

which is the labelling under which i, tau1, tau2 satisfy the group relations
(with the other labelling C1 and C3 trade places and the relations fail).
Everything works on Points or, for dual boxes, on Lines.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import geom
from .geom import Collineation, Line, Point, collineation_from_frames, cross_ratio, join, meet

UNIT_FRAME = (Point(0, 1, 1), Point(1, 1, 1), Point(1, 0, 1), Point(0, 0, 1))
MAX_DEPTH = 20


class NotIncident(ValueError):
    pass


class NotConvex(ValueError):
    pass


class DegeneratePappus(ValueError):
    pass


class DepthTooLarge(ValueError):
    pass


class NotFound(RuntimeError):
    pass


class TooFewPoints(ValueError):
    pass


class DegenerateScaleRange(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MarkedBox:
    A1: object
    A3: object
    B3: object
    B1: object
    A2: object
    B2: object

    @property
    def a(self):
        return join(self.A1, self.A3)

    @property
    def b(self):
        return join(self.B1, self.B3)

    @property
    def O(self):
        return meet(self.a, self.b)

    def points(self):
        return (self.A1, self.A3, self.B3, self.B1, self.A2, self.B2)

    def flipped(self) -> "MarkedBox":
        """The same box under the labelling involution."""
        return MarkedBox(self.A3, self.A1, self.B1, self.B3, self.A2, self.B2)

    def __eq__(self, other):
        if not isinstance(other, MarkedBox):
            return NotImplemented
        return self.points() == other.points() or self.points() == other.flipped().points()

    def __hash__(self):
        return hash(frozenset([self.points(), self.flipped().points()]))

    def is_convex(self) -> bool:
        o = self.O
        return cross_ratio(self.A1, self.A3, self.A2, o) < 0 and cross_ratio(self.B1, self.B3, self.B2, o) < 0

    def map(self, col: Collineation) -> "MarkedBox":
        return MarkedBox(*(col(p) for p in self.points()))


def make_box(A1, A3, B3, B1, A2, B2) -> MarkedBox:
    box = MarkedBox(A1, A3, B3, B1, A2, B2)
    if not geom.incident(A2, box.a) or not geom.incident(B2, box.b):
        raise NotIncident("marked points must lie on the top and bottom lines")
    try:
        ok = box.is_convex()
    except geom.GeometryError as e:
        raise NotConvex(str(e)) from None
    if not ok:
        raise NotConvex("marked points do not separate the corners from O")
    return box


def pappus_points(box: MarkedBox):
    A1, A2, A3 = box.A1, box.A2, box.A3
    B1, B2, B3 = box.B1, box.B2, box.B3
    try:
        c1 = meet(join(A1, B2), join(A2, B1))
        c2 = meet(join(A1, B3), join(A3, B1))
        c3 = meet(join(A2, B3), join(A3, B2))
    except geom.GeometryError as e:
        raise DegeneratePappus(str(e)) from None
    return c1, c2, c3


def op_tau1(box: MarkedBox) -> MarkedBox:
    c1, c2, c3 = pappus_points(box)
    return MarkedBox(box.A1, box.A3, c3, c1, box.A2, c2)


def op_tau2(box: MarkedBox) -> MarkedBox:
    c1, c2, c3 = pappus_points(box)
    return MarkedBox(c1, c3, box.B3, box.B1, c2, box.B2)


def op_i(box: MarkedBox) -> MarkedBox:
    return MarkedBox(box.B1, box.B3, box.A1, box.A3, box.B2, box.A2)


OPS = {"i": op_i, "t1": op_tau1, "t2": op_tau2}


def apply_word(word, box: MarkedBox) -> MarkedBox:
    """Apply a composition written left to right, e.g. "t1 i t2" = t1(i(t2(box)))."""
    ops = word.split() if isinstance(word, str) else list(word)
    for op in reversed(ops):
        box = OPS[op](box)
    return box


# -- coordinates -----------------------------------------------------------


@dataclass(frozen=True)
class BoxCoords:
    x: object
    y: object

    @classmethod
    def canonical(cls, x, y) -> "BoxCoords":
        half = Fraction(1, 2) if isinstance(x, (int, Fraction)) else 0.5
        if x > half or (x == half and y > half):
            x, y = 1 - x, 1 - y
        return cls(x, y)

    def __iter__(self):
        return iter((self.x, self.y))

    def close(self, other, tol: float = 1e-9) -> bool:
        a = BoxCoords.canonical(*self)
        b = BoxCoords.canonical(*other)
        if abs(a.x - b.x) <= tol and abs(a.y - b.y) <= tol:
            return True
        # near the tie x = 1/2 either representative may have been chosen
        return abs(a.x - (1 - b.x)) <= tol and abs(a.y - (1 - b.y)) <= tol


def to_unit_square(box: MarkedBox) -> Collineation:
    return collineation_from_frames([box.A1, box.A3, box.B3, box.B1], UNIT_FRAME)


def box_coords(box: MarkedBox) -> BoxCoords:
    """[x, y] with x = |A1 A2| and y = |B1 B2| in the unit-square normal form."""
    col = to_unit_square(box)
    x = col(box.A2).affine()[0]
    y = col(box.B2).affine()[0]
    return BoxCoords.canonical(x, y)


def box_from_coords(x, y) -> MarkedBox:
    if not (0 < x < 1 and 0 < y < 1):
        raise NotConvex("box coordinates must lie in (0, 1)")
    return MarkedBox(*UNIT_FRAME, Point(x, 1, 1), Point(y, 0, 1))


def random_convex_box(rng, bound: int = 50) -> MarkedBox:
    """Unit-square box with random rational [x, y] moved by a random integer collineation."""
    def frac():
        d = int(rng.integers(2, bound + 1))
        return Fraction(int(rng.integers(1, d)), d)

    box = box_from_coords(frac(), frac())
    while True:
        m = tuple(tuple(int(v) for v in rng.integers(-9, 10, size=3)) for _ in range(3))
        if geom.la.det3m(m) != 0:
            return box.map(Collineation(m))


# -- duality and symmetries ------------------------------------------------


def dual_box(box: MarkedBox) -> MarkedBox:
    """(A2B1, A2B3, A1B2, A3B2; a, b), a marked box in the dual plane."""
    return MarkedBox(
        join(box.A2, box.B1), join(box.A2, box.B3),
        join(box.A1, box.B2), join(box.A3, box.B2),
        box.a, box.b,
    )


def _box_map(src: MarkedBox, dst: MarkedBox, space: str):
    """Projective map carrying src onto dst as labelled boxes, or None."""
    for target in (dst, dst.flipped()):
        try:
            col = collineation_from_frames(src.points()[:4], target.points()[:4], space)
        except geom.DegenerateFrame:
            continue
        img = MarkedBox(*(Point(col.apply_coords(p)) if space == "plane" else Line(col.apply_coords(p))
                          for p in src.points()))
        if img.points() == target.points():
            return col
    return None


def order3_symmetry(box: MarkedBox) -> Collineation:
    """Collineation cycling i(box) -> tau1(box) -> tau2(box)."""
    ib, t1, t2 = op_i(box), op_tau1(box), op_tau2(box)
    col = _box_map(ib, t1, "plane")
    if col is None:
        raise NotFound("no collineation takes i(box) to tau1(box)")
    if t1.map(col) != t2 or t2.map(col) != ib:
        raise NotFound("collineation does not cycle the three boxes")
    if not col.power(3).is_scalar():
        raise NotFound("symmetry is not of order three")
    return col


def duality_symmetry(box: MarkedBox) -> Collineation:
    """Correlation taking the points of i(box) to the lines of the dual box."""
    col = _box_map(op_i(box), dual_box(box), "dual")
    if col is None:
        raise NotFound("no correlation identifies i(box) with the dual box")
    return col


# -- orbit and curve -------------------------------------------------------


@dataclass(frozen=True)
class OrbitNode:
    word: tuple  # operations in application order
    box: MarkedBox
    address: str  # arc bit followed by the binary path (0 = tau1 child)

    @property
    def position(self) -> Fraction:
        """Dyadic position of the top point on the circle R/Z."""
        bits = self.address
        return Fraction(int(bits, 2), 2 ** len(bits)) if bits else Fraction(0)


def orbit_to_depth(box: MarkedBox, d: int):
    """Breadth-first nested expansion of the seed edge and its i-flip."""
    if d > MAX_DEPTH:
        raise DepthTooLarge(f"depth {d} exceeds {MAX_DEPTH}")
    level = [OrbitNode((), box, "0"), OrbitNode(("i",), op_i(box), "1")]
    out = list(level)
    for _ in range(d):
        nxt = []
        for node in level:
            nxt.append(OrbitNode(node.word + ("t1",), op_tau1(node.box), node.address + "0"))
            nxt.append(OrbitNode(node.word + ("t2",), op_tau2(node.box), node.address + "1"))
        level = nxt
        out += level
    return out


def curve_points(box: MarkedBox, d: int):
    """Marked points of the depth-d orbit in circular order (2^(d+1) points)."""
    if d > MAX_DEPTH:
        raise DepthTooLarge(f"depth {d} exceeds {MAX_DEPTH}")
    exact = all(p.exact for p in box.points())
    if not exact:
        arr = curve_array(box, d)
        cls = type(box.A2)
        return [cls(v) for v in arr]
    pts = []
    for seed in (box, op_i(box)):
        level = [seed]
        for _ in range(d):
            level = [c for b in level for c in (op_tau1(b), op_tau2(b))]
        pts += [b.A2 for b in level]
    return pts


# vectorised float version: boxes as (N, 6, 3) arrays in tuple order


def _vnorm(v):
    return v / np.abs(v).max(axis=-1, keepdims=True)


def _vjoin(p, q):
    return _vnorm(np.cross(p, q))


def _vchildren(boxes):
    A1, A3, B3, B1, A2, B2 = (boxes[:, k] for k in range(6))
    c1 = _vjoin(_vjoin(A1, B2), _vjoin(A2, B1))
    c2 = _vjoin(_vjoin(A1, B3), _vjoin(A3, B1))
    c3 = _vjoin(_vjoin(A2, B3), _vjoin(A3, B2))
    left = np.stack([A1, A3, c3, c1, A2, c2], axis=1)
    right = np.stack([c1, c3, B3, B1, c2, B2], axis=1)
    # interleave so that the children of box k sit at 2k, 2k+1
    out = np.empty((2 * len(boxes), 6, 3))
    out[0::2] = left
    out[1::2] = right
    return out


def _box_array(box: MarkedBox):
    return _vnorm(np.array([[complex(x).real for x in p.coords] for p in box.points()], dtype=float))


def arc_array(box: MarkedBox, d: int, arc: int = 0) -> np.ndarray:
    """Tops of the depth-d descendants along one arc, plus the closing bottom."""
    seed = box if arc == 0 else op_i(box)
    level = _box_array(seed)[None]
    for _ in range(d):
        level = _vchildren(level)
    return np.concatenate([level[:, 4], level[-1:, 5]])


def curve_array(box: MarkedBox, d: int) -> np.ndarray:
    """Float homogeneous coordinates of curve_points, shape (2^(d+1), 3)."""
    if d > MAX_DEPTH:
        raise DepthTooLarge(f"depth {d} exceeds {MAX_DEPTH}")
    return np.concatenate([arc_array(box, d, 0)[:-1], arc_array(box, d, 1)[:-1]])


def _labelled_coords(box: MarkedBox):
    inv = to_unit_square(box)
    return inv(box.A2).affine()[0], inv(box.B2).affine()[0]


def _renorm_table(x, y):
    """Children of the unit-square boxes reachable from [x, y].

    Every box of the orbit is M(U) for a unit-square box U whose labelled
    coordinates are one of (x,y), (1-x,1-y), (1-y,x), (y,1-x).  Returns the
    matrices N[s, c] with child_c(U_s) = N[s, c](U_next[s, c]) and the state
    table itself.
    """
    cands = [(x, y), (1 - x, 1 - y), (1 - y, x), (y, 1 - x)]
    n_mat = np.zeros((4, 2, 3, 3))
    nxt = np.zeros((4, 2), dtype=int)
    for s, (u, v) in enumerate(cands):
        unit = box_from_coords(u, v)
        for c, op in enumerate((op_tau1, op_tau2)):
            ch = op(unit)
            m = np.array(collineation_from_frames(UNIT_FRAME, ch.points()[:4]).m, dtype=float)
            n_mat[s, c] = m / np.abs(m).max()
            cx, cy = (float(t) for t in _labelled_coords(ch))
            dist = [abs(cx - float(p)) + abs(cy - float(q)) for p, q in cands]
            nxt[s, c] = int(np.argmin(dist))
            if min(dist) > 1e-9:
                raise NotFound("child coordinates left the expected state set")
    return n_mat, nxt, np.array([[float(p), float(q)] for p, q in cands])


def sample_arc(box: MarkedBox, gap: float, arc: int = 0, chart: str = "affine", max_depth: int = 2000):
    """Adaptively refined points of one arc of the Pappus curve.

    A node is refined until its top and bottom are within ``gap`` of each
    other in the chart (affine plane of the seed's unit square, or chordal
    distance on S^2 for ``elliptic``).  Nodes are kept as matrix times a
    unit-square box, so deep levels stay well conditioned.
    """
    seed = box if arc == 0 else op_i(box)
    x, y = _labelled_coords(seed)
    n_mat, nxt, st = _renorm_table(x, y)
    k = np.array(to_unit_square(box).m, dtype=float)
    m0 = np.array(collineation_from_frames(UNIT_FRAME, seed.points()[:4]).m, dtype=float)
    mats = (k @ m0)[None] / np.abs(k @ m0).max()
    states = np.zeros(1, dtype=int)

    def project(h):
        if chart == "affine":
            return h[:, :2] / h[:, 2:3]
        u = h / np.linalg.norm(h, axis=1, keepdims=True)
        return u * np.where(u[:, 2:3] < 0, -1.0, 1.0)

    out = []
    for _ in range(max_depth):
        n = len(states)
        top = np.einsum("nij,nj->ni", mats, np.column_stack([st[states, 0], np.ones(n), np.ones(n)]))
        bot = np.einsum("nij,nj->ni", mats, np.column_stack([st[states, 1], np.zeros(n), np.ones(n)]))
        pt, pb = project(top), project(bot)
        done = np.linalg.norm(pt - pb, axis=1) <= gap
        out += [pt[done], pb[done]]
        mats, states = mats[~done], states[~done]
        if not len(states):
            break
        mats = np.concatenate([mats @ n_mat[states, 0], mats @ n_mat[states, 1]])
        states = np.concatenate([nxt[states, 0], nxt[states, 1]])
        mats /= np.abs(mats).max(axis=(1, 2), keepdims=True)
    return np.concatenate(out)


def chart_points(box: MarkedBox, depth: int, chart: str = "affine") -> np.ndarray:
    """Curve points resolved to 2^-depth in a fixed chart.

    ``affine``: the seed arc in the chart taking the seed box to the unit
    square (the arc stays inside the box).  ``elliptic``: the whole closed
    curve as unit vectors on S^2 (upper hemisphere representatives).
    """
    if chart == "affine":
        return sample_arc(box, 2.0 ** -depth, 0, "affine")
    if chart == "elliptic":
        return np.concatenate([sample_arc(box, 2.0 ** -depth, a, "elliptic") for a in (0, 1)])
    raise ValueError(f"unknown chart {chart!r}")


@dataclass
class DimensionEstimate:
    dimension: float
    scales: list
    counts: list
    chart: str = "affine"

    def to_dict(self):
        return {"dimension": self.dimension, "chart": self.chart,
                "scales": self.scales, "counts": self.counts}


def box_counts(points: np.ndarray, scales) -> list:
    """Occupied cells of the grid anchored at the lower-left corner.

    Cells are half-open except the last one on each axis, so points on the
    upper edge do not open an extra row.
    """
    pts = np.asarray(points, dtype=float)
    lo = pts.min(axis=0)
    span = pts.max(axis=0) - lo
    out = []
    for eps in scales:
        # the relative slack absorbs rounding in points meant to sit on the edge
        ncell = np.maximum(np.ceil(span / eps * (1 - 1e-9)).astype(np.int64), 1)
        cells = np.minimum(np.floor((pts - lo) / eps).astype(np.int64), ncell - 1)
        key = cells[:, 0]
        for j in range(1, cells.shape[1]):
            key = key * int(ncell[j]) + cells[:, j]
        out.append(len(np.unique(key)))
    return out


def default_scales(points: np.ndarray, kmin: int = 2, fill: float = 0.25) -> list:
    """Dyadic scales 2^-k, stopping before the count approaches the sample size."""
    pts = np.asarray(points, dtype=float)
    span = float((pts.max(axis=0) - pts.min(axis=0)).max())
    if span == 0:
        raise DegenerateScaleRange("all points coincide")
    scales = []
    k = kmin
    while k < 60:
        eps = span * (1 + 1e-9) * 2.0 ** -k
        if box_counts(pts, [eps])[0] > fill * len(pts):
            break
        scales.append(eps)
        k += 1
    return scales


def box_dimension(points, scales=None, chart: str = "affine") -> DimensionEstimate:
    """Least-squares slope of log N(eps) against log(1/eps)."""
    pts = np.asarray(points, dtype=float)
    if len(pts) < 1000:
        raise TooFewPoints(f"box counting needs >= 1000 points, got {len(pts)}")
    if scales is None:
        scales = default_scales(pts)
    scales = [float(s) for s in scales]
    if len(scales) < 2 or len(set(scales)) < 2:
        raise DegenerateScaleRange("need at least two distinct scales")
    counts = box_counts(pts, scales)
    if len(set(counts)) < 2:
        raise DegenerateScaleRange("box counts do not vary over the scale range")
    slope = np.polyfit(np.log(1 / np.array(scales)), np.log(counts), 1)[0]
    return DimensionEstimate(float(slope), scales, counts, chart)


def pappus_dimension(x, y, depth: int = 14, chart: str = "affine") -> DimensionEstimate:
    """Box dimension of the Pappus curve of [x, y].

    Points are resolved to 2^-depth and counted on the dyadic scales
    2^-2 .. 2^-(depth-2).
    """
    pts = chart_points(box_from_coords(x, y), depth, chart)
    scales = [2.0 ** -k for k in range(2, depth - 1)]
    return box_dimension(pts, scales, chart)


def dimension_sweep(n: int = 9, depth: int = 12, chart: str = "affine"):
    """Estimates on the n x n grid [x, y] = [k/(n+1), l/(n+1)]."""
    rows = []
    for k in range(1, n + 1):
        for l in range(1, n + 1):
            x, y = Fraction(k, n + 1), Fraction(l, n + 1)
            est = pappus_dimension(x, y, depth, chart)
            rows.append({"x": float(x), "y": float(y), "estimate": est.dimension, "scales": est.scales})
    return rows


def transversality_check(box: MarkedBox, depth: int = 8, sample_depth: int = 3):
    """Crossings of sampled top lines with the lifted closed curve.

    Each top line of the orbit should meet the curve exactly once, so every
    returned count is expected to be 1.
    """
    curve = curve_array(box, depth)
    unit = curve / np.linalg.norm(curve, axis=1, keepdims=True)
    counts = []
    for node in orbit_to_depth(box, sample_depth):
        line = np.array([complex(x).real for x in node.box.a.coords], dtype=float)
        line = line / np.linalg.norm(line)
        # start the loop at the point farthest from the line, then lift it
        # continuously to S^2 and close it up
        k0 = int(np.argmax(np.abs(unit @ line)))
        lift = np.roll(unit, -k0, axis=0)
        for k in range(1, len(lift)):
            if lift[k] @ lift[k - 1] < 0:
                lift[k] = -lift[k]
        end = -lift[0] if lift[-1] @ lift[0] < 0 else lift[0]
        v = np.append(lift @ line, end @ line)
        sgn = np.where(np.abs(v) <= 1e-12, 0, np.sign(v))
        counts.append(_crossings(sgn))
    return counts


def _crossings(sgn) -> int:
    """Sign changes of a sequence, a run of zeros counting as one meeting."""
    out, prev, in_zero = 0, sgn[0], False
    for s in sgn[1:]:
        if s == 0:
            in_zero = True
            continue
        if s != prev or in_zero:
            out += 1
        prev, in_zero = s, False
    return out
