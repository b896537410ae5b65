"""Deterministic SVG output for scenes in an affine chart.

Coordinates are printed with six decimals and elements come out in the
order they were added, so equal scenes give byte-identical files.  Lines are
clipped to the viewport; conics are drawn as 256-sample polylines.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

CONIC_SAMPLES = 256
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22")


def fnum(x) -> str:
    s = f"{float(x):.6f}"
    return "0.000000" if s == "-0.000000" else s


@dataclass
class Scene:
    viewport: tuple = (-1.0, 1.0, -1.0, 1.0)  # xmin, xmax, ymin, ymax
    width: int = 600
    title: str = ""
    items: list = field(default_factory=list)

    # -- chart ---------------------------------------------------------

    @property
    def scale(self) -> float:
        xmin, xmax, ymin, ymax = self.viewport
        return self.width / max(xmax - xmin, ymax - ymin)

    @property
    def height(self) -> float:
        xmin, xmax, ymin, ymax = self.viewport
        return (ymax - ymin) * self.scale

    def to_px(self, x, y):
        xmin, _, _, ymax = self.viewport
        s = self.scale
        return (x - xmin) * s, (ymax - y) * s

    def chart(self) -> dict:
        xmin, _, _, ymax = self.viewport
        s = self.scale
        return {"chart": "affine z=1", "viewport": [fnum(v) for v in self.viewport],
                "px_from_xy": [[fnum(s), "0.000000", fnum(-xmin * s)], ["0.000000", fnum(-s), fnum(ymax * s)]]}

    def inside(self, x, y, slack: float = 0.0) -> bool:
        xmin, xmax, ymin, ymax = self.viewport
        wx, wy = slack * (xmax - xmin), slack * (ymax - ymin)
        return xmin - wx <= x <= xmax + wx and ymin - wy <= y <= ymax + wy

    # -- elements ------------------------------------------------------

    def point(self, xy, color: str = "#000000", r: float = 3.0, cls: str = "point"):
        self.items.append(("point", (float(xy[0]), float(xy[1])), {"fill": color, "r": r, "class": cls}))

    def segment(self, p, q, color: str = "#555555", width: float = 1.0, cls: str = "segment"):
        self.items.append(("segment", ((float(p[0]), float(p[1])), (float(q[0]), float(q[1]))),
                           {"stroke": color, "width": width, "class": cls}))

    def line(self, abc, color: str = "#555555", width: float = 1.0, cls: str = "line") -> bool:
        """Line ax + by + c = 0, clipped to the viewport.  False if it misses."""
        seg = clip_line(abc, self.viewport)
        if seg is None:
            return False
        self.segment(seg[0], seg[1], color, width, cls)
        return True

    def polyline(self, pts, color: str = "#555555", width: float = 1.0, closed: bool = False, cls: str = "polyline"):
        pts = [(float(x), float(y)) for x, y in pts]
        if len(pts) >= 2:
            self.items.append(("polyline", pts, {"stroke": color, "width": width, "closed": closed, "class": cls}))

    def conic(self, M, color: str = "#888888", width: float = 1.0, cls: str = "conic"):
        for run, closed in sample_conic(M):
            self.polyline(run, color, width, closed=closed, cls=cls)

    def ellipse(self, center, a, b, color: str = "#888888", width: float = 1.0, cls: str = "conic"):
        t = np.linspace(0, 2 * math.pi, CONIC_SAMPLES, endpoint=False)
        pts = np.column_stack([center[0] + a * np.cos(t), center[1] + b * np.sin(t)])
        self.polyline(pts.tolist(), color, width, closed=True, cls=cls)

    def circle(self, center, r, color: str = "#888888", width: float = 1.0, cls: str = "circle"):
        self.ellipse(center, r, r, color, width, cls)

    def count(self, kind: str, cls: str | None = None) -> int:
        return sum(1 for k, _, st in self.items if k == kind and (cls is None or st["class"] == cls))

    # -- output --------------------------------------------------------

    def render(self) -> str:
        W, H = fnum(self.width), fnum(self.height)
        out = ['<?xml version="1.0" encoding="UTF-8"?>',
               f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
               f"<metadata>{json.dumps(self.chart(), sort_keys=True)}</metadata>"]
        if self.title:
            out.append(f"<title>{_esc(self.title)}</title>")
        out.append(f'<defs><clipPath id="view"><rect x="0" y="0" width="{W}" height="{H}"/></clipPath></defs>')
        out.append('<g clip-path="url(#view)">')
        for kind, data, st in self.items:
            out.append(self._element(kind, data, st))
        out.append("</g>")
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def _element(self, kind, data, st) -> str:
        if kind == "point":
            x, y = self.to_px(*data)
            return f'<circle class="{st["class"]}" cx="{fnum(x)}" cy="{fnum(y)}" r="{fnum(st["r"])}" fill="{st["fill"]}"/>'
        if kind == "segment":
            (x1, y1), (x2, y2) = (self.to_px(*p) for p in data)
            return (f'<line class="{st["class"]}" x1="{fnum(x1)}" y1="{fnum(y1)}" x2="{fnum(x2)}" y2="{fnum(y2)}" '
                    f'stroke="{st["stroke"]}" stroke-width="{fnum(st["width"])}"/>')
        pts = " ".join(f"{fnum(x)},{fnum(y)}" for x, y in (self.to_px(*p) for p in data))
        tag = "polygon" if st["closed"] else "polyline"
        return (f'<{tag} class="{st["class"]}" points="{pts}" fill="none" stroke="{st["stroke"]}" '
                f'stroke-width="{fnum(st["width"])}"/>')

    def write(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.render())


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def clip_line(abc, viewport):
    """Endpoints of the part of ax + by + c = 0 inside the box, or None."""
    a, b, c = (float(v) for v in abc)
    xmin, xmax, ymin, ymax = viewport
    if a == 0 and b == 0:
        return None
    hits = []
    if b != 0:
        for x in (xmin, xmax):
            y = -(a * x + c) / b
            if ymin <= y <= ymax:
                hits.append((x, y))
    if a != 0:
        for y in (ymin, ymax):
            x = -(b * y + c) / a
            if xmin <= x <= xmax:
                hits.append((x, y))
    if len(hits) < 2:
        return None
    # the two hits furthest apart (corners can repeat)
    best = max(((p, q) for i, p in enumerate(hits) for q in hits[i + 1:]),
               key=lambda pq: math.dist(pq[0], pq[1]))
    if math.dist(*best) == 0:
        return None
    return best


def _conic_point(M):
    """Some real affine point of the conic, or None."""
    for d in ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, -1.0)):
        for y0 in (0.0, 1.0, -1.0):
            P = np.array([0.0, y0, 1.0]) if d[0] else np.array([y0, 0.0, 1.0])
            D = np.array([d[0], d[1], 0.0])
            qa, qb, qc = D @ M @ D, 2 * P @ M @ D, P @ M @ P
            if abs(qa) < 1e-15:
                continue
            disc = qb * qb - 4 * qa * qc
            if disc >= 0:
                t = (-qb + math.sqrt(disc)) / (2 * qa)
                return P + t * D
    return None


def sample_conic(M, samples: int = CONIC_SAMPLES):
    """Affine polylines of the conic as (points, closed) pairs.

    The pencil of lines through one point of the conic cuts it once more, so
    one sweep of directions covers the curve.  Runs are split where the
    curve passes through infinity; an ellipse comes back as one closed run.
    """
    M = np.asarray(M, dtype=float)
    M = (M + M.T) / 2
    P0 = _conic_point(M)
    if P0 is None:
        return []
    runs, cur, prev, broke, first = [], [], 0, False, None
    for th in np.linspace(0.0, math.pi, samples, endpoint=False):
        D = np.array([math.cos(th), math.sin(th), 0.0])
        X = (D @ M @ D) * P0 - 2 * (P0 @ M @ D) * D
        z = float(X[2])
        finite = abs(z) >= 1e-12 * (abs(X[0]) + abs(X[1]))
        sign = int(np.sign(z)) if finite else 0
        if not finite or (prev and sign != prev):
            broke = True
            if len(cur) >= 2:
                runs.append(cur)
            cur = []
        if finite:
            cur.append((X[0] / z, X[1] / z))
        prev = sign
        first = sign if first is None else first
    if broke and runs and cur and prev == first and first != 0:
        # theta = pi is theta = 0 again: the last run continues the first
        runs[0] = cur + runs[0]
    elif len(cur) >= 2:
        runs.append(cur)
    return [(r, not broke) for r in runs]


def fit_viewport(pts, pad: float = 0.1):
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        return (-1.0, 1.0, -1.0, 1.0)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = max(float((hi - lo).max()), 1e-9)
    m = pad * span
    return (float(lo[0] - m), float(hi[0] + m), float(lo[1] - m), float(hi[1] + m))


# -- scene builders --------------------------------------------------------


def _affine(obj):
    x, y, z = (float(v) for v in obj)
    if z == 0:
        return None
    return x / z, y / z


def dsl_scene(script, vals, title: str = "") -> Scene:
    """Points, lines and conics of an evaluated script.

    Four-argument meets and joins contribute their auxiliary lines; the first
    collinear assertion is drawn highlighted.
    """
    from .dsl import SampledConic
    from .geom import Line, Point, join

    pts = [(k, _affine(v)) for k, v in vals.items() if isinstance(v, Point)]
    pts = [(k, p) for k, p in pts if p is not None]
    sc = Scene(fit_viewport([p for _, p in pts], 0.25), title=title)
    lines = []

    def add(l):
        if l not in lines:
            lines.append(l)

    for v in vals.values():
        if isinstance(v, Line):
            add(v)
    for c in script.constructions:
        args = [vals[a] for a in c.args]
        if len(args) == 4 and c.fn == "meet":
            add(join(args[0], args[1]))
            add(join(args[2], args[3]))
    hl = None
    for a in script.assertions:
        if a.kind == "collinear":
            hl = join(vals[a.args[0]], vals[a.args[1]])
            break
    for v in vals.values():
        if isinstance(v, SampledConic):
            sc.conic([[float(x) for x in r] for r in v.conic.m], color="#2ca02c")
    for l in lines:
        if l != hl:
            sc.line(tuple(l), color="#777777")
    if hl is not None:
        sc.line(tuple(hl), color="#d62728", width=2.0, cls="highlight")
    for _, p in pts:
        sc.point(p)
    return sc


def polygon_scene(before, after, title: str = "") -> Scene:
    """A polygon and its image under a word of diagonal maps."""
    from .geom import Point

    def coords(P):
        if isinstance(P[0], Point):
            return [p for p in (_affine(e) for e in P) if p is not None]
        return []

    allpts = coords(before) + coords(after)
    sc = Scene(fit_viewport(allpts, 0.2), title=title)
    for P, color in ((before, "#1f77b4"), (after, "#d62728")):
        if isinstance(P[0], Point):
            pts = coords(P)
            sc.polyline(pts, color=color, closed=True)
            for p in pts:
                sc.point(p, color=color)
        else:
            for l in P:
                sc.line(tuple(l), color=color)
    return sc


def poncelet_scene(grid, circles: bool = True, title: str = "") -> Scene:
    """Grid points coloured by concentric set, the table and caustic, and the
    circles inscribed in the grid quadrilaterals."""
    from .poncelet import reye_chasles_check

    fam = grid.family
    a0, b0 = fam.axes(0.0)
    sc = Scene(fit_viewport([(-a0, -b0), (a0, b0)] + [tuple(p) for p in grid.points.values()], 0.08),
               title=title)
    sc.ellipse((0, 0), a0, b0, color="#000000", width=1.5, cls="table")
    ac, bc = fam.axes(grid.lam)
    sc.ellipse((0, 0), ac, bc, color="#888888", cls="caustic")
    n = grid.n
    if circles:
        for i in range(n):
            A, B = grid.point(i, (i + 2) % n), grid.point((i + 1) % n, (i + 3) % n)
            try:
                rc = reye_chasles_check(fam, A, B, grid.lam)
            except (ValueError, np.linalg.LinAlgError):
                continue
            sc.circle(rc["center"], abs(rc["radius"]), color="#9467bd", width=0.7)
    for k in range(grid.concentric_count):
        seen = set()
        for i in range(n):
            key = (min(i, (i + k) % n), max(i, (i + k) % n))
            if key in seen:
                continue
            seen.add(key)
            sc.point(grid.points[key], color=PALETTE[k % len(PALETTE)], r=2.5, cls=f"P{k}")
    return sc


def curve_scene(points, title: str = "") -> Scene:
    pts = np.asarray(points, dtype=float)
    sc = Scene(fit_viewport(pts, 0.05), title=title)
    sc.polyline(pts.tolist(), color="#1f77b4", width=0.6)
    return sc
