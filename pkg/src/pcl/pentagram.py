"""Diagonal maps T_k on polygons and the inscribed-polygon theorems.

T_k sends points p_1..p_n to the lines (p_i p_{i+k}).  On a polygon of
lines it returns the points l_{i-k} & l_i, which is what makes T_k o T_k the
identity on the nose rather than up to a shift.  Words are applied right to
left: [2, 1, 2] is T_2 o T_1 o T_2.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import geom
from .geom import Line, Point, find_equivalence, join
from .dsl import trial_rng
from .report import EXHAUSTED, FALSIFIED, VerificationReport


class DegenerateDiagonal(ValueError):
    pass


class RepeatedParam(ValueError):
    pass


@dataclass(frozen=True)
class Polygon:
    elems: tuple

    def __post_init__(self):
        object.__setattr__(self, "elems", tuple(self.elems))

    @property
    def n(self) -> int:
        return len(self.elems)

    @property
    def space(self) -> str:
        return "plane" if isinstance(self.elems[0], Point) else "dual"

    def __getitem__(self, i):
        return self.elems[i % self.n]

    def __iter__(self):
        return iter(self.elems)

    def shifted(self, k: int) -> "Polygon":
        return Polygon(self.elems[k % self.n:] + self.elems[:k % self.n])

    def relabeled(self, sigma) -> "Polygon":
        """q_i = p_{sigma(i)}."""
        return Polygon(self[sigma(i)] for i in range(self.n))


def t_map(P: Polygon, k: int) -> Polygon:
    if P.n < 4:
        raise ValueError("diagonal maps need n >= 4")
    try:
        if P.space == "plane":
            return Polygon(join(P[i], P[i + k]) for i in range(P.n))
        return Polygon(join(P[i - k], P[i]) for i in range(P.n))
    except geom.GeometryError as e:
        raise DegenerateDiagonal(f"T_{k}: {e}") from None


def parse_word(word):
    if isinstance(word, str):
        return [int(ch) for ch in word]
    return list(word)


def t_word(P: Polygon, word) -> Polygon:
    for k in reversed(parse_word(word)):
        P = t_map(P, k)
    return P


def _check_params(params):
    if len(set(params)) != len(params):
        raise RepeatedParam("conic parameters must be distinct")


def inscribed_ngon(params) -> Polygon:
    """Vertices (1-t^2 : 2t : 1+t^2) on x^2 + y^2 = z^2."""
    _check_params(params)
    if len(params) < 3:
        raise ValueError("need n >= 3")
    return Polygon(geom.rational_conic_point(t) for t in params)


def circumscribed_ngon(params) -> Polygon:
    """Polygon whose sides are the tangents at the given parameters."""
    _check_params(params)
    if len(params) < 3:
        raise ValueError("need n >= 3")
    tans = [geom.tangent_at(t) for t in params]
    n = len(tans)
    return Polygon(geom.meet(tans[i - 1], tans[i]) for i in range(n))


def _fits_conic(elems) -> bool:
    if len(elems) < 5:
        return True
    c = geom.conic_through_five(elems[:5])
    return all(c.contains(e) for e in elems[5:])


def is_inscribed(P: Polygon) -> bool:
    """All elements on one conic (tangent to one, for a polygon of lines)."""
    return _fits_conic(list(P))


def is_circumscribed(P: Polygon) -> bool:
    return is_inscribed(t_map(P, 1)) if P.n >= 4 else True


def is_inscribed_degenerate(P: Polygon) -> bool:
    """All elements on a pair of lines (through a pair of points, dually)."""
    el = list(P)
    if len(el) < 3:
        return True
    # one of the two lines carries two of the first three elements
    for i, j in itertools.combinations(range(3), 2):
        try:
            l1 = join(el[i], el[j])
        except geom.GeometryError:
            continue
        rest = [e for e in el if not geom.incident(e, l1)]
        if len(rest) <= 2 or all(geom.collinear(rest[0], rest[1], r) for r in rest[2:]):
            return True
    return False


# -- random generators -----------------------------------------------------


def random_params(n, rng, bound: int = 12):
    """n distinct sorted rationals with small numerators and denominators."""
    out = set()
    while len(out) < n:
        out.add(Fraction(int(rng.integers(-bound * bound, bound * bound + 1)), int(rng.integers(1, bound + 1))))
    return sorted(out)


def random_degenerate_ngon(n, rng, bound: int = 30) -> Polygon:
    """Vertices alternating between two random lines."""
    while True:
        l1, l2 = (Line(*(int(v) for v in rng.integers(-bound, bound + 1, size=3))) for _ in range(2))
        if l1 != l2:
            break
    pts = []
    for i in range(n):
        line = l1 if i % 2 == 0 else l2
        u, v = _basis(line)
        s, t = (int(x) for x in rng.integers(-bound, bound + 1, size=2))
        pts.append(Point(tuple(s * a + t * b for a, b in zip(u, v))) if (s or t) else Point(u))
    return Polygon(pts)


def _basis(line):
    from .linalg import cross, identity
    cands = [cross(tuple(line), e) for e in identity(3)]
    cands = [c for c in cands if any(x != 0 for x in c)]
    u = cands[0]
    return u, next(c for c in cands[1:] if not geom.proportional(u, c))


def random_polygon(n, rng, bound: int = 100) -> Polygon:
    return Polygon(Point(*(int(v) for v in rng.integers(-bound, bound + 1, size=2)), 1) for _ in range(n))


# -- theorem drivers -------------------------------------------------------


@dataclass(frozen=True)
class TheoremSpec:
    n: int
    kind: str  # generator: inscribed / circumscribed / degenerate / generic
    word: str
    check: str  # equiv / circumscribed / inscribed / degenerate / pentagon


THEOREMS = {
    "6-T2": TheoremSpec(6, "inscribed", "2", "equiv"),
    "7-T212": TheoremSpec(7, "inscribed", "212", "equiv"),
    "8-T21212": TheoremSpec(8, "inscribed", "21212", "equiv"),
    "9c-T313": TheoremSpec(9, "circumscribed", "313", "equiv"),
    "12-T3434343": TheoremSpec(12, "inscribed", "3434343", "equiv"),
    "8-T3-circ": TheoremSpec(8, "inscribed", "3", "circumscribed"),
    "10-T313-circ": TheoremSpec(10, "inscribed", "313", "circumscribed"),
    "12-T31313-circ": TheoremSpec(12, "inscribed", "31313", "circumscribed"),
    "pentagon-T2": TheoremSpec(5, "generic", "2", "pentagon"),
    "12-T535353-relabel": TheoremSpec(12, "inscribed", "535353", "inscribed"),
    "degen-4n": TheoremSpec(8, "degenerate", "12121", "degenerate"),
}


def degen_word(n: int) -> str:
    """T_1 T_2 T_1 ... T_1 with 4n - 3 letters."""
    return "".join("1" if i % 2 == 0 else "2" for i in range(4 * n - 3))


def theorem_ids():
    return list(THEOREMS)


def _generate(spec: TheoremSpec, n: int, rng) -> Polygon:
    if spec.kind == "inscribed":
        return inscribed_ngon(random_params(n, rng))
    if spec.kind == "circumscribed":
        return circumscribed_ngon(random_params(n, rng))
    if spec.kind == "degenerate":
        return random_degenerate_ngon(n, rng)
    return random_polygon(n, rng)


def check_trial(spec: TheoremSpec, P: Polygon, word: str):
    """Returns (holds, info) for one polygon."""
    Q = t_word(P, word)
    if spec.check == "equiv":
        return _equiv_info(P, Q)
    if spec.check == "circumscribed":
        return is_circumscribed(Q), {}
    if spec.check == "inscribed":
        return is_inscribed(Q), {}
    if spec.check == "degenerate":
        return is_inscribed_degenerate(P) and is_inscribed_degenerate(Q), {}
    # pentagon: inscribed, circumscribed and self-dual under T_2
    sides = t_map(P, 1)
    geom.conic_through_five(list(P))
    geom.conic_through_five(list(sides))
    return _equiv_info(P, Q)


def _equiv_info(P: Polygon, Q: Polygon):
    eq = find_equivalence(list(P), list(Q), allow_dual=True)
    if eq is None:
        return False, {}
    # re-check the matrix vertex by vertex, independently of the search
    lab = eq.labeling(P.n)
    ok = all(geom.proportional(eq.collineation.apply_coords(tuple(P[i])), tuple(Q[lab[i]])) for i in range(P.n))
    return ok, {"shift": eq.shift, "reflected": eq.reflected, "matrix": eq.collineation}


def run_pentagram_theorem(theorem_id: str, trials: int = 10, seed: int = 0, n: int | None = None,
                          max_resamples: int = 100) -> VerificationReport:
    """Verify one theorem on random rational polygons (exact arithmetic).

    For ``degen-4n`` the optional ``n`` is the multiplier (polygon has 4n
    vertices, word has 4n - 3 letters).
    """
    if theorem_id not in THEOREMS:
        raise KeyError(f"unknown theorem {theorem_id!r}; known: {', '.join(THEOREMS)}")
    spec = THEOREMS[theorem_id]
    size, word = spec.n, spec.word
    name = theorem_id
    if theorem_id == "degen-4n":
        mult = 2 if n is None else n
        size, word = 4 * mult, degen_word(mult)
        name = f"degen-4n(n={mult})"
    rep = VerificationReport(name, seed, trials)
    rep.details["word"] = word
    rep.details["n"] = size
    infos = []
    for t in range(trials):
        rng = trial_rng(seed, t)
        for _ in range(max_resamples):
            P = _generate(spec, size, rng)
            try:
                ok, info = check_trial(spec, P, word)
                break
            except (geom.GeometryError, DegenerateDiagonal, RepeatedParam):
                continue
        else:
            rep.verdict = EXHAUSTED
            return rep
        rep.trials_completed = t + 1
        rep.max_residuals.append(0 if ok else 1)
        infos.append(info)
        if not ok:
            rep.verdict = FALSIFIED
            rep.witness = {"trial": t, "polygon": list(P)}
            break
    rep.details["trials"] = infos
    return rep
