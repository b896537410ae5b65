"""Small dense linear algebra over generic scalars.

Everything here works on tuples/lists of ``int``/``Fraction``/``QuadExt``
(decided exactly) as well as floats and complex floats (decided with a
relative tolerance and partial pivoting).
"""
from __future__ import annotations

from fractions import Fraction

from .scalars import DEFAULT_EPS, all_exact, magnitude


def _lift(a, exact):
    # ints would turn into floats under "/"
    if exact:
        return [[Fraction(x) if isinstance(x, int) else x for x in r] for r in a]
    return a


def cross(a, b):
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def det3(a, b, c):
    return dot(a, cross(b, c))


def max_norm(v) -> float:
    return max((magnitude(x) for x in v), default=0.0)


def matvec(m, v):
    return tuple(sum(r[j] * v[j] for j in range(len(v))) for r in m)


def matmul(a, b):
    cols = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)


def transpose(m):
    return tuple(tuple(r) for r in zip(*m))


def identity(n: int):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def adjugate3(m):
    """Adjugate of a 3x3 matrix; ``m @ adj(m) = det(m) * I``."""
    c0 = cross(m[1], m[2])
    c1 = cross(m[2], m[0])
    c2 = cross(m[0], m[1])
    # columns of the adjugate are the cross products of rows
    return transpose((c0, c1, c2))


def det3m(m):
    return det3(m[0], m[1], m[2])


def _pivot(col_vals, exact: bool):
    if exact:
        for i, x in col_vals:
            if x != 0:
                return i
        return None
    best, best_mag = None, 0.0
    for i, x in col_vals:
        mg = magnitude(x)
        if mg > best_mag:
            best, best_mag = i, mg
    return best


def row_reduce(rows, eps: float = DEFAULT_EPS):
    """Reduced row echelon form. Returns (rref_rows, pivot_columns)."""
    a = [list(r) for r in rows]
    if not a:
        return a, []
    flat = [x for r in a for x in r]
    exact = all_exact(flat)
    a = _lift(a, exact)
    scale = max_norm(flat) or 1.0
    m, n = len(a), len(a[0])
    pivots = []
    r = 0
    for c in range(n):
        if r >= m:
            break
        p = _pivot([(i, a[i][c]) for i in range(r, m)], exact)
        if p is None:
            continue
        if not exact and magnitude(a[p][c]) <= eps * scale:
            for i in range(r, m):
                a[i][c] = 0.0
            continue
        a[r], a[p] = a[p], a[r]
        pv = a[r][c]
        a[r] = [x / pv for x in a[r]]
        for i in range(m):
            if i != r:
                f = a[i][c]
                if (f != 0) if exact else magnitude(f) > 0:
                    a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(rows, eps: float = DEFAULT_EPS) -> int:
    return len(row_reduce(rows, eps)[1])


def nullspace(rows, eps: float = DEFAULT_EPS):
    """Basis of the right null space (list of vectors)."""
    red, pivots = row_reduce(rows, eps)
    n = len(rows[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * n
        v[f] = 1
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][f]
        basis.append(tuple(v))
    return basis


def det(m):
    """Determinant by fraction-free-ish elimination (exact or partial pivoting)."""
    a = [list(r) for r in m]
    n = len(a)
    exact = all_exact([x for r in a for x in r])
    a = _lift(a, exact)
    sign = 1
    out = 1
    for c in range(n):
        p = _pivot([(i, a[i][c]) for i in range(c, n)], exact)
        if p is None or (not exact and magnitude(a[p][c]) == 0):
            return 0 if exact else 0.0
        if p != c:
            a[c], a[p] = a[p], a[c]
            sign = -sign
        pv = a[c][c]
        out = out * pv
        for i in range(c + 1, n):
            f = a[i][c] / pv
            if f != 0:
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return out * sign


def solve(m, b, eps: float = DEFAULT_EPS):
    """Solve the square system ``m x = b``; raises ValueError if singular."""
    rows = [list(r) + [bi] for r, bi in zip(m, b)]
    red, pivots = row_reduce(rows, eps)
    n = len(m)
    if pivots != list(range(n)):
        raise ValueError("singular system")
    return tuple(red[i][n] for i in range(n))
