"""Jacobi-type identities in so(3) and sl(2), exact over any field."""
from __future__ import annotations

from fractions import Fraction

from .linalg import cross, det3


class DegenerateTriangle(ValueError):
    pass


def _add(*vs):
    return tuple(sum(xs) for xs in zip(*vs))


def jacobi_residual(A, B, C):
    """(A x B) x C + (B x C) x A + (C x A) x B; zero for every input."""
    return _add(cross(cross(A, B), C), cross(cross(B, C), A), cross(cross(C, A), B))


def altitudes(A, B, C):
    """Altitude great circles of the spherical triangle ABC, as poles."""
    if det3(A, B, C) == 0:
        raise DegenerateTriangle("vertices are linearly dependent")
    return cross(cross(A, B), C), cross(cross(B, C), A), cross(cross(C, A), B)


def spherical_altitudes_check(A, B, C) -> bool:
    """The three altitudes pass through one point (exactly, on exact input)."""
    return det3(*altitudes(A, B, C)) == 0


# -- sl(2) -----------------------------------------------------------------


def sl2(a, b, c):
    """Traceless matrix [[a, b], [c, -a]] as a tuple of rows."""
    return ((a, b), (c, -a))


E = sl2(0, 1, 0)
F = sl2(0, 0, 1)
H = sl2(1, 0, 0)


def mat_mul(X, Y):
    return tuple(tuple(sum(X[i][k] * Y[k][j] for k in range(2)) for j in range(2)) for i in range(2))


def mat_sub(X, Y):
    return tuple(tuple(X[i][j] - Y[i][j] for j in range(2)) for i in range(2))


def mat_add(*Xs):
    return tuple(tuple(sum(X[i][j] for X in Xs) for j in range(2)) for i in range(2))


def bracket(X, Y):
    return mat_sub(mat_mul(X, Y), mat_mul(Y, X))


def is_zero_matrix(X) -> bool:
    return all(x == 0 for row in X for x in row)


def tomihisa_residual(F1, F2, F3, F4, F5):
    """[F1,[[F2,F3],[F4,F5]]] + [F3,[[F2,F5],[F4,F1]]] + [F5,[[F2,F1],[F4,F3]]].

    1, 3, 5 rotate while 2 and 4 stay put.
    """
    b = bracket
    return mat_add(
        b(F1, b(b(F2, F3), b(F4, F5))),
        b(F3, b(b(F2, F5), b(F4, F1))),
        b(F5, b(b(F2, F1), b(F4, F3))),
    )


def sl2_jacobi_residual(X, Y, Z):
    b = bracket
    return mat_add(b(b(X, Y), Z), b(b(Y, Z), X), b(b(Z, X), Y))


def random_rational(rng, bound: int = 50) -> Fraction:
    return Fraction(int(rng.integers(-bound, bound + 1)), int(rng.integers(1, bound + 1)))


def random_vec3(rng, bound: int = 50):
    return tuple(random_rational(rng, bound) for _ in range(3))


def random_sl2(rng, bound: int = 50):
    return sl2(*(random_rational(rng, bound) for _ in range(3)))


# -- theorem drivers -------------------------------------------------------


def _trial_jacobi(rng):
    A, B, C = (random_vec3(rng) for _ in range(3))
    return jacobi_residual(A, B, C)


def _trial_altitudes(rng):
    while True:
        A, B, C = (random_vec3(rng) for _ in range(3))
        if det3(A, B, C) != 0:
            break
    return (det3(*altitudes(A, B, C)),)


def _trial_sl2_jacobi(rng):
    X, Y, Z = (random_sl2(rng) for _ in range(3))
    return sum(sl2_jacobi_residual(X, Y, Z), ())


def _trial_tomihisa(rng):
    return sum(tomihisa_residual(*(random_sl2(rng) for _ in range(5))), ())


LIE_THEOREMS = {
    "jacobi": _trial_jacobi,
    "spherical-altitudes": _trial_altitudes,
    "sl2-jacobi": _trial_sl2_jacobi,
    "tomihisa": _trial_tomihisa,
}


def run_lie_identity(theorem_id: str, trials: int = 100, seed: int = 0):
    """Exact check of an identity on random rational inputs."""
    from .dsl import trial_rng
    from .report import FALSIFIED, VerificationReport

    if theorem_id not in LIE_THEOREMS:
        raise KeyError(f"unknown identity {theorem_id!r}; known: {', '.join(LIE_THEOREMS)}")
    rep = VerificationReport(theorem_id, seed, trials)
    for t in range(trials):
        res = LIE_THEOREMS[theorem_id](trial_rng(seed, t))
        worst = max(abs(Fraction(r)) for r in res)
        rep.max_residuals.append(worst)
        rep.trials_completed = t + 1
        if worst != 0:
            rep.verdict = FALSIFIED
            rep.witness = {"trial": t, "residual": list(res)}
            break
    return rep
