"""Scalar backends.

Exact rationals are plain ``int``/``Fraction``.  Two quadratic extensions are
provided for the places that need an algebraic unit: Gaussian rationals
``Q(i)`` and Eisenstein rationals ``Q(w)`` with ``w**2 = -1 - w``.  Floats and
complex floats are used as-is and every predicate on them takes a relative
tolerance.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

DEFAULT_EPS = 1e-9


class QuadExt:
    """Element ``u + v*theta`` of ``Q(theta)`` where ``theta**2 = P + Q*theta``."""

    __slots__ = ("u", "v")
    P: Fraction = Fraction(0)
    Q: Fraction = Fraction(0)
    NAME = "theta"

    def __init__(self, u=0, v=0):
        self.u = Fraction(u)
        self.v = Fraction(v)

    def _coerce(self, other):
        if isinstance(other, type(self)):
            return other
        if isinstance(other, (int, Fraction)):
            return type(self)(other, 0)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return type(self)(self.u + other.u, self.v + other.v)

    __radd__ = __add__

    def __neg__(self):
        return type(self)(-self.u, -self.v)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return type(self)(self.u - other.u, self.v - other.v)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.u, self.v, other.u, other.v
        bd = b * d
        return type(self)(a * c + bd * self.P, a * d + b * c + bd * self.Q)

    __rmul__ = __mul__

    def conjugate(self):
        # image under theta -> Q - theta
        return type(self)(self.u + self.v * self.Q, -self.v)

    def norm(self) -> Fraction:
        return self.u * self.u + self.u * self.v * self.Q - self.v * self.v * self.P

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in " + type(self).__name__)
        c = self * other.conjugate()
        return type(self)(c.u / n, c.v / n)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return type(self)(1) / self ** (-k)
        out, base = type(self)(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self.u == other.u and self.v == other.v

    def __hash__(self):
        if self.v == 0:
            return hash(self.u)
        return hash((type(self).__name__, self.u, self.v))

    def __bool__(self):
        return bool(self.u) or bool(self.v)

    def __complex__(self):
        return complex(self.u) + complex(self.v) * self.theta_value()

    @classmethod
    def theta_value(cls) -> complex:
        disc = complex(cls.Q * cls.Q + 4 * cls.P)
        return (complex(cls.Q) + disc ** 0.5) / 2

    def __repr__(self):
        return f"{type(self).__name__}({self.u}, {self.v})"

    def __str__(self):
        if self.v == 0:
            return str(self.u)
        return f"{self.u}+{self.v}*{self.NAME}"


class GaussianRational(QuadExt):
    """``Q(i)``."""

    __slots__ = ()
    P = Fraction(-1)
    Q = Fraction(0)
    NAME = "i"

    @classmethod
    def theta_value(cls) -> complex:
        return 1j


class EisensteinRational(QuadExt):
    """``Q(w)`` with ``w`` a primitive cube root of unity, ``w**2 = -1 - w``."""

    __slots__ = ()
    P = Fraction(-1)
    Q = Fraction(-1)
    NAME = "w"

    @classmethod
    def theta_value(cls) -> complex:
        return complex(-0.5, math.sqrt(3) / 2)


I = GaussianRational(0, 1)
OMEGA = EisensteinRational(0, 1)


def is_exact(x) -> bool:
    return isinstance(x, (int, Rational, QuadExt)) and not isinstance(x, bool)


def all_exact(xs) -> bool:
    return all(is_exact(x) for x in xs)


def magnitude(x) -> float:
    """abs() that also works on the quadratic extensions."""
    if isinstance(x, QuadExt):
        return abs(complex(x))
    return abs(x)


def is_zero(x, scale: float = 1.0, eps: float = DEFAULT_EPS) -> bool:
    """Zero test: exact for exact scalars, ``|x| <= eps*scale`` otherwise."""
    if is_exact(x):
        return x == 0
    return abs(x) <= eps * scale


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


def fmt_scalar(x) -> str:
    """Lossless decimal string: rationals as ``p/q``, floats via repr."""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, QuadExt):
        return str(x)
    if isinstance(x, complex):
        return f"{x.real!r}{x.imag:+}j"
    return repr(float(x))
