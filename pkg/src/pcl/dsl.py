"""Configuration-theorem scripts (.pcf): parser, sampler and exact verifier.

A script declares points, lines and conics, ties some of them together with
``on`` constraints, builds new objects with join/meet/pole/polar and finally
asserts incidences.  Verification samples random rational instances that
honour the constraints and checks every assertion with exact arithmetic.

Two conventions beyond the bare grammar:

* ``meet(P, Q, R, S)`` means ``meet(join(P, Q), join(R, S))`` and dually
  ``join(l, m, n, k)`` is ``join(meet(l, m), meet(n, k))``.
* constructions may appear in any order; they are evaluated in dependency
  order.
"""
from __future__ import annotations

import graphlib
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

import numpy as np

from . import geom
from . import linalg as la
from .geom import Collineation, Conic, Line, Point
from .report import EXHAUSTED, FALSIFIED, VERIFIED, VerificationReport

COORD_RANGE = 10**4
MAX_RESAMPLES = 100

KINDS = ("point", "line", "conic")
FUNCS = ("join", "meet", "pole", "polar")
ASSERTS = {"on": 2, "collinear": 3, "concurrent": 3, "conconic": 6}


class ScriptError(Exception):
    def __init__(self, msg, line=None, col=None):
        self.line, self.col = line, col
        where = f"{line}:{col}: " if line is not None else ""
        super().__init__(where + msg)


class ScriptSyntaxError(ScriptError):
    pass


class UndefinedIdentifier(ScriptError):
    pass


class CyclicDefinition(ScriptError):
    pass


class NoAssertion(ScriptError):
    pass


class ScriptTypeError(ScriptError):
    pass


class ConstructionDegenerate(Exception):
    pass


class GenericityExhausted(Exception):
    pass


@dataclass(frozen=True)
class Construct:
    name: str
    fn: str
    args: tuple
    pos: tuple


@dataclass(frozen=True)
class Assertion:
    kind: str
    args: tuple
    pos: tuple


@dataclass
class Script:
    declarations: dict  # name -> kind, in declaration order
    constraints: list  # (obj, carrier)
    constructions: list  # Construct, topologically ordered
    assertions: list
    types: dict = field(default_factory=dict)  # every identifier -> kind
    name: str = "script"


# -- parsing ---------------------------------------------------------------

_TOKEN = re.compile(r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)|(?P<punct>[(),;=])")


def _tokenize(text):
    line, start = 1, 0
    pos = 0
    toks = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ScriptSyntaxError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, start = line + 1, m.end()
        elif kind in ("ident", "punct"):
            toks.append((m.group(), line, pos - start + 1))
        pos = m.end()
    toks.append(("<eof>", line, pos - start + 1))
    return toks


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self, expect=None):
        tok = self.peek()
        if expect is not None and tok[0] != expect:
            raise ScriptSyntaxError(f"expected {expect!r}, found {tok[0]!r}", tok[1], tok[2])
        self.i += 1
        return tok

    def ident(self):
        tok = self.peek()
        if not re.match(r"[A-Za-z_]", tok[0]) or tok[0] == "<eof>":
            raise ScriptSyntaxError(f"expected identifier, found {tok[0]!r}", tok[1], tok[2])
        self.i += 1
        return tok


def parse_script(text: str, name: str = "script") -> Script:
    p = _Parser(text)
    decls, constraints, constructs, asserts = {}, [], [], []
    positions = {}
    uses = []  # (ident token) for undefined-identifier checks

    while p.peek()[0] != "<eof>":
        head = p.peek()
        word = head[0]
        if word in KINDS:
            p.take()
            names = []
            while p.peek()[0] != ";":
                tok = p.ident()
                names.append(tok)
            p.take(";")
            if not names:
                raise ScriptSyntaxError(f"empty {word} declaration", head[1], head[2])
            for tok in names:
                if tok[0] in positions:
                    raise ScriptSyntaxError(f"redefinition of {tok[0]!r}", tok[1], tok[2])
                positions[tok[0]] = tok
                decls[tok[0]] = word
        elif word == "on":
            p.take()
            a, b = p.ident(), p.ident()
            p.take(";")
            uses += [a, b]
            constraints.append((a[0], b[0]))
        elif word == "assert":
            p.take()
            kind = p.take()
            if kind[0] not in ASSERTS:
                raise ScriptSyntaxError(f"unknown assertion {kind[0]!r}", kind[1], kind[2])
            args = [p.ident() for _ in range(ASSERTS[kind[0]])]
            p.take(";")
            uses += args
            asserts.append(Assertion(kind[0], tuple(t[0] for t in args), head[1:]))
        else:
            target = p.ident()
            p.take("=")
            fn = p.take()
            if fn[0] not in FUNCS:
                raise ScriptSyntaxError(f"unknown function {fn[0]!r}", fn[1], fn[2])
            p.take("(")
            args = [p.ident()]
            while p.peek()[0] == ",":
                p.take()
                args.append(p.ident())
            p.take(")")
            p.take(";")
            if target[0] in positions:
                raise ScriptSyntaxError(f"redefinition of {target[0]!r}", target[1], target[2])
            positions[target[0]] = target
            uses += args
            constructs.append(Construct(target[0], fn[0], tuple(t[0] for t in args), target[1:]))

    for tok in uses:
        if tok[0] not in positions:
            raise UndefinedIdentifier(f"undefined identifier {tok[0]!r}", tok[1], tok[2])

    by_name = {c.name: c for c in constructs}
    graph = {c.name: {a for a in c.args if a in by_name} for c in constructs}
    try:
        order = list(graphlib.TopologicalSorter(graph).static_order())
    except graphlib.CycleError as e:
        cyc = e.args[1]
        c = by_name[cyc[0]]
        raise CyclicDefinition("cyclic definition: " + " -> ".join(cyc), *c.pos) from None
    ordered = [by_name[n] for n in order]

    if not asserts:
        tok = p.peek()
        raise NoAssertion("script has no assertion", tok[1], tok[2])

    types = dict(decls)
    for c in ordered:
        types[c.name] = _result_type(c, types)
    for a, b in constraints:
        _check_on(types[a], types[b], positions[a])
    for a in asserts:
        _check_assert(a, types)
    return Script(decls, constraints, ordered, asserts, types, name)


def _result_type(c: Construct, types) -> str:
    ts = [types[a] for a in c.args]
    err = ScriptTypeError(f"bad arguments for {c.fn}({', '.join(c.args)})", *c.pos)
    if c.fn in ("join", "meet"):
        # join of points / meet of lines, or the four-argument dual forms
        simple = "point" if c.fn == "join" else "line"
        other = "line" if simple == "point" else "point"
        if len(ts) == 2 and ts == [simple] * 2:
            return other
        if len(ts) == 4 and ts == [other] * 4:
            return other
        raise err
    if c.fn == "pole" and ts == ["line", "conic"]:
        return "point"
    if c.fn == "polar" and ts == ["point", "conic"]:
        return "line"
    raise err


def _check_on(ta, tb, tok):
    if ta == tb or "conic" == ta:
        raise ScriptTypeError(f"cannot put a {ta} on a {tb}", tok[1], tok[2])


def _check_assert(a: Assertion, types):
    ts = [types[x] for x in a.args]
    bad = ScriptTypeError(f"bad operands for assert {a.kind}", *a.pos)
    if a.kind == "on":
        if ts[0] == ts[1] or ts[0] == "conic" and ts[1] == "conic":
            raise bad
    elif a.kind == "collinear" and ts != ["point"] * 3:
        raise bad
    elif a.kind == "concurrent" and ts != ["line"] * 3:
        raise bad
    elif a.kind == "conconic" and len(set(ts)) != 1 or a.kind == "conconic" and ts[0] == "conic":
        raise bad


def builtin_names():
    return ["pappus", "desargues", "pascal", "brianchon"]


def load_builtin(name: str) -> Script:
    if name not in builtin_names():
        raise KeyError(f"no built-in script {name!r}")
    text = resources.files("pcl").joinpath("scripts").joinpath(name + ".pcf").read_text()
    return parse_script(text, name)


def load_script(name_or_path: str) -> Script:
    """Built-in name or a path to a .pcf file."""
    if name_or_path in builtin_names():
        return load_builtin(name_or_path)
    with open(name_or_path) as fh:
        text = fh.read()
    return parse_script(text, name_or_path)


# -- sampling --------------------------------------------------------------


@dataclass
class SampledConic:
    """Conic given as the image of x^2 + y^2 = z^2 under a collineation."""

    col: Collineation

    @property
    def conic(self) -> Conic:
        return geom.STANDARD_CONIC.transform(self.col)

    def point(self, t) -> Point:
        return self.col(geom.rational_conic_point(t))

    def tangent(self, t) -> Line:
        return self.col(geom.tangent_at(t))


Instance = dict  # name -> Point | Line | SampledConic


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([int(seed) & (2**63 - 1), trial])


def _rint(rng, lo=-COORD_RANGE, hi=COORD_RANGE):
    return int(rng.integers(lo, hi + 1))


def _rational(rng):
    den = _rint(rng, 1, COORD_RANGE)
    return Fraction(_rint(rng), den)


def _two_points_on(v):
    """Two independent triples orthogonal to v (exact)."""
    cands = [la.cross(v, e) for e in la.identity(3)]
    cands = [c for c in cands if any(x != 0 for x in c)]
    a = cands[0]
    b = next(c for c in cands[1:] if not geom.proportional(a, c))
    return a, b


def _random_through(v, rng):
    a, b = _two_points_on(tuple(v))
    s, t = _rint(rng), _rint(rng)
    return tuple(s * x + t * y for x, y in zip(a, b))


def _random_conic(rng):
    while True:
        m = tuple(tuple(_rint(rng, -100, 100) for _ in range(3)) for _ in range(3))
        if la.det3m(m) != 0:
            return SampledConic(Collineation(m))


def _incident(obj, carrier) -> bool:
    if isinstance(carrier, SampledConic):
        c = carrier.conic
        return c.contains(obj) if isinstance(obj, Point) else c.tangent_to(obj)
    if isinstance(obj, SampledConic):
        return _incident(carrier, obj)
    return geom.incident(obj, carrier)


def sample_instance(s: Script, seed, trial: int = 0, rng=None) -> Instance:
    """Random rational instance honouring the declared incidences.

    Objects are drawn in declaration order; each one is fitted to its
    constraints against objects drawn before it.  Raises GenericityExhausted
    when no admissible instance turns up within the retry bound.
    """
    rng = rng if rng is not None else trial_rng(seed, trial)
    for _ in range(MAX_RESAMPLES):
        inst = _try_sample(s, rng)
        if inst is not None:
            return inst
    raise GenericityExhausted(f"no generic instance of {s.name!r} after {MAX_RESAMPLES} attempts")


def _try_sample(s: Script, rng):
    inst = {}
    for name, kind in s.declarations.items():
        rel = [b for a, b in s.constraints if a == name and b in inst]
        rel += [a for a, b in s.constraints if b == name and a in inst]
        carriers = [inst[r] for r in rel]
        obj = _fit(kind, carriers, rng)
        if obj is None or not all(_incident(obj, c) for c in carriers):
            return None
        inst[name] = obj
    try:
        evaluate_objects(s, inst)
    except ConstructionDegenerate:
        return None
    return inst


def _fit(kind, carriers, rng):
    cls = Point if kind == "point" else Line
    if kind == "conic":
        return _random_conic(rng) if not carriers else None
    conics = [c for c in carriers if isinstance(c, SampledConic)]
    flat = [tuple(c) for c in carriers if not isinstance(c, SampledConic)]
    if conics:
        if len(conics) > 1 or flat:
            return None
        t = _rational(rng)
        return conics[0].point(t) if kind == "point" else conics[0].tangent(t)
    if not flat:
        return cls(_rint(rng), _rint(rng), _rint(rng))
    if len(flat) == 1:
        v = _random_through(flat[0], rng)
        return cls(v) if any(x != 0 for x in v) else None
    if geom.proportional(flat[0], flat[1]):
        return None
    return cls(la.cross(flat[0], flat[1]))


# -- evaluation ------------------------------------------------------------


def _apply(c: Construct, vals):
    args = [vals[a] for a in c.args]
    try:
        if c.fn == "join" and len(args) == 2:
            return geom.join(*args)
        if c.fn == "meet" and len(args) == 2:
            return geom.meet(*args)
        if c.fn == "meet":
            return geom.meet(geom.join(args[0], args[1]), geom.join(args[2], args[3]))
        if c.fn == "join":
            return geom.join(geom.meet(args[0], args[1]), geom.meet(args[2], args[3]))
        if c.fn == "polar":
            return args[1].conic.polar(args[0])
        return args[1].conic.pole(args[0])
    except (geom.GeometryError, ValueError) as e:
        raise ConstructionDegenerate(f"{c.name} = {c.fn}(...): {e}") from None


def evaluate_objects(s: Script, inst: Instance) -> dict:
    """Run the constructions; enforces the distinctness guards."""
    vals = dict(inst)
    for c in s.constructions:
        vals[c.name] = _apply(c, vals)
    for cls in (Point, Line):
        objs = [v for v in vals.values() if isinstance(v, cls)]
        if len(set(objs)) != len(objs):
            raise ConstructionDegenerate(f"two {cls.__name__.lower()}s coincide")
    return vals


def _conconic_residual(objs):
    rows = [geom._monomials(tuple(o)) for o in objs]
    return la.det(rows)


def residual(a: Assertion, vals):
    objs = [vals[x] for x in a.args]
    if a.kind == "on":
        x, y = objs
        if isinstance(x, SampledConic):
            x, y = y, x
        if isinstance(y, SampledConic):
            c = y.conic
            return c.value(x) if isinstance(x, Point) else c.dual().value(x)
        return la.dot(tuple(x), tuple(y))
    if a.kind in ("collinear", "concurrent"):
        return geom.det_residual(*objs)
    return _conconic_residual(objs)


def evaluate(s: Script, inst: Instance) -> list:
    """Residual of every assertion (exact zero means the assertion holds)."""
    vals = evaluate_objects(s, inst)
    return [residual(a, vals) for a in s.assertions]


def instance_to_dict(inst: Instance) -> dict:
    out = {}
    for k, v in inst.items():
        if isinstance(v, SampledConic):
            out[k] = {"kind": "conic", "collineation": [list(r) for r in v.col.m]}
        else:
            out[k] = {"kind": type(v).__name__.lower(), "coords": list(v.coords)}
    return out


def instance_from_dict(d: dict) -> Instance:
    def fr(x):
        return Fraction(x) if isinstance(x, str) else x

    out = {}
    for k, v in d.items():
        if v["kind"] == "conic":
            out[k] = SampledConic(Collineation([[fr(x) for x in r] for r in v["collineation"]]))
        else:
            cls = Point if v["kind"] == "point" else Line
            out[k] = cls([fr(x) for x in v["coords"]])
    return out


def verify(s: Script, trials: int = 20, seed: int = 0) -> VerificationReport:
    """Randomised exact verification of every assertion of a script."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rep = VerificationReport(s.name, seed, trials)
    for t in range(trials):
        rng = trial_rng(seed, t)
        try:
            inst = sample_instance(s, seed, t, rng)
        except GenericityExhausted:
            rep.verdict = EXHAUSTED
            rep.details["exhausted_trial"] = t
            return rep
        res = evaluate(s, inst)
        worst = max((abs(Fraction(r)) for r in res), default=Fraction(0))
        rep.max_residuals.append(worst)
        rep.trials_completed = t + 1
        if worst != 0:
            rep.verdict = FALSIFIED
            rep.witness = {"trial": t, "instance": instance_to_dict(inst),
                           "residuals": [Fraction(r) for r in res]}
            return rep
    rep.verdict = VERIFIED
    return rep


def replay_witness(s: Script, witness: dict) -> list:
    """Re-evaluate a stored witness (as produced by verify)."""
    return evaluate(s, instance_from_dict(witness["instance"]))
