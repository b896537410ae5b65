from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from pcl import dsl, geom
from pcl.report import EXHAUSTED, FALSIFIED, VERIFIED

FALSE_SCRIPT = "point A B C;\nassert collinear A B C;\n"


def test_pappus_script_shape():
    s = dsl.load_builtin("pappus")
    assert len(s.declarations) == 8
    assert len(s.constructions) == 3
    assert len(s.assertions) == 1


@pytest.mark.parametrize("text,exc", [
    ("", dsl.NoAssertion),
    ("point A;\n", dsl.NoAssertion),
    ("point B;\nC = join(A, B);\nassert on C C;\n", dsl.UndefinedIdentifier),
    ("point A B;\nX = join(A, B;\n", dsl.ScriptSyntaxError),
    ("point A B;\nX = frob(A, B);\nassert on A X;\n", dsl.ScriptSyntaxError),
    ("point A A;\nassert on A A;\n", dsl.ScriptSyntaxError),
    ("line l;\nX = meet(l, Y);\nY = meet(l, X);\nassert on X l;\n", dsl.CyclicDefinition),
    ("point A B;\nl = meet(A, B);\nassert on A l;\n", dsl.ScriptTypeError),
    ("point A B C;\nassert concurrent A B C;\n", dsl.ScriptTypeError),
])
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        dsl.parse_script(text)


def test_error_position():
    with pytest.raises(dsl.UndefinedIdentifier) as ei:
        dsl.parse_script("point B;\n\nC = join(A, B);\nassert on B C;\n")
    assert (ei.value.line, ei.value.col) == (3, 10)


def test_constructions_are_topologically_ordered():
    s = dsl.parse_script("point A B C D;\nm = join(C, D);\nX = meet(m, l2);\nl2 = join(A, B);\n"
                         "assert on X m;\n")
    names = [c.name for c in s.constructions]
    assert names.index("l2") < names.index("X") and names.index("m") < names.index("X")


def test_comments_and_whitespace():
    s = dsl.parse_script("# header\npoint A B; # two points\n  l = join(A,B);\nassert on A l;")
    assert s.types["l"] == "line"


def test_sample_instance_honours_incidences():
    s = dsl.load_builtin("pappus")
    inst = dsl.sample_instance(s, 1)
    for name in ("A1", "A2", "A3"):
        assert geom.la.dot(tuple(inst[name]), tuple(inst["a"])) == 0
    # independent check: A1, A2, A3 collinear by a sympy determinant
    M = sympy.Matrix([[sympy.Rational(x) for x in inst[n].coords] for n in ("A1", "A2", "A3")])
    assert M.det() == 0


def test_sample_instance_deterministic():
    s = dsl.load_builtin("desargues")
    assert dsl.instance_to_dict(dsl.sample_instance(s, 7, 3)) == dsl.instance_to_dict(dsl.sample_instance(s, 7, 3))


def test_impossible_genericity_exhausts():
    # X is forced to coincide with A, which the distinctness guard rejects
    s = dsl.parse_script("point A;\nline l m;\non A l;\non A m;\nX = meet(l, m);\nassert on X l;\n")
    with pytest.raises(dsl.GenericityExhausted):
        dsl.sample_instance(s, 0)
    rep = dsl.verify(s, trials=2)
    assert rep.verdict == EXHAUSTED


def _sympy_pappus(inst):
    """Independent recomputation of the Pappus points with sympy vectors."""
    v = {k: sympy.Matrix([sympy.Rational(x) for x in inst[k].coords]) for k in inst}
    J = lambda p, q: p.cross(q)
    C1 = J(J(v["A2"], v["B3"]), J(v["A3"], v["B2"]))
    C2 = J(J(v["A1"], v["B3"]), J(v["A3"], v["B1"]))
    C3 = J(J(v["A1"], v["B2"]), J(v["A2"], v["B1"]))
    return sympy.Matrix.hstack(C1, C2, C3).det()


@given(st.integers(0, 2**32))
def test_pappus_residual_zero_any_seed(seed):
    s = dsl.load_builtin("pappus")
    inst = dsl.sample_instance(s, seed)
    assert dsl.evaluate(s, inst) == [0]
    assert _sympy_pappus(inst) == 0


@pytest.mark.parametrize("name", dsl.builtin_names())
@pytest.mark.parametrize("seed", [0, 1, 2**40 + 3])
def test_builtins_verified(name, seed):
    rep = dsl.verify(dsl.load_builtin(name), trials=5, seed=seed)
    assert rep.verdict == VERIFIED
    assert rep.witness is None
    assert all(r == 0 for r in rep.max_residuals)


def test_false_script_falsified_and_replayable():
    s = dsl.parse_script(FALSE_SCRIPT, "false")
    rep = dsl.verify(s, trials=20, seed=0)
    assert rep.verdict == FALSIFIED
    assert rep.trials_completed == 1
    w = rep.witness
    # the witness survives a JSON-style round trip with rationals as strings
    d = {k: {"kind": v["kind"], "coords": [str(Fraction(x)) for x in v["coords"]]} for k, v in w["instance"].items()}
    res = dsl.replay_witness(s, {"instance": d})
    assert res == w["residuals"] and res[0] != 0


def test_verify_deterministic():
    s = dsl.load_builtin("pascal")
    a, b = dsl.verify(s, 3, 9).to_dict(), dsl.verify(s, 3, 9).to_dict()
    assert a == b


def test_verify_rejects_zero_trials():
    with pytest.raises(ValueError):
        dsl.verify(dsl.load_builtin("pappus"), trials=0)


def test_pole_polar_script():
    # La Hire: P lies on the polar of Q, so the pole of PQ lies on the polar of P
    s = dsl.parse_script("conic K;\npoint P Q;\nl = polar(P, K);\nn = join(P, Q);\n"
                         "Y = pole(n, K);\nassert on Y l;\n")
    assert dsl.verify(s, trials=5).verdict == VERIFIED


def test_coincident_constructions_are_resampled():
    # X and Y are the same point for every instance, so every trial trips the guard
    s = dsl.parse_script("conic K;\npoint P Q;\nl = polar(P, K);\nm = polar(Q, K);\nX = meet(l, m);\n"
                         "n = join(P, Q);\nY = pole(n, K);\nassert on X l;\n")
    assert dsl.verify(s, trials=1).verdict == EXHAUSTED
