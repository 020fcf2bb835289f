import cmath
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from korbit import expr as ex

FIXTURE_STRINGS = ["q1^2 + l3*p1", "exp(2*q1)", "1", "q1", "-l3*q1", "l3*q1", "i*l3", "exp(-l3*q1^2/2)",
                   "(1 + 2*q1 + i*q1^2)*exp(-q1^2)", "sin(q1)*cos(p1) - q1^-2", "p1 + q2*p2 - l1"]


def test_parse_examples():
    e = ex.parse("q1^2 + l3*p1")
    assert isinstance(e, ex.Add) and len(e.terms) == 2
    assert isinstance(ex.parse("exp(2*q1)"), ex.Func)
    with pytest.raises(ex.ExprSyntaxError) as err:
        ex.parse("q1 + * p1")
    assert err.value.offset == 5


@pytest.mark.parametrize("bad", ["x1", "q0", "q10", "q1^1.5", "(q1", "exp q1", "q1 q2"])
def test_parse_errors(bad):
    with pytest.raises(ex.ExprSyntaxError):
        ex.parse(bad)


@pytest.mark.parametrize("s", FIXTURE_STRINGS)
def test_round_trip(s):
    e = ex.parse(s)
    assert ex.parse(ex.to_string(e)) == e


def test_differentiate_examples():
    q1, p1 = ex.q(1), ex.p(1)
    assert ex.differentiate(ex.parse("q1^2"), q1) == ex.parse("2*q1")
    assert ex.differentiate(ex.parse("l3*q1*p1"), p1) == ex.parse("l3*q1")
    assert ex.differentiate(ex.parse("exp(2*q1)"), q1) == ex.parse("2*exp(2*q1)")
    assert ex.differentiate(ex.parse("cos(q1)"), q1) == ex.parse("-sin(q1)")
    assert ex.differentiate(ex.parse("1/q1"), q1) == ex.parse("-q1^-2")


def test_evaluate_examples():
    assert ex.evaluate(ex.parse("q1^2"), {"q1": 2}) == 4
    assert ex.evaluate(ex.parse("i*l3"), {"l3": 5}) == 5j
    with pytest.raises(ex.EvaluationError):
        ex.evaluate(ex.parse("1/q1"), {"q1": 0})
    with pytest.raises(ex.UnboundVariableError):
        ex.evaluate(ex.parse("q1 + q2"), {"q1": 0})
    vals = ex.evaluate(ex.parse("q1^2"), {"q1": np.array([1.0, 2.0, 3.0])})
    assert list(vals) == [1, 4, 9]


def test_i_squared_and_canonical_order():
    assert ex.parse("i*i") == ex.Const(-1)
    assert ex.parse("q1*p1 + 3") == ex.parse("3 + p1*q1")
    assert ex.parse("(q1 + p1)^2") == ex.parse("q1^2 + 2*q1*p1 + p1^2")


def test_poisson_examples():
    assert ex.poisson_bracket(ex.q(1), ex.p(1), 1) == ex.ONE
    assert ex.poisson_bracket(ex.p(1), ex.q(1), 1) == ex.Const(-1)
    assert ex.poisson_bracket(ex.parse("p1"), ex.parse("-l3*q1"), 1) == ex.parse("l3")


# ---------------------------------------------------------------------------
# random expressions
# ---------------------------------------------------------------------------

VARS = [ex.q(1), ex.q(2), ex.p(1), ex.p(2), ex.lam(1)]
leaves = st.one_of(st.sampled_from(VARS), st.integers(-3, 3).map(ex.const),
                   st.fractions(min_value=-2, max_value=2, max_denominator=4).map(ex.const), st.just(ex.I))


def _extend(children):
    return st.one_of(
        st.tuples(children, children).map(lambda t: ex.add(*t)),
        st.tuples(children, children).map(lambda t: ex.mul(*t)),
        st.tuples(children, st.integers(0, 3)).map(lambda t: ex.power(*t)),
        children.map(lambda c: ex.sin(c)),
        children.map(lambda c: ex.exp(ex.mul(ex.const(Fraction(1, 4)), c))),
    )


exprs = st.recursive(leaves, _extend, max_leaves=6)
points = st.lists(st.floats(-1, 1, allow_nan=False), min_size=5, max_size=5)


def _binding(vals):
    return {v: x for v, x in zip(VARS, vals)}


def _close(a, b, rel):
    return abs(a - b) <= rel * max(1.0, abs(a), abs(b))


@settings(max_examples=80, deadline=None)
@given(exprs, st.lists(points, min_size=10, max_size=10))
def test_derivative_matches_finite_difference(e, pts):
    v = ex.q(1)
    d = ex.differentiate(e, v)
    h = 1e-6
    for vals in pts:
        b = _binding(vals)
        plus, minus = dict(b), dict(b)
        plus[v] = b[v] + h
        minus[v] = b[v] - h
        fd = (ex.evaluate(e, plus) - ex.evaluate(e, minus)) / (2 * h)
        assert _close(ex.evaluate(d, b), fd, 1e-5)


@settings(max_examples=60, deadline=None)
@given(exprs, exprs, st.lists(points, min_size=10, max_size=10))
def test_linearity_and_product_rule(f, g, pts):
    v = ex.p(1)
    lhs_sum = ex.differentiate(ex.add(f, g), v)
    lhs_prod = ex.differentiate(ex.mul(f, g), v)
    rhs_prod = ex.add(ex.mul(ex.differentiate(f, v), g), ex.mul(f, ex.differentiate(g, v)))
    for vals in pts:
        b = _binding(vals)
        assert _close(ex.evaluate(lhs_sum, b), ex.evaluate(ex.differentiate(f, v), b)
                      + ex.evaluate(ex.differentiate(g, v), b), 1e-9)
        assert _close(ex.evaluate(lhs_prod, b), ex.evaluate(rhs_prod, b), 1e-6)


@settings(max_examples=60, deadline=None)
@given(exprs, exprs)
def test_bracket_antisymmetry(f, g):
    assert ex.poisson_bracket(f, g, 2) == ex.canonical(ex.mul(ex.Const(-1), ex.poisson_bracket(g, f, 2)))


@settings(max_examples=40, deadline=None)
@given(exprs, exprs, exprs, st.lists(points, min_size=10, max_size=10))
def test_leibniz_and_jacobi(f, g, h, pts):
    pb = ex.poisson_bracket
    leib_l = pb(f, ex.mul(g, h), 2)
    leib_r = ex.add(ex.mul(pb(f, g, 2), h), ex.mul(g, pb(f, h, 2)))
    jac = ex.add(pb(f, pb(g, h, 2), 2), pb(g, pb(h, f, 2), 2), pb(h, pb(f, g, 2), 2))
    for vals in pts:
        b = _binding(vals)
        assert _close(ex.evaluate(leib_l, b), ex.evaluate(leib_r, b), 1e-9)
        assert abs(ex.evaluate(jac, b)) <= 1e-7 * max(1.0, *(abs(ex.evaluate(x, b)) for x in (f, g, h))) ** 3


@settings(max_examples=60, deadline=None)
@given(exprs)
def test_random_round_trip(e):
    assert ex.parse(ex.to_string(e)) == e


def test_complex_constant_exact():
    c = ex.const(cmath.exp(1j))
    assert abs(ex.evaluate(c, {}) - cmath.exp(1j)) == 0
