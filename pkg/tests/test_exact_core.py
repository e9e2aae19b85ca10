from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kacflow.errors import (
    DimensionMismatch,
    EmptySampleList,
    Inconsistent,
    InexactDivision,
    NonSquare,
    UnboundVariable,
)
from kacflow.exact_core import (
    MultiPoly,
    PolyMatrix,
    QuadExtElem,
    det_cofactor,
    det_fraction_free,
    det_rational,
    kron,
    parse_poly,
    poly_eval,
    random_rational,
    rank_at_points,
    reduce_radicals,
    sample_assignments,
    solve_exact,
)

VARS = ("x", "y", "tau1")

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=7)


@st.composite
def polys(draw, max_terms=4):
    p = MultiPoly.zero()
    for _ in range(draw(st.integers(0, max_terms))):
        mono = MultiPoly.one()
        for v in VARS:
            mono = mono * MultiPoly.var(v) ** draw(st.integers(0, 2))
        p = p + mono.scale(draw(fractions))
    return p


# poly_eval -------------------------------------------------------------------

def test_poly_eval_examples():
    p = parse_poly("tau1*tau2 + 1")
    assert poly_eval(p, {"tau1": 2, "tau2": -3}) == -5
    assert poly_eval(MultiPoly.zero(), {"q": 7}) == 0
    assert poly_eval(parse_poly("(x - y)^2"), {"x": 4, "y": 9}) == 25


def test_poly_eval_unbound():
    with pytest.raises(UnboundVariable) as exc:
        poly_eval(parse_poly("x + y"), {"x": 1})
    assert exc.value.name == "y"


def test_render_is_canonical():
    p = parse_poly("3 - 2*x*y + y^2 + x^2")
    assert str(p) == "x^2 - 2*x*y + y^2 + 3"
    assert str(MultiPoly.zero()) == "0"
    assert parse_poly(str(p)) == p
    assert str(parse_poly("a10 + a9 + a2")) == "a2 + a9 + a10"


def test_coefficients_stay_reduced():
    p = parse_poly("x/2 + x/2")
    assert p == MultiPoly.var("x")
    q = parse_poly("x") / 6
    assert q.coefficient((("x", 1),)) == Fraction(1, 6)


@given(polys(), polys(), polys())
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    assert a - a == MultiPoly.zero()


@given(polys(), polys(), st.fixed_dictionaries({v: fractions for v in VARS}))
def test_eval_is_a_ring_map(a, b, pt):
    assert poly_eval(a * b, pt) == poly_eval(a, pt) * poly_eval(b, pt)
    assert poly_eval(a - b, pt) == poly_eval(a, pt) - poly_eval(b, pt)


@given(polys(), polys())
def test_exact_div_round_trip(a, b):
    if b.is_zero():
        return
    assert (a * b).exact_div(b) == a


def test_exact_div_rejects_remainder():
    with pytest.raises(InexactDivision):
        parse_poly("x^2 + 1").exact_div(parse_poly("x + 1"))


def test_homogeneity_and_degree():
    p = parse_poly("tau1^2*tau2 + 5*tau2^3 + a11*tau1")
    assert p.degree_in(["tau1", "tau2"]) == 3
    assert not p.is_homogeneous(["tau1", "tau2"])
    assert parse_poly("tau1^2*tau2 - 7*tau2^3").is_homogeneous(["tau1", "tau2"])


def test_diff_and_subs():
    p = parse_poly("x^3*y + 2*x")
    assert p.diff("x") == parse_poly("3*x^2*y + 2")
    assert p.subs({"x": parse_poly("y + 1")}) == parse_poly("(y+1)^3*y + 2*y + 2")


def test_reduce_radicals():
    p = parse_poly("w^3 + w^2 + 1")
    assert reduce_radicals(p, {"w": parse_poly("y")}) == parse_poly("w*y + y + 1")


# QuadExt --------------------------------------------------------------------

@given(fractions, fractions, fractions)
def test_quadext_norm(a, b, rad):
    w = QuadExtElem.sqrt(rad)
    z = w * b + a
    prod = z * z.conj()
    assert prod.radical.is_zero()
    assert prod.base == MultiPoly.const(a * a - b * b * rad)


def test_quadext_symbolic_square():
    w = QuadExtElem.sqrt(MultiPoly.var("y"))
    assert w * w == QuadExtElem.lift(MultiPoly.var("y"), MultiPoly.var("y"))


# determinants -----------------------------------------------------------------

def test_det_examples():
    assert det_fraction_free(PolyMatrix.from_rows([[1, 2], [3, 4]])) == MultiPoly.const(-2)
    assert det_fraction_free(PolyMatrix.identity(5)) == MultiPoly.one()
    K = PolyMatrix.from_rows([[0, 1, 1, 0], ["y", 0, 0, 1], ["x", 0, 0, 1], [0, "x", "y", 0]])
    assert det_fraction_free(K) == parse_poly("(x - y)^2")
    assert det_cofactor(K) == parse_poly("(x - y)^2")


def test_det_nonsquare():
    with pytest.raises(NonSquare):
        det_fraction_free(PolyMatrix.zeros(2, 3))


def test_bareiss_matches_cofactor_seeded():
    rng = random.Random(20240501)
    for case in range(120):
        n = 1 + case % 4
        rows = [[random_rational(rng, -9, 9, 5, nonzero=False) for _ in range(n)] for _ in range(n)]
        if case % 5 == 0:  # force zero pivots
            rows[0][0] = Fraction(0)
        M = PolyMatrix.from_rows(rows)
        assert det_fraction_free(M) == det_cofactor(M) == MultiPoly.const(det_rational(rows))


def test_bareiss_matches_cofactor_polynomial():
    rng = random.Random(7)
    x, y = MultiPoly.var("x"), MultiPoly.var("y")
    for _ in range(25):
        n = rng.randint(2, 4)
        M = PolyMatrix.from_function(
            n, n, lambda i, j: x * rng.randint(-3, 3) + y * rng.randint(-2, 2) + rng.randint(-2, 2)
            if rng.random() < 0.7 else MultiPoly.zero())
        assert det_fraction_free(M) == det_cofactor(M)


def test_eval_commutes_with_det():
    rng = random.Random(3)
    M = PolyMatrix.from_rows([["x", "y", 1], ["x*y", 0, "tau1"], [2, "x - tau1", "y^2"]])
    D = det_fraction_free(M)
    for pt in sample_assignments(["x", "y", "tau1"], 10, seed=rng.randint(0, 999)):
        assert poly_eval(D, pt) == det_rational(M.evaluate(pt))


# rank / solve -----------------------------------------------------------------

def test_rank_at_points_examples():
    assert rank_at_points(PolyMatrix.identity(2), [{}]) == 2
    t = MultiPoly.var("tau1")
    assert rank_at_points(PolyMatrix.from_rows([[t, t], [t, t]]), [{"tau1": 5}]) == 1
    with pytest.raises(EmptySampleList):
        rank_at_points(PolyMatrix.identity(2), [])


def test_solve_exact_examples():
    assert solve_exact(PolyMatrix.identity(3), [1, 2, 3]).particular == (1, 2, 3)
    with pytest.raises(Inconsistent):
        solve_exact([[1, 1], [2, 2]], [1, 3])
    sol = solve_exact([[1, 1], [2, 2]], [1, 2])
    assert not sol.unique
    assert sol.particular == (1, 0)
    assert sol.nullspace == ((-1, 1),)
    with pytest.raises(DimensionMismatch):
        solve_exact([[1, 0], [0, 1]], [1])


def test_sample_assignments_are_seeded():
    a = sample_assignments(["tau1", "tau2"], 3, seed=11)
    assert a == sample_assignments(["tau1", "tau2"], 3, seed=11)
    assert all(v != 0 and v.denominator <= 13 and abs(v.numerator) <= 97 for s in a for v in s.values())


# kron ---------------------------------------------------------------------------

def test_kron_unrolled():
    Kx = PolyMatrix.from_rows([[0, 1], ["x", 0]])
    assert kron(Kx, PolyMatrix.identity(2)) == PolyMatrix.from_rows(
        [[0, 0, 1, 0], [0, 0, 0, 1], ["x", 0, 0, 0], [0, "x", 0, 0]])
    Ky = PolyMatrix.from_rows([[0, 1], ["y", 0]])
    blk = kron(PolyMatrix.identity(2), Ky)
    assert blk.submatrix([0, 1], [0, 1]) == Ky and blk.submatrix([2, 3], [2, 3]) == Ky
    assert blk.submatrix([0, 1], [2, 3]) == PolyMatrix.zeros(2, 2)
