from __future__ import annotations

from fractions import Fraction

import pytest

from kacflow.errors import DuplicateNode, HypothesisViolated, NonzeroFirstRow
from kacflow.jacobi import ShapeMatrix
from kacflow.linsys import (
    build_bundle,
    degree_structure,
    generalized_eigvec_check,
    mu,
    norm_identity_check,
    omega_columns,
    rank_rational,
    solve_x0_from_tau,
    system_dim,
    system_residual,
    vandermonde_generalized,
    verify_cramer,
    verify_independence_family,
    verify_rank,
    verify_singular,
)


@pytest.mark.parametrize("n1,n2", [(2, 2), (3, 2), (2, 3), (3, 3)])
def test_flat_Mbar_golden(golden, n1, n2):
    b = build_bundle(None, n1, n2, "flat")
    assert b.Mbar.render() + "\n" == golden(f"Mflat{n1}{n2}.txt")


def _stars(path_text):
    return [line.split() for line in path_text.strip().splitlines()]


# the transcribed pattern prints 4 here; the direct product gives 6
KNOWN_BAD_CELL = {(2, 2): (1, 7)}


@pytest.mark.parametrize("n1,n2", [(2, 2), (2, 3)])
def test_mixed_star_pattern(golden, n1, n2):
    Mbar = build_bundle(None, n1, n2, "mixed").Mbar
    pattern = _stars(golden(f"stars_mixed{n1}{n2}.txt"))
    assert (len(pattern), len(pattern[0])) == (Mbar.rows, Mbar.cols)
    for i, row in enumerate(pattern):
        for j, cell in enumerate(row):
            e = Mbar[i, j]
            if cell == "*":
                assert not e.is_constant()
            elif (i, j) == KNOWN_BAD_CELL.get((n1, n2)):
                assert cell == "4" and e.constant_value() == 6
            else:
                assert e.is_constant() and e.constant_value() == int(cell)
            assert e.is_homogeneous()


def test_rank_example():
    M = build_bundle(None, 2, 2, "mixed").M
    assert rank_rational(M.evaluate({"tau1": Fraction(2, 3), "tau2": -5})) == 6


@pytest.mark.parametrize("n1,n2,mode", [(2, 2, "mixed"), (2, 3, "mixed"), (3, 3, "mixed"), (2, 2, "flat"), (3, 2, "flat")])
def test_singular(n1, n2, mode):
    rep = verify_singular(build_bundle(None, n1, n2, mode), samples=4)
    assert rep.status == "verified", rep.witness
    if mode == "mixed":
        assert len(rep.witness["omega_columns"]) == n1 * n2


def test_singular_parity_guard():
    with pytest.raises(HypothesisViolated):
        verify_singular(build_bundle(None, 2, 3, "flat"))


def test_rank_clause():
    assert verify_rank(build_bundle(None, 2, 2, "mixed"), samples=3).status == "verified"
    assert verify_rank(build_bundle(None, 3, 2, "flat"), samples=3).status == "verified"
    with pytest.raises(HypothesisViolated):
        verify_rank(build_bundle(None, 3, 3, "mixed"))


@pytest.mark.parametrize("n1,n2,mode,s", [(2, 2, "mixed", 2), (2, 2, "mixed", 5), (3, 2, "flat", 3),
                                          (3, 3, "mixed", 18), (2, 3, "flat", 9)])
def test_independence(n1, n2, mode, s):
    assert verify_independence_family(n1, n2, mode, s, samples=2).status == "verified"


def test_independence_odd_guard():
    with pytest.raises(HypothesisViolated):
        verify_independence_family(3, 3, "mixed", 2)


@pytest.mark.parametrize("mode", ["mixed", "flat"])
def test_cramer_symbolic(mode):
    assert verify_cramer(ShapeMatrix.symbolic(2, 2), mode, samples=3).status == "verified"


def test_cramer_random():
    assert verify_cramer(ShapeMatrix.random(2, 3, seed=5), "mixed", samples=3).status == "verified"


def test_bundle_invariant():
    b = build_bundle(ShapeMatrix.symbolic(2, 2), mode="mixed")
    assert all(r.is_zero() for r in system_residual(b))
    assert len(b.Dvec) == system_dim(2, 2, "mixed") - 1
    assert len(omega_columns(b.M)) == 4


@pytest.mark.parametrize("n1,n2,mode", [(2, 2, "mixed"), (2, 3, "flat"), (2, 2, "flat")])
def test_degree_structure(n1, n2, mode):
    rep = degree_structure(n1, n2, mode, samples=2)
    assert rep.status == "verified", rep.witness


def test_degree_structure_odd_last_row():
    w = degree_structure(2, 3, "flat", samples=2).witness
    assert w["clause"] == "odd" and w["last_row_pairs_with"] == f"d{w['s'] - 1}"


@pytest.mark.parametrize("n1,n2,mode", [(2, 2, "mixed"), (2, 3, "flat"), (3, 3, "mixed"), (2, 2, "flat")])
def test_x0_recovery(n1, n2, mode):
    A = ShapeMatrix.random(n1, n2, seed=11, max_num=9, max_den=5)
    rep = solve_x0_from_tau(A, mode, samples=2)
    assert rep.status in ("verified", "paper_discrepancy")
    assert all(rep.witness["matches"])


def test_x0_recovery_zero_shape():
    assert solve_x0_from_tau(ShapeMatrix.zero(2, 2)).status == "verified"


def test_x0_odd_case_nonzeros():
    w = solve_x0_from_tau(ShapeMatrix.random(3, 3, seed=2), "mixed", samples=1).witness
    assert w["Ltilde_nonzero_columns"] == [1, 3, 9]
    w = solve_x0_from_tau(ShapeMatrix.random(2, 3, seed=2), "flat", samples=1).witness
    assert len(w["Ltilde_nonzero_columns"]) == 2


def test_mu():
    assert [mu(5, l) for l in range(7)] == [1, 5, 20, 60, 120, 120, 0]


def test_vandermonde():
    assert vandermonde_generalized([-1, 1], 0).determinant == 2
    res = vandermonde_generalized([3, -3], 1)
    # confluent Vandermonde: |det| = prod |l_i - l_j|^((n1+1)^2)
    assert abs(res.determinant) == 6 ** 4 and res.nonsingular
    res = vandermonde_generalized([1, 2, 4], 1)
    assert abs(res.determinant) == (1 * 3 * 2) ** 4
    with pytest.raises(DuplicateNode):
        vandermonde_generalized([2, 2], 1)


@pytest.mark.parametrize("n1,n2", [(2, 2), (2, 3), (3, 4)])
def test_generalized_eigenvectors(n1, n2):
    rep = generalized_eigvec_check(n1, n2, sy=Fraction(3, 2))
    assert rep.status == "verified", rep.witness


def test_norm_identity():
    A = ShapeMatrix.symbolic(3, 2, zero_first=True)
    assert norm_identity_check(A).status == "verified"
    assert norm_identity_check(A, "flat").status == "verified"
    assert norm_identity_check(ShapeMatrix.random(2, 2, seed=1, zero_first=True)).status == "verified"
    with pytest.raises(NonzeroFirstRow):
        norm_identity_check(ShapeMatrix.symbolic(2, 2))
