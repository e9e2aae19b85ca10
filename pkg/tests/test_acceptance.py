"""The eleven acceptance criteria, each under its runtime budget.

Every criterion prints one PASS/FAIL line (also collected into the
terminal summary) and then asserts.
"""
from __future__ import annotations

import math
import time
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

import numpy as np

from conftest import CRITERIA_LINES
from kacflow import cli
from kacflow.exact_core import PolyMatrix
from kacflow.geometry import (
    GeometryConfig,
    PhiSpec,
    SpaceFormFactor,
    horospherical_suite,
    product_curvatures,
    riccati_residual,
    seeded_grid,
    trace_identity_check,
)
from kacflow.jacobi import ParallelFamily, ShapeMatrix, build_Q, recurrence_check
from kacflow.kac import (
    build_kac_second,
    chessboard_check,
    e1_eigen_coordinates,
    km_binomial_check,
    predicted_spectrum,
)
from kacflow.linsys import (
    build_bundle,
    degree_structure,
    generalized_eigvec_check,
    norm_identity_check,
    solve_x0_from_tau,
    vandermonde_generalized,
    verify_cramer,
    verify_independence_family,
    verify_rank,
    verify_singular,
)

GOLDEN = Path(__file__).parent / "golden"
SEED = 0xC0FFEE


@contextmanager
def criterion(n: int, desc: str, budget: float):
    """Collects named boolean checks; reports PASS only if all hold inside the budget."""
    checks: dict = {}
    t0 = time.perf_counter()
    try:
        yield checks
    finally:
        dt = time.perf_counter() - t0
        failed = [k for k, v in checks.items() if not v]
        ok = bool(checks) and not failed and dt < budget
        why = "" if ok else f"  failing: {failed or 'no checks ran'}" + (f" over budget {budget}s" if dt >= budget else "")
        line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {desc} ({dt:.2f}s < {budget}s){why}"
        print(line)
        CRITERIA_LINES.append(line)
    assert ok, line


def _golden(name):
    return (GOLDEN / name).read_text()


def test_criterion_01_golden_kac():
    with criterion(1, "golden K(2,2), K(2,3), K(3,2)", 1.0) as c:
        for n1, n2 in [(2, 2), (2, 3), (3, 2)]:
            c[f"K{n1}{n2}"] = build_kac_second(n1, n2, "x", "y").render() + "\n" == _golden(f"K{n1}{n2}.txt")


def test_criterion_02_golden_flat_mbar():
    with criterion(2, "golden flat Mbar (2,2) (3,2) (2,3) (3,3)", 10.0) as c:
        for n1, n2 in [(2, 2), (3, 2), (2, 3), (3, 3)]:
            Mbar = build_bundle(None, n1, n2, "flat").Mbar
            c[f"Mflat{n1}{n2}"] = Mbar.render() + "\n" == _golden(f"Mflat{n1}{n2}.txt")
        c["337920tau^4 present"] = "337920*tau^4" in build_bundle(None, 3, 3, "flat").Mbar.render()


def test_criterion_03_star_patterns():
    with criterion(3, "mixed star patterns (2,2) and (2,3), starred entries homogeneous", 30.0) as c:
        for n1, n2 in [(2, 2), (2, 3)]:
            Mbar = build_bundle(None, n1, n2, "mixed").Mbar
            pat = [ln.split() for ln in _golden(f"stars_mixed{n1}{n2}.txt").strip().splitlines()]
            c[f"shape{n1}{n2}"] = (len(pat), len(pat[0])) == (Mbar.rows, Mbar.cols)
            zeros_ok = homog = True
            for i, row in enumerate(pat):
                for j, cell in enumerate(row):
                    e = Mbar[i, j]
                    zeros_ok &= (cell == "0") == e.is_zero()
                    if cell == "*":
                        homog &= e.is_homogeneous() and not e.is_constant()
            c[f"pattern{n1}{n2}"] = zeros_ok
            c[f"homogeneous{n1}{n2}"] = homog


def test_criterion_04_tables():
    with criterion(4, "coefficient tables 1-4 at (2,2), both modes", 5.0) as c:
        for mode in ("mixed", "flat"):
            rows = cli.table_lines(mode)
            c[mode] = all(ok for *_, ok in rows)
            got = {label: (g, expr) for label, g, expr, _ in rows}
            if mode == "mixed":
                c["alpha111 mixed"] = got["alpha[1,1,1]"][1] == "-a33*tau1-a22*tau2-D"
            else:
                c["alpha211 flat"] = got["alpha[2,1,1]"][1] == "tau*D33"


def test_criterion_05_spectrum():
    with criterion(5, "Kac spectrum, squarefree charpoly, rank parity, e1 coordinates", 30.0) as c:
        for n1, n2 in [(2, 2), (2, 3), (3, 2), (3, 3)]:
            rep = predicted_spectrum(n1, n2, 2, 3)
            c[f"charpoly{n1}{n2}"] = rep.charpoly_matches and rep.squarefree
            c[f"rank{n1}{n2}"] = rep.computed_rank == n1 * n2 - (n1 * n2) % 2
            coords = e1_eigen_coordinates(n1, n2, 2, 3)
            want = tuple(Fraction(math.comb(n1 - 1, u) * math.comb(n2 - 1, v), 2 ** (n1 + n2 - 2))
                         for u in range(n1) for v in range(n2))
            c[f"e1{n1}{n2}"] = coords == want and all(coords)


def test_criterion_06_recurrence():
    with criterion(6, "P_(k+1) = Q P_k, symbolic and (3,3) rational", 120.0) as c:
        for n1, n2 in [(2, 2), (2, 3), (3, 2)]:
            c[f"mixed{n1}{n2}"] = recurrence_check(ShapeMatrix.symbolic(n1, n2), k_max=3)
        for n1, n2 in [(2, 2), (2, 3)]:
            c[f"flat{n1}{n2}"] = recurrence_check(ShapeMatrix.symbolic(n1, n2), 0, "tau", k_max=3)
        c["mixed33 rational k<=6"] = recurrence_check(ShapeMatrix.random(3, 3, seed=SEED), k_max=6)


def test_criterion_07_singular_rank_cramer():
    with criterion(7, "det M = 0, rank deficiency 2, Cramer consistency", 120.0) as c:
        for n1, n2, mode in [(2, 2, "mixed"), (2, 3, "mixed"), (3, 3, "mixed"), (2, 2, "flat"), (3, 2, "flat")]:
            b = build_bundle(None, n1, n2, mode)
            rep = verify_singular(b, samples=20, seed=SEED)
            c[f"singular {mode}{n1}{n2}"] = rep.status == "verified"
            if (n1, n2) == (2, 2):
                c[f"symbolic det {mode}"] = rep.witness["det"] == "symbolic"
            if (n1 * n2 % 2 == 0) if mode == "mixed" else n2 % 2 == 0:
                c[f"rank {mode}{n1}{n2}"] = verify_rank(b, samples=3, seed=SEED).status == "verified"
        for mode in ("mixed", "flat"):
            c[f"cramer symbolic {mode}"] = verify_cramer(ShapeMatrix.symbolic(2, 2), mode, samples=5,
                                                         seed=SEED).status == "verified"
        c["cramer rational mixed23"] = verify_cramer(ShapeMatrix.random(2, 3, seed=SEED), "mixed",
                                                     samples=5, seed=SEED).status == "verified"
        c["cramer rational flat32"] = verify_cramer(ShapeMatrix.random(3, 2, seed=SEED), "flat",
                                                    samples=5, seed=SEED).status == "verified"


def test_criterion_08_independence_vandermonde():
    with criterion(8, "Krylov independence families and generalized Vandermonde", 120.0) as c:
        for n1, n2, mode in [(2, 2, "mixed"), (3, 2, "flat"), (2, 2, "flat")]:
            for s in (2, 5):
                rep = verify_independence_family(n1, n2, mode, s, samples=3, seed=SEED)
                c[f"even {mode}{n1}{n2} s={s}"] = rep.status == "verified"
        for s in (15, 20):
            rep = verify_independence_family(2, 3, "flat", s, samples=3, seed=SEED)
            w = rep.witness
            c[f"odd flat23 s={s}"] = rep.status == "verified"
            c[f"Lambda independent s={s}"] = all(r == 7 for r in w["lambda_ranks"])
            c[f"Lambda_s dependent s={s}"] = all(r < 8 for r in w["lambda_s_ranks"])
            c[f"span (b) s={s}"] = all(w["col1_in_odd_span"])
            c[f"span (c) s={s}"] = all(w["col_m1_in_even_span"])
        for n2 in (2, 3, 4):
            nodes = [n2 - 1 - 2 * v for v in range(n2)]
            nodes = [Fraction(3) * x for x in nodes if x != 0]
            for n1 in (1, 2, 3):
                c[f"vandermonde n1={n1} nodes={len(nodes)}"] = vandermonde_generalized(nodes, n1).nonsingular


def test_criterion_09_degree_structure_x0():
    with criterion(9, "degree structure and X0 recovery", 120.0) as c:
        for n1, n2, mode in [(2, 2, "mixed"), (2, 2, "flat"), (2, 3, "flat")]:
            c[f"degrees {mode}{n1}{n2}"] = degree_structure(n1, n2, mode, samples=3, seed=SEED).status == "verified"
        for n1, n2, mode in [(2, 2, "mixed"), (2, 2, "flat"), (2, 3, "flat"), (3, 3, "mixed"), (3, 2, "flat")]:
            rep = solve_x0_from_tau(ShapeMatrix.random(n1, n2, seed=SEED + n1), mode, samples=3, seed=SEED)
            c[f"x0 {mode}{n1}{n2}"] = rep.status in ("verified", "paper_discrepancy") and all(rep.witness["matches"])


def test_criterion_10_structural():
    with criterion(10, "chessboard, binomial, Q^m block law, eigenvector shift law, norm identities, block table", 60.0) as c:
        c["chessboard m<=8"] = all(chessboard_check(n, "y", m) for n in (2, 3, 4, 5, 6) for m in range(1, 9))
        c["binomial m<=4"] = all(km_binomial_check(n1, n2, "x", "y", m)
                                 for n1, n2 in [(2, 2), (2, 3), (3, 2), (3, 3)] for m in range(1, 5))
        qlaw = True
        for n1, n2 in [(2, 2), (2, 3)]:
            K = build_kac_second(n1, n2, "tau1", "tau2")
            N = n1 * n2
            Q = build_Q(n1, n2)
            for m in range(1, 7):
                Qm = Q ** m
                qlaw &= Qm.submatrix(range(N), range(N)) == K ** m
                qlaw &= Qm.submatrix(range(N), range(N, 2 * N)) == (K ** (m - 1)).scale(m)
                qlaw &= Qm.submatrix(range(N, 2 * N), range(N)) == PolyMatrix.zeros(N, N)
        c["Q^m block law m<=6"] = qlaw
        c["eigvec shift law"] = all(generalized_eigvec_check(n1, n2, sy=3).status == "verified"
                                    for n1, n2 in [(2, 2), (2, 3), (3, 2), (3, 3)])
        c["norm identities"] = all(norm_identity_check(ShapeMatrix.symbolic(n1, n2, zero_first=True), mode).status
                                   == "verified" for n1, n2 in [(2, 2), (3, 2)] for mode in ("mixed", "flat"))
        rep = cli._block_table(cli.RunConfig(command="verify"))
        flagged = {(d["m"], d["ell"]) for d in rep.witness["mismatched"]}
        c["block table flagged, not failed"] = rep.status == "paper_discrepancy"
        c["named cells flagged"] = {(2, 2), (3, 1), (4, 3)} <= flagged


def test_criterion_11_geometry():
    with criterion(11, "geometry: log-derivative, angle, minimality, constancy, trace identities, Riccati", 60.0) as c:
        worst = 0.0
        for seed, n1, n2, taus in [(1, 2, 2, (-1.0, 1.0)), (2, 2, 3, (0.0, -2.0)), (3, 3, 2, (0.5, 4.0))]:
            fam = ParallelFamily(ShapeMatrix.random(n1, n2, seed=SEED + seed, max_num=5, max_den=3), *taus)
            for r in np.linspace(0.0, 0.05, 11):
                s = fam.state(float(r))
                worst = max(worst, abs(s.H_r + s.Dprime_r / s.D_r))
        c["H = -D'/D within 1e-8"] = worst < 1e-8
        f1, f2 = SpaceFormFactor(-1.0, 3, (0.2, 0.7)), SpaceFormFactor(0.0, 2, (0.4,))
        c["theta == 0 for phi = id"] = all(product_curvatures(f1, f2, PhiSpec.linear(1.0), s).theta == 0
                                           for s in (-0.4, 0.0, 0.3))
        grid = seeded_grid(-5, 5, 41, SEED)
        minimal = True
        for n, eps in [(2, -1.0), (3, -4.0), (4, -0.25)]:
            f = SpaceFormFactor.horospherical(eps, n)
            minimal &= all(abs(product_curvatures(f, f, PhiSpec.linear(1.0), s).H) < 1e-12 for s in grid)
        c["bi-horospherical phi = id minimal"] = minimal
        suites = [GeometryConfig.make(-1, -4, 3, 3), GeometryConfig.make(0, -1, 2, 2, phi_a=2.0),
                  GeometryConfig.make(-1, 0, 3, 2, phi_a=0.5), GeometryConfig.make(0, 0, 4, 3, phi_a=3.0),
                  GeometryConfig.make(-2, -2, 2, 4, phi_a=1.0)]
        c["constant theta, k, H"] = all(horospherical_suite(cfg).constant for cfg in suites)
        rng = np.random.default_rng(SEED)
        trace_ok = True
        for k in range(6):
            eps1, eps2 = rng.choice([-1.0, 0.0, 1.0, -4.0], size=2)
            n1, n2 = rng.integers(2, 5, size=2)
            g1 = SpaceFormFactor(float(eps1), int(n1), tuple(rng.uniform(-0.5, 0.5, n1 - 1)))
            g2 = SpaceFormFactor(float(eps2), int(n2), tuple(rng.uniform(-0.5, 0.5, n2 - 1)))
            res = trace_identity_check(g1, g2, PhiSpec.linear(float(rng.uniform(0.3, 2.0))),
                                       float(rng.uniform(-0.2, 0.2)), h=1e-5)
            trace_ok &= max(res) < 1e-6
        c["trace identities < 1e-6 on 6 configs"] = trace_ok
        c["Riccati < 1e-6"] = all(abs(riccati_residual(k0, eps, t)) < 1e-6
                                  for k0 in (-0.5, 0.3, 1.0) for eps in (-1.0, 0.0, 1.0) for t in (0.0, 0.2, 0.4))
