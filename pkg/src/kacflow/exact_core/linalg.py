"""Determinants, rank and exact solving."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from ..errors import DimensionMismatch, EmptySampleList, Inconsistent, NonSquare
from .matrix import PolyMatrix
from .poly import MultiPoly, as_poly

DEFAULT_SEED = 0xC0FFEE


def _as_entries(M):
    if isinstance(M, PolyMatrix):
        return M.rows, M.cols, [list(M.row(i)) for i in range(M.rows)]
    rows = [list(map(as_poly, r)) for r in M]
    return len(rows), (len(rows[0]) if rows else 0), rows


def det_fraction_free(M) -> MultiPoly:
    """Bareiss elimination with row swaps. Every division is exact."""
    n, m, a = _as_entries(M)
    if n != m:
        raise NonSquare(f"{n}x{m}")
    if n == 0:
        return MultiPoly.one()
    sign = 1
    prev = MultiPoly.one()
    for k in range(n - 1):
        if a[k][k].is_zero():
            # prefer the sparsest nonzero pivot; keeps intermediate sizes down
            cands = [i for i in range(k + 1, n) if not a[i][k].is_zero()]
            if not cands:
                return MultiPoly.zero()
            p = min(cands, key=lambda i: len(a[i][k].terms))
            a[k], a[p] = a[p], a[k]
            sign = -sign
        piv = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            for j in range(k + 1, n):
                num = piv * a[i][j] - aik * a[k][j]
                a[i][j] = num.exact_div(prev) if not prev.is_constant() else num / prev.constant_value()
            a[i][k] = MultiPoly.zero()
        prev = piv
    d = a[n - 1][n - 1]
    return -d if sign < 0 else d


def det_cofactor(M) -> MultiPoly:
    """Laplace expansion along the first row. Exponential; oracle only."""
    n, m, a = _as_entries(M)
    if n != m:
        raise NonSquare(f"{n}x{m}")
    return _laplace(a, tuple(range(n)), 0, {})


def _laplace(a, cols, r, memo):
    if not cols:
        return MultiPoly.one()
    if cols in memo:
        return memo[cols]
    total = MultiPoly.zero()
    for idx, c in enumerate(cols):
        e = a[r][c]
        if e.is_zero():
            continue
        minor = _laplace(a, cols[:idx] + cols[idx + 1:], r + 1, memo)
        term = e * minor
        total = total + term if idx % 2 == 0 else total - term
    memo[cols] = total
    return total


def det_rational(rows: Sequence[Sequence]) -> Fraction:
    """Gaussian elimination over Q."""
    a = [[Fraction(x) for x in r] for r in rows]
    n = len(a)
    if any(len(r) != n for r in a):
        raise NonSquare("not square")
    det = Fraction(1)
    for k in range(n):
        p = next((i for i in range(k, n) if a[i][k] != 0), None)
        if p is None:
            return Fraction(0)
        if p != k:
            a[k], a[p] = a[p], a[k]
            det = -det
        piv = a[k][k]
        det *= piv
        for i in range(k + 1, n):
            f = a[i][k] / piv
            if f:
                row_k = a[k]
                a[i] = [x - f * y for x, y in zip(a[i], row_k)]
    return det


def rref(rows: Sequence[Sequence]):
    """Reduced row echelon form over Q; returns (matrix, pivot columns)."""
    a = [[Fraction(x) for x in r] for r in rows]
    if not a:
        return a, []
    n, m = len(a), len(a[0])
    pivots = []
    r = 0
    for c in range(m):
        p = next((i for i in range(r, n) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(n):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == n:
            break
    return a, pivots


def rank_rational(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def rank_at_points(M: PolyMatrix, samples: Sequence[Mapping]) -> int:
    """Max exact rank over the sample assignments (a lower bound for generic rank)."""
    if not samples:
        raise EmptySampleList("rank_at_points needs at least one sample")
    best = 0
    cap = min(M.rows, M.cols)
    for s in samples:
        best = max(best, rank_rational(M.evaluate(s)))
        if best == cap:
            break
    return best


@dataclass(frozen=True)
class ExactSolution:
    """Particular solution plus nullspace basis; unique when the basis is empty."""

    particular: tuple
    nullspace: tuple = field(default=())

    @property
    def unique(self) -> bool:
        return not self.nullspace


def nullspace(rows: Sequence[Sequence]) -> list:
    red, piv = rref(rows)
    m = len(rows[0]) if rows else 0
    free = [c for c in range(m) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * m
        v[f] = Fraction(1)
        for i, pc in enumerate(piv):
            v[pc] = -red[i][f]
        basis.append(tuple(v))
    return basis


def solve_exact(M, b: Sequence) -> ExactSolution:
    """Solve ``M v = b`` over Q. Raises Inconsistent when there is no solution."""
    if isinstance(M, PolyMatrix):
        rows = [[e.constant_value() for e in M.row(i)] for i in range(M.rows)]
    else:
        rows = [[Fraction(x) for x in r] for r in M]
    if len(b) != len(rows):
        raise DimensionMismatch(f"rhs length {len(b)} for {len(rows)} rows")
    m = len(rows[0]) if rows else 0
    aug = [r + [Fraction(x)] for r, x in zip(rows, b)]
    red, piv = rref(aug)
    if m in piv:
        raise Inconsistent("right-hand side is not in the column space")
    x = [Fraction(0)] * m
    for i, pc in enumerate(piv):
        x[pc] = red[i][m]
    return ExactSolution(tuple(x), tuple(nullspace(rows)))


# seeded samples ----------------------------------------------------------

def random_rational(rng: random.Random, lo: int = -97, hi: int = 97, max_den: int = 13,
                    nonzero: bool = True) -> Fraction:
    while True:
        q = Fraction(rng.randint(lo, hi), rng.randint(1, max_den))
        if q or not nonzero:
            return q


def sample_assignments(names, count: int = 3, seed: int = DEFAULT_SEED) -> list:
    """``count`` independent assignments drawn from ints in [-97, 97] over denominators <= 13."""
    rng = random.Random(seed)
    names = sorted(names)
    return [{v: random_rational(rng) for v in names} for _ in range(count)]
