"""B(r), its determinant D(r), the coefficient vectors P_k and the Q recurrence.

Row/column 0 of the shape matrix is the unit tangential direction; the next
n1-1 indices belong to the first factor and the last n2-1 to the second.
Passing tau1 = 0 switches to the flat case (c1 = 1, s1 = r).
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .csbasis import (
    CoeffVector,
    CSPoly,
    cs_at_zero,
    cs_derivative,
    cs_eval,
    project_graded,
)
from .errors import AsymmetricInput, BadDimension, CapExceeded, KacflowError, SingularB
from .exact_core import MultiPoly, PolyMatrix, as_poly, random_rational
from .kac import build_kac_second

DEFAULT_SYMBOLIC_CAP = 7
FLAT_TAU = MultiPoly.var("tau")


class CrossCheckFailed(KacflowError, AssertionError):
    """Two independent computation routes disagreed."""


@dataclass(frozen=True)
class ShapeMatrix:
    n1: int
    n2: int
    entries: tuple  # (n-1) x (n-1) tuple of tuples of MultiPoly

    def __post_init__(self):
        if self.n1 < 2 or self.n2 < 2:
            raise BadDimension(f"n1, n2 must be >= 2, got ({self.n1}, {self.n2})")
        m = self.n1 + self.n2 - 1
        rows = tuple(tuple(as_poly(e) for e in row) for row in self.entries)
        if len(rows) != m or any(len(r) != m for r in rows):
            raise BadDimension(f"shape matrix must be {m}x{m}")
        for i in range(m):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise AsymmetricInput(f"a[{i + 1}][{j + 1}] != a[{j + 1}][{i + 1}]")
        object.__setattr__(self, "entries", rows)

    @property
    def size(self) -> int:
        return self.n1 + self.n2 - 1

    def __getitem__(self, ij):
        return self.entries[ij[0]][ij[1]]

    @classmethod
    def symbolic(cls, n1: int, n2: int, zero_first: bool = False) -> "ShapeMatrix":
        """Entries a{i}{j} (1-based, i <= j). ``zero_first`` kills row/column 1."""
        m = n1 + n2 - 1
        rows = []
        for i in range(m):
            row = []
            for j in range(m):
                lo, hi = min(i, j), max(i, j)
                if zero_first and lo == 0:
                    row.append(MultiPoly.zero())
                else:
                    row.append(MultiPoly.var(f"a{lo + 1}{hi + 1}"))
            rows.append(row)
        return cls(n1, n2, tuple(map(tuple, rows)))

    @classmethod
    def from_rows(cls, n1: int, n2: int, rows) -> "ShapeMatrix":
        return cls(n1, n2, tuple(tuple(as_poly(Fraction(e) if isinstance(e, float) else e) for e in r) for r in rows))

    @classmethod
    def random(cls, n1: int, n2: int, seed: int = 0, zero_first: bool = False, max_num: int = 97,
               max_den: int = 13) -> "ShapeMatrix":
        rng = random.Random(seed)
        m = n1 + n2 - 1
        vals = [[Fraction(0)] * m for _ in range(m)]
        for i in range(m):
            for j in range(i, m):
                q = Fraction(0) if zero_first and i == 0 else random_rational(rng, -max_num, max_num, max_den, nonzero=False)
                vals[i][j] = vals[j][i] = q
        return cls.from_rows(n1, n2, vals)

    @classmethod
    def zero(cls, n1: int, n2: int) -> "ShapeMatrix":
        m = n1 + n2 - 1
        return cls.from_rows(n1, n2, [[0] * m for _ in range(m)])

    def is_symbolic(self) -> bool:
        return any(not e.is_constant() for row in self.entries for e in row)

    def trace(self) -> MultiPoly:
        out = MultiPoly.zero()
        for i in range(self.size):
            out = out + self.entries[i][i]
        return out

    def numeric(self) -> np.ndarray:
        return np.array([[float(e.constant_value()) for e in row] for row in self.entries])


def _is_flat(tau1) -> bool:
    return as_poly(tau1).is_zero()


def default_taus(mode: str):
    if mode == "flat":
        return MultiPoly.zero(), FLAT_TAU
    return MultiPoly.var("tau1"), MultiPoly.var("tau2")


def build_B(A: ShapeMatrix, tau1="tau1", tau2="tau2") -> list:
    """Matrix of CSPoly entries; tau1 = 0 gives the flat variant."""
    flat = _is_flat(tau1)
    deg = (flat, False)
    m = A.size
    one = CSPoly.const(1, deg)
    r = CSPoly.r(deg)
    B = []
    B.append([one - r * A[0, 0]] + [-(r * A[0, j]) for j in range(1, m)])
    for i in range(1, m):
        slot = 1 if i < A.n1 else 2
        c, s = CSPoly.c(slot, deg), CSPoly.s(slot, deg)
        row = [-(s * A[i, 0])]
        for j in range(1, m):
            e = -(s * A[i, j])
            if i == j:
                e = e + c
            row.append(e)
        B.append(row)
    return B


def _slot_tau(A: ShapeMatrix, i: int, tau1, tau2):
    if i == 0:
        return MultiPoly.zero()
    return as_poly(tau1) if i < A.n1 else as_poly(tau2)


def ivp_violations(A: ShapeMatrix, tau1="tau1", tau2="tau2", B=None) -> list:
    """Entries of B breaking b'' = tau b, b(0) = delta, b'(0) = -a. Empty when all hold."""
    if B is None:
        B = build_B(A, tau1, tau2)
    bad = []
    for i, row in enumerate(B):
        t = _slot_tau(A, i, tau1, tau2)
        for j, b in enumerate(row):
            d1 = cs_derivative(b, tau1, tau2)
            d2 = cs_derivative(d1, tau1, tau2)
            if not (d2 - b * t).is_zero():
                bad.append((i, j, "second derivative"))
            if cs_at_zero(b) != (1 if i == j else 0):
                bad.append((i, j, "initial value"))
            if cs_at_zero(d1) != -A[i, j]:
                bad.append((i, j, "initial slope"))
    return bad


def ivp_check(A: ShapeMatrix, tau1="tau1", tau2="tau2", B=None) -> bool:
    return not ivp_violations(A, tau1, tau2, B)


def det_cs(B: list) -> CSPoly:
    """Laplace expansion down the columns, memoised on the remaining row set."""
    m = len(B)
    deg = B[0][0].degenerate
    memo: dict = {}

    def minor(rows: tuple, col: int) -> CSPoly:
        if not rows:
            return CSPoly.const(1, deg)
        if rows in memo:
            return memo[rows]
        total = CSPoly.zero(deg)
        for pos, i in enumerate(rows):
            e = B[i][col]
            if e.is_zero():
                continue
            sub = minor(rows[:pos] + rows[pos + 1:], col + 1)
            term = e * sub
            total = total + term if pos % 2 == 0 else total - term
        memo[rows] = total
        return total

    return minor(tuple(range(m)), 0)


def D_cspoly(A: ShapeMatrix, tau1="tau1", tau2="tau2", cap: int = DEFAULT_SYMBOLIC_CAP) -> CSPoly:
    if A.is_symbolic() and A.n1 + A.n2 > cap:
        raise CapExceeded(f"symbolic expansion capped at n1+n2 <= {cap}")
    return det_cs(build_B(A, tau1, tau2))


def expand_D(A: ShapeMatrix, tau1="tau1", tau2="tau2", cap: int = DEFAULT_SYMBOLIC_CAP) -> CoeffVector:
    """P_0: the graded coefficient vector of det B(r)."""
    return project_graded(D_cspoly(A, tau1, tau2, cap), A.n1, A.n2)


def coeff_derivative(P: CoeffVector, tau1="tau1", tau2="tau2") -> CoeffVector:
    """P_{k+1} by rebuilding the function, differentiating and projecting again."""
    if P.mode == "flat":
        tau1 = 0
    return project_graded(cs_derivative(P.to_cspoly(), tau1, tau2), P.n1, P.n2)


@lru_cache(maxsize=64)
def _build_Q_cached(n1, n2, mode, tau1, tau2):
    if mode == "flat":
        return build_kac_second(n1 + 1, n2, 0, tau2)
    K = build_kac_second(n1, n2, tau1, tau2)
    N = n1 * n2
    top = K.hstack(PolyMatrix.identity(N))
    bottom = PolyMatrix.zeros(N, N).hstack(K)
    return top.vstack(bottom)


def build_Q(n1: int, n2: int, tau1="tau1", tau2="tau2", mode: str | None = None) -> PolyMatrix:
    """[[K, I], [0, K]] in the mixed case, K(n1+1, n2, 0, tau) in the flat case."""
    if n1 < 2 or n2 < 2:
        raise BadDimension(f"Q needs n1, n2 >= 2, got ({n1}, {n2})")
    if mode is None:
        mode = "flat" if _is_flat(tau1) else "mixed"
    return _build_Q_cached(n1, n2, mode, as_poly(tau1), as_poly(tau2))


def _mode_of(tau1) -> str:
    return "flat" if _is_flat(tau1) else "mixed"


def recurrence_mismatch(A: ShapeMatrix, tau1="tau1", tau2="tau2", k_max: int = 3,
                        cap: int = DEFAULT_SYMBOLIC_CAP):
    """First (k, slot) where Q P_k differs from the re-differentiated P_{k+1}; None if none."""
    Q = build_Q(A.n1, A.n2, tau1, tau2)
    P = expand_D(A, tau1, tau2, cap)
    for k in range(k_max + 1):
        nxt = coeff_derivative(P, tau1, tau2)
        via_q = Q.apply(P.data)
        for slot, (a, b) in enumerate(zip(nxt.data, via_q)):
            if a != b:
                return (k, slot)
        P = nxt
    return None


def recurrence_check(A: ShapeMatrix, tau1="tau1", tau2="tau2", k_max: int = 3,
                     cap: int = DEFAULT_SYMBOLIC_CAP) -> bool:
    return recurrence_mismatch(A, tau1, tau2, k_max, cap) is None


def dk_sequence(A: ShapeMatrix, tau1="tau1", tau2="tau2", k_max: int = 3,
                cap: int = DEFAULT_SYMBOLIC_CAP, cross_check: bool = True) -> list:
    """d_k = D^(k+1)(0) = e1 Q^(k+1) P_0 for k = 0..k_max."""
    P0 = expand_D(A, tau1, tau2, cap)
    if P0.data[0] != 1:
        raise CrossCheckFailed(f"D(0) = {P0.data[0]}, expected 1")
    Q = build_Q(A.n1, A.n2, tau1, tau2)
    row = Q.row(0)
    out = []
    for k in range(k_max + 1):
        out.append(sum((a * b for a, b in zip(row, P0.data) if a and b), MultiPoly.zero()))
        row = Q.rapply(row)
    if cross_check:
        P = P0
        for k in range(k_max + 1):
            P = coeff_derivative(P, tau1, tau2)
            if P.data[0] != out[k]:
                raise CrossCheckFailed(f"d_{k}: Q route {out[k]} vs derivative route {P.data[0]}")
    return out


# numeric engine ---------------------------------------------------------------

@dataclass(frozen=True)
class ParallelState:
    r: float
    B: np.ndarray
    Bprime: np.ndarray
    A_r: np.ndarray
    H_r: float
    D_r: float
    Dprime_r: float = field(default=float("nan"))

    @property
    def log_derivative_residual(self) -> float:
        """H(r) + D'(r)/D(r); zero up to rounding."""
        return self.H_r + self.Dprime_r / self.D_r


class ParallelFamily:
    """Symbolic pieces of one (A, tau1, tau2) prepared once; ``state(r)`` is numeric."""

    def __init__(self, A: ShapeMatrix, tau1: float, tau2: float):
        if A.is_symbolic():
            raise ValueError("numeric engine needs a rational shape matrix")
        self.A = A
        self.tau1, self.tau2 = float(tau1), float(tau2)
        sym1, sym2 = "tau1", "tau2"
        self.B = build_B(A, sym1, sym2)
        self.Bp = [[cs_derivative(b, sym1, sym2) for b in row] for row in self.B]
        self.D = det_cs(self.B)
        self.Dp = cs_derivative(self.D, sym1, sym2)

    def _ev(self, f, r):
        return cs_eval(f, r, self.tau1, self.tau2)

    def state(self, r: float) -> ParallelState:
        B = np.array([[self._ev(b, r) for b in row] for row in self.B])
        Bp = np.array([[self._ev(b, r) for b in row] for row in self.Bp])
        det = float(np.linalg.det(B))
        if abs(det) <= 1e-12:
            raise SingularB(f"B(r) singular at r={r} (det={det:.3e})")
        A_r = -Bp @ np.linalg.inv(B)
        return ParallelState(
            r=float(r), B=B, Bprime=Bp, A_r=A_r, H_r=float(np.trace(A_r)),
            D_r=self._ev(self.D, r), Dprime_r=self._ev(self.Dp, r),
        )


def parallel_state(A: ShapeMatrix, tau1: float, tau2: float, r: float) -> ParallelState:
    return ParallelFamily(A, tau1, tau2).state(r)
