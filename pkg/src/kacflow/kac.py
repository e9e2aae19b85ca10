"""Modified Kac matrices of first and second type and their spectral facts.

``build_kac_first(n, y)`` is the n x n matrix of d/dt acting on coefficient
vectors in the basis c^(n-1-j) s^j, where c' = y s and s' = c.  The second
type is the Kronecker sum of two of those.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .errors import BadDimension, DependentPair, IndexOutOfRange
from .exact_core import (
    MultiPoly,
    PolyMatrix,
    QuadExtElem,
    as_poly,
    det_fraction_free,
    kron,
    rank_rational,
    reduce_radicals,
    solve_exact,
)

T = MultiPoly.var("t")


def build_kac_first(n2: int, y) -> PolyMatrix:
    if not isinstance(n2, int) or n2 < 1:
        raise BadDimension(f"first-type Kac matrix needs n >= 1, got {n2!r}")
    y = as_poly(y)

    def entry(i, j):  # 0-based
        if j == i + 1:
            return i + 1
        if j == i - 1:
            return (n2 - 1 - j) * y
        return 0

    return PolyMatrix.from_function(n2, n2, entry)


def build_kac_second(n1: int, n2: int, x, y) -> PolyMatrix:
    """I (x) K(n2, y) + K(n1, x) (x) I."""
    if not all(isinstance(n, int) and n >= 1 for n in (n1, n2)):
        raise BadDimension(f"bad dimensions ({n1!r}, {n2!r})")
    return kron(PolyMatrix.identity(n1), build_kac_first(n2, y)) + kron(
        build_kac_first(n1, x), PolyMatrix.identity(n2)
    )


def mixed_product_check(A, B, C, D) -> dict:
    """Compare (A(x)B)(C(x)D) with the standard AC(x)BD and with the misprinted AC(x)BC."""
    lhs = kron(A, B) @ kron(C, D)
    out = {"standard": lhs == kron(A @ C, B @ D)}
    try:
        out["printed"] = lhs == kron(A @ C, B @ C)
    except Exception:  # shapes may not even allow B @ C
        out["printed"] = False
    return out


# independence / spectrum -------------------------------------------------

def _index_set(n: int) -> list:
    return [n - 1 - 2 * r for r in range(n)]


def check_independence(n1: int, n2: int, sx, sy) -> bool:
    """Brute-force test that (a1-b1)*sx + (a2-b2)*sy = 0 forces a = b."""
    sx, sy = Fraction(sx), Fraction(sy)
    N1, N2 = _index_set(n1), _index_set(n2)
    for a1, b1, a2, b2 in itertools.product(N1, N1, N2, N2):
        if (a1, a2) == (b1, b2):
            continue
        if (a1 - b1) * sx + (a2 - b2) * sy == 0:
            return False
    return True


def eigenvalue(n1, n2, sx, sy, u, v):
    return (n1 - 1 - 2 * u) * sx + (n2 - 1 - 2 * v) * sy


@dataclass(frozen=True)
class SpectrumReport:
    predicted: tuple  # lambda_{uv}, u-major
    computed_rank: int
    parity_expected_rank: int
    simple: bool
    charpoly: MultiPoly = field(repr=False, default=None)
    charpoly_matches: bool = False
    squarefree: bool = False

    @property
    def ok(self) -> bool:
        return (
            self.simple
            and self.charpoly_matches
            and self.squarefree
            and self.computed_rank == self.parity_expected_rank
        )


def predicted_spectrum(n1: int, n2: int, sx, sy) -> SpectrumReport:
    if not check_independence(n1, n2, sx, sy):
        raise DependentPair(f"({sx}, {sy}) is not ({n1},{n2})-independent")
    sx, sy = Fraction(sx), Fraction(sy)
    lams = tuple(eigenvalue(n1, n2, sx, sy, u, v) for u in range(n1) for v in range(n2))
    K = build_kac_second(n1, n2, sx * sx, sy * sy)
    n = n1 * n2
    tI_minus_K = PolyMatrix.identity(n).scale(T) - K
    chi = det_fraction_free(tI_minus_K)
    prod = MultiPoly.one()
    for lam in lams:
        prod = prod * (T - lam)
    dchi = chi.diff("t")
    squarefree = all(dchi.subs({"t": lam}).constant_value() != 0 for lam in lams)
    rank = rank_rational([[e.constant_value() for e in K.row(i)] for i in range(n)])
    return SpectrumReport(
        predicted=lams,
        computed_rank=rank,
        parity_expected_rank=n if n % 2 == 0 else n - 1,
        simple=len(set(lams)) == n,
        charpoly=chi,
        charpoly_matches=chi == prod,
        squarefree=squarefree,
    )


# eigenvectors -------------------------------------------------------------

def _one_like(w):
    if isinstance(w, QuadExtElem):
        return QuadExtElem.lift(1, w.radicand)
    if isinstance(w, MultiPoly):
        return MultiPoly.one()
    return Fraction(1)


def kac_eigenvector_first(n2: int, w, v: int) -> list:
    """Coefficients of (c + w s)^(n2-1-v) (c - w s)^v in the basis c^(n2-1-j) s^j.

    Eigenvalue (n2-1-2v)*w for build_kac_first(n2, w^2).
    """
    if not 0 <= v <= n2 - 1:
        raise IndexOutOfRange(f"v={v} outside 0..{n2 - 1}")
    one = _one_like(w)
    out = []
    wp = one
    for j in range(n2):
        c = sum(comb(n2 - 1 - v, i) * comb(v, j - i) * (-1) ** (j - i) for i in range(0, j + 1) if j - i <= v)
        out.append(wp * c)
        wp = wp * w
    return out


def _kron_vec(a, b):
    return [x * y for x in a for y in b]


def eigenvector_second(n1: int, n2: int, w1, w2, u: int, v: int) -> list:
    if not 0 <= u <= n1 - 1:
        raise IndexOutOfRange(f"u={u} outside 0..{n1 - 1}")
    if not 0 <= v <= n2 - 1:
        raise IndexOutOfRange(f"v={v} outside 0..{n2 - 1}")
    return _kron_vec(kac_eigenvector_first(n1, w1, u), kac_eigenvector_first(n2, w2, v))


def verify_eigenvector_first(n2: int, v: int, w=None) -> bool:
    """Exact check K(n2, w^2) e = (n2-1-2v) w e in Q[y](w)."""
    if w is None:
        w = QuadExtElem.sqrt(MultiPoly.var("y"))
    y = w.radicand if isinstance(w, QuadExtElem) else w * w
    K = build_kac_first(n2, y)
    e = kac_eigenvector_first(n2, w, v)
    lam = w * (n2 - 1 - 2 * v)
    for i in range(n2):
        acc = lam * e[i] * -1
        for j in range(n2):
            kij = K[i, j]
            if kij:
                acc = acc + e[j] * kij
        if not (acc.is_zero() if isinstance(acc, QuadExtElem) else acc == 0):
            return False
    return True


def verify_eigenvector_second(n1: int, n2: int, u: int, v: int, sx=None, sy=None) -> bool:
    """K e = lambda e, either at rational (sx, sy) or symbolically in Q[x,y](w1,w2)."""
    if sx is None:
        w1, w2 = MultiPoly.var("w1"), MultiPoly.var("w2")
        x, y = MultiPoly.var("x"), MultiPoly.var("y")
        rads = {"w1": x, "w2": y}
    else:
        w1, w2 = MultiPoly.const(sx), MultiPoly.const(sy)
        x, y = w1 * w1, w2 * w2
        rads = {}
    K = build_kac_second(n1, n2, x, y)
    e = eigenvector_second(n1, n2, w1, w2, u, v)
    lam = w1 * (n1 - 1 - 2 * u) + w2 * (n2 - 1 - 2 * v)
    Ke = K.apply(e)
    return all(reduce_radicals(a - lam * b, rads).is_zero() for a, b in zip(Ke, e))


def e1_coordinate_formula(n1: int, n2: int) -> tuple:
    den = 2 ** (n1 + n2 - 2)
    return tuple(Fraction(comb(n1 - 1, u) * comb(n2 - 1, v), den) for u in range(n1) for v in range(n2))


def e1_eigen_coordinates(n1: int, n2: int, sx=2, sy=3) -> tuple:
    """Coordinates of e1 in the eigenbasis, by an exact linear solve."""
    if not check_independence(n1, n2, sx, sy):
        raise DependentPair(f"({sx}, {sy}) is not ({n1},{n2})-independent")
    sx, sy = Fraction(sx), Fraction(sy)
    basis = [eigenvector_second(n1, n2, sx, sy, u, v) for u in range(n1) for v in range(n2)]
    n = n1 * n2
    cols = [[basis[k][i] for k in range(n)] for i in range(n)]
    rhs = [1] + [0] * (n - 1)
    sol = solve_exact(cols, rhs)
    return sol.particular


# structure of powers --------------------------------------------------------

def has_chessboard_structure(P: PolyMatrix, m: int) -> bool:
    """Zero where i+j+m is odd; other nonzero entries are monomials with positive integer coefficient."""
    for i in range(P.rows):
        for j in range(P.cols):
            e = P[i, j]
            if (i + j + m) % 2:
                if not e.is_zero():
                    return False
            elif not e.is_zero():
                if not e.is_monomial():
                    return False
                (_, c), = e.items()
                if not (isinstance(c, int) and c > 0):
                    return False
    return True


def chessboard_check(n2: int, y="y", m: int = 1) -> bool:
    return has_chessboard_structure(build_kac_first(n2, y) ** m, m)


def km_binomial_check(n1: int, n2: int, x="x", y="y", m: int = 1) -> bool:
    K = build_kac_second(n1, n2, x, y)
    A, B = build_kac_first(n1, x), build_kac_first(n2, y)
    rhs = PolyMatrix.zeros(n1 * n2, n1 * n2)
    for j in range(m + 1):
        rhs = rhs + kron(A ** j, B ** (m - j)).scale(comb(m, j))
    return K ** m == rhs


def first_row_block_polys(n1: int, x, m: int) -> list:
    """For each block l=1..n1: {power p of K(n2,.): coefficient in x}.

    Block (1, l) of K^m equals sum_j binom(m, j) (K(n1,x)^j)[0, l-1] K(n2,y)^(m-j).
    """
    A = build_kac_first(n1, x)
    out = [dict() for _ in range(n1)]
    Aj = PolyMatrix.identity(n1)
    for j in range(m + 1):
        for ell in range(n1):
            c = Aj[0, ell]
            if not c.is_zero():
                out[ell][m - j] = c.scale(comb(m, j))
        Aj = Aj @ A
    return out


def first_row_blocks(n1: int, n2: int, x="x", y="y", m: int = 1) -> list:
    """The n1 blocks of size n2 x n2 in the first block row of K^m, read off the power directly."""
    Km = build_kac_second(n1, n2, x, y) ** m
    return [Km.submatrix(list(range(n2)), list(range(ell * n2, (ell + 1) * n2))) for ell in range(n1)]


def block_poly_matrix(poly: dict, n2: int, y="y") -> PolyMatrix:
    B = build_kac_first(n2, y)
    out = PolyMatrix.zeros(n2, n2)
    for p, c in poly.items():
        out = out + (B ** p).scale(c)
    return out


def first_row_blocks_check(n1: int, n2: int, m: int, x="x", y="y") -> bool:
    """Direct blocks agree with the polynomial-in-K representation; parity and vanishing hold."""
    blocks = first_row_blocks(n1, n2, x, y, m)
    polys = first_row_block_polys(n1, x, m)
    for ell, (blk, poly) in enumerate(zip(blocks, polys), start=1):
        if blk != block_poly_matrix(poly, n2, y):
            return False
        if m - ell <= -2 and poly:
            return False
        if any((p - (m - ell + 1)) % 2 for p in poly):
            return False
        if not all(c.is_monomial() for c in poly.values()):
            return False
    return True


# transcription of the n1 = 5 block table ----------------------------------
# each cell: {power of K: coefficient text}; "tau2" in the m=4 row is as printed
BLOCK_TABLE_N5 = {
    1: [{1: "1"}, {0: "1"}, {}, {}, {}],
    2: [{2: "1", 0: "4*tau1"}, {1: "1"}, {0: "2"}, {}, {}],
    3: [{3: "1", 1: "8"}, {2: "1", 0: "10*tau1"}, {1: "2"}, {0: "6"}, {}],
    4: [{4: "1", 2: "12*tau1", 0: "40*tau1^2"}, {3: "1", 1: "14*tau1"}, {2: "2", 0: "32*tau2"}, {1: "6"}, {0: "24"}],
}


@dataclass(frozen=True)
class BlockCell:
    m: int
    ell: int
    printed: dict
    computed: dict

    @property
    def matches(self) -> bool:
        return self.printed == self.computed


def _render_block_poly(poly: dict) -> str:
    if not poly:
        return "O"
    parts = []
    for p in sorted(poly, reverse=True):
        c = poly[p]
        mat = "I" if p == 0 else ("K" if p == 1 else f"K^{p}")
        if c == 1:
            parts.append(mat)
        elif c.is_monomial():
            parts.append(f"{c}*{mat}")
        else:
            parts.append(f"({c})*{mat}")
    return " + ".join(parts)


def compare_block_table() -> list:
    """Every cell of the transcribed n1=5 table against the direct computation (x = tau1)."""
    out = []
    for m, row in BLOCK_TABLE_N5.items():
        computed = first_row_block_polys(5, MultiPoly.var("tau1"), m)
        for ell, cell in enumerate(row, start=1):
            printed = {p: as_poly(c) for p, c in cell.items()}
            out.append(BlockCell(m, ell, printed, computed[ell - 1]))
    return out
