"""Dense matrices with polynomial entries."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from ..errors import DimensionMismatch, IndexOutOfRange
from .poly import MultiPoly, as_poly, poly_eval


@dataclass(frozen=True)
class PolyMatrix:
    rows: int
    cols: int
    entries: tuple  # row-major MultiPoly

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise DimensionMismatch(
                f"{len(self.entries)} entries for a {self.rows}x{self.cols} matrix"
            )

    # constructors
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "PolyMatrix":
        rows = [list(r) for r in rows]
        if not rows:
            return cls(0, 0, ())
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise DimensionMismatch("ragged rows")
        return cls(len(rows), ncols, tuple(as_poly(x) for r in rows for x in r))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "PolyMatrix":
        z = MultiPoly.zero()
        return cls(rows, cols, (z,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "PolyMatrix":
        one, z = MultiPoly.one(), MultiPoly.zero()
        return cls(n, n, tuple(one if i == j else z for i in range(n) for j in range(n)))

    @classmethod
    def from_function(cls, rows: int, cols: int, fn: Callable[[int, int], object]) -> "PolyMatrix":
        return cls(rows, cols, tuple(as_poly(fn(i, j)) for i in range(rows) for j in range(cols)))

    # access (0-based)
    def __getitem__(self, ij):
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexOutOfRange(f"({i}, {j}) outside {self.rows}x{self.cols}")
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> list:
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def col(self, j: int) -> list:
        return [self.entries[i * self.cols + j] for i in range(self.rows)]

    def to_rows(self) -> list:
        return [self.row(i) for i in range(self.rows)]

    @property
    def shape(self):
        return (self.rows, self.cols)

    def is_square(self) -> bool:
        return self.rows == self.cols

    # algebra
    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} + {other.shape}")
        return PolyMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} - {other.shape}")
        return PolyMatrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self):
        return PolyMatrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def scale(self, c) -> "PolyMatrix":
        c = as_poly(c)
        return PolyMatrix(self.rows, self.cols, tuple(c * a for a in self.entries))

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"{self.shape} @ {other.shape}")
        out = []
        ocols = [other.col(j) for j in range(other.cols)]
        for i in range(self.rows):
            r = self.row(i)
            for col in ocols:
                acc = MultiPoly.zero()
                for a, b in zip(r, col):
                    if a and b:
                        acc = acc + a * b
                out.append(acc)
        return PolyMatrix(self.rows, other.cols, tuple(out))

    def __pow__(self, k: int) -> "PolyMatrix":
        out = PolyMatrix.identity(self.rows)
        for _ in range(k):
            out = out @ self
        return out

    def apply(self, vec: Sequence) -> list:
        """Matrix times column vector of polynomials."""
        if len(vec) != self.cols:
            raise DimensionMismatch(f"vector of length {len(vec)} for {self.cols} columns")
        vec = [as_poly(v) for v in vec]
        out = []
        for i in range(self.rows):
            acc = MultiPoly.zero()
            for a, b in zip(self.row(i), vec):
                if a and b:
                    acc = acc + a * b
            out.append(acc)
        return out

    def rapply(self, vec: Sequence) -> list:
        """Row vector times matrix."""
        if len(vec) != self.rows:
            raise DimensionMismatch(f"row vector of length {len(vec)} for {self.rows} rows")
        vec = [as_poly(v) for v in vec]
        out = []
        for j in range(self.cols):
            acc = MultiPoly.zero()
            for a, b in zip(vec, self.col(j)):
                if a and b:
                    acc = acc + a * b
            out.append(acc)
        return out

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(self.cols, self.rows, tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)))

    def map(self, fn) -> "PolyMatrix":
        return PolyMatrix(self.rows, self.cols, tuple(as_poly(fn(a)) for a in self.entries))

    def subs(self, mapping: Mapping) -> "PolyMatrix":
        return self.map(lambda p: p.subs(mapping))

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "PolyMatrix":
        return PolyMatrix(len(rows), len(cols), tuple(self[i, j] for i in rows for j in cols))

    def delete(self, row: int | None = None, col: int | None = None) -> "PolyMatrix":
        rs = [i for i in range(self.rows) if i != row]
        cs = [j for j in range(self.cols) if j != col]
        return self.submatrix(rs, cs)

    def replace_col(self, j: int, column: Sequence) -> "PolyMatrix":
        column = [as_poly(c) for c in column]
        if len(column) != self.rows:
            raise DimensionMismatch("replacement column has wrong length")
        return PolyMatrix.from_rows(
            [[column[i] if jj == j else self[i, jj] for jj in range(self.cols)] for i in range(self.rows)]
        )

    def hstack(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.rows != other.rows:
            raise DimensionMismatch("hstack row counts differ")
        return PolyMatrix.from_rows([self.row(i) + other.row(i) for i in range(self.rows)])

    def vstack(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.cols:
            raise DimensionMismatch("vstack column counts differ")
        return PolyMatrix(self.rows + other.rows, self.cols, self.entries + other.entries)

    def evaluate(self, assignment: Mapping) -> list:
        """Exact rational matrix (list of lists of Fraction)."""
        return [[poly_eval(self[i, j], assignment) for j in range(self.cols)] for i in range(self.rows)]

    def variables(self) -> set:
        out = set()
        for e in self.entries:
            out |= e.variables()
        return out

    def nonzero_pattern(self) -> list:
        return [[not self[i, j].is_zero() for j in range(self.cols)] for i in range(self.rows)]

    def render(self) -> str:
        """Canonical text form: one ``[a, b, ...]`` line per row."""
        return "\n".join("[" + ", ".join(str(e) for e in self.row(i)) + "]" for i in range(self.rows))

    def __str__(self):
        return self.render()


def kron(A: PolyMatrix, B: PolyMatrix) -> PolyMatrix:
    """Kronecker product, block (i, j) = A[i, j] * B."""
    rows, cols = A.rows * B.rows, A.cols * B.cols
    out = []
    for i in range(rows):
        ia, ib = divmod(i, B.rows)
        for j in range(cols):
            ja, jb = divmod(j, B.cols)
            a = A[ia, ja]
            out.append(a * B[ib, jb] if a else MultiPoly.zero())
    return PolyMatrix(rows, cols, tuple(out))


def rational_matrix(rows: Sequence[Sequence]) -> list:
    return [[Fraction(x) for x in r] for r in rows]
