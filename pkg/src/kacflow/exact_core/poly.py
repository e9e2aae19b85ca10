"""Sparse multivariate polynomials over the rationals.

A monomial is a tuple of ``(name, exponent)`` pairs sorted by a natural
variable key, so ``a2 < a10`` and ``tau1 < tau2``.  Coefficients are kept as
``int`` whenever the denominator is one (much faster than ``Fraction``) and as
``Fraction`` otherwise.
"""
from __future__ import annotations

import ast
import re
from functools import lru_cache
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Iterable, Mapping, Sequence

from ..errors import InexactDivision, UnboundVariable

Rational = Fraction

Monomial = tuple  # tuple[tuple[str, int], ...]

_SPLIT = re.compile(r"(\d+)")


@lru_cache(maxsize=None)
def var_key(name: str):
    """Natural sort key: alphabetic runs compare as text, digit runs as ints."""
    parts = _SPLIT.split(name)
    return tuple(int(p) if p.isdigit() else p for p in parts if p != "")


def _norm(c):
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, int):
        return c
    if isinstance(c, _RationalABC):
        return _norm(Fraction(c.numerator, c.denominator))
    raise TypeError(f"not an exact rational: {c!r}")


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    out = []
    i = j = 0
    while i < len(m1) and j < len(m2):
        a, b = m1[i], m2[j]
        if a[0] == b[0]:
            out.append((a[0], a[1] + b[1]))
            i += 1
            j += 1
        elif var_key(a[0]) < var_key(b[0]):
            out.append(a)
            i += 1
        else:
            out.append(b)
            j += 1
    out.extend(m1[i:])
    out.extend(m2[j:])
    return tuple(out)


def _mono_div(m1: Monomial, m2: Monomial):
    """m1 / m2 as a monomial, or None when m2 does not divide m1."""
    d1 = dict(m1)
    for v, e in m2:
        if d1.get(v, 0) < e:
            return None
        d1[v] -= e
    return tuple(sorted(((v, e) for v, e in d1.items() if e), key=lambda t: var_key(t[0])))


def _mono_deg(m: Monomial) -> int:
    return sum(e for _, e in m)


def _lex_key(m: Monomial, order: Sequence[str]):
    # dense exponent vector, so a missing leading variable compares low
    d = dict(m)
    return tuple(d.get(v, 0) for v in order)


class MultiPoly:
    """Immutable sparse polynomial with exact rational coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping | None = None):
        clean = {}
        if terms:
            for mono, c in terms.items():
                c = _norm(c)
                if c:
                    clean[mono] = c
        self._terms = clean
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def _raw(cls, terms: dict) -> "MultiPoly":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c) -> "MultiPoly":
        c = _norm(c)
        return cls._raw({(): c} if c else {})

    @classmethod
    def var(cls, name: str, power: int = 1) -> "MultiPoly":
        if power == 0:
            return cls.const(1)
        return cls._raw({((name, power),): 1})

    @classmethod
    def zero(cls) -> "MultiPoly":
        return cls._raw({})

    @classmethod
    def one(cls) -> "MultiPoly":
        return cls._raw({(): 1})

    # queries ------------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def variables(self) -> set:
        return {v for mono in self._terms for v, _ in mono}

    def total_degree(self) -> int:
        """Largest monomial degree; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        return max(_mono_deg(m) for m in self._terms)

    def degree_in(self, names: Iterable[str]) -> int:
        names = set(names)
        if not self._terms:
            return -1
        return max(sum(e for v, e in m if v in names) for m in self._terms)

    def is_homogeneous(self, names: Iterable[str] | None = None) -> bool:
        """True when all terms share one degree (in ``names`` if given). Zero counts."""
        if names is None:
            degs = {_mono_deg(m) for m in self._terms}
        else:
            names = set(names)
            degs = {sum(e for v, e in m if v in names) for m in self._terms}
        return len(degs) <= 1

    def is_constant(self) -> bool:
        return all(m == () for m in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return Fraction(self._terms.get((), 0))

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def coefficient(self, mono) -> Fraction:
        if isinstance(mono, dict):
            mono = tuple(sorted(((v, e) for v, e in mono.items() if e), key=lambda t: var_key(t[0])))
        return Fraction(self._terms.get(mono, 0))

    def coeffs_in(self, names: Iterable[str]) -> dict:
        """Split into {monomial in ``names``: coefficient polynomial in the rest}."""
        names = set(names)
        out: dict = {}
        for mono, c in self._terms.items():
            inner = tuple(t for t in mono if t[0] in names)
            outer = tuple(t for t in mono if t[0] not in names)
            bucket = out.setdefault(inner, {})
            bucket[outer] = bucket.get(outer, 0) + c
        return {k: MultiPoly(v) for k, v in out.items()}

    # arithmetic ---------------------------------------------------------
    @staticmethod
    def _coerce(other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            return other
        if isinstance(other, (int, Fraction)) or isinstance(other, _RationalABC):
            return MultiPoly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = _norm(s) if isinstance(s, Fraction) else s
            else:
                out.pop(m, None)
        return MultiPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self._terms or not other._terms:
            return MultiPoly._raw({})
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return MultiPoly({m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        result = MultiPoly.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c) -> "MultiPoly":
        c = _norm(c)
        if not c:
            return MultiPoly.zero()
        return MultiPoly({m: v * c for m, v in self._terms.items()})

    def __truediv__(self, c):
        # only division by a nonzero rational constant
        if isinstance(c, MultiPoly):
            c = c.constant_value()
        c = Fraction(c)
        if c == 0:
            raise ZeroDivisionError("division by zero")
        return self.scale(1 / c)

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self._terms == other._terms
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # substitution / evaluation -------------------------------------------
    def subs(self, mapping: Mapping) -> "MultiPoly":
        """Replace variables by polynomials or rationals; others are kept."""
        if not mapping:
            return self
        repl = {k: self._coerce(v) for k, v in mapping.items()}
        cache: dict = {}
        out = MultiPoly.zero()
        for mono, c in self._terms.items():
            term = MultiPoly.const(c)
            keep = []
            for v, e in mono:
                if v in repl:
                    key = (v, e)
                    if key not in cache:
                        cache[key] = repl[v] ** e
                    term = term * cache[key]
                else:
                    keep.append((v, e))
            if keep:
                term = term * MultiPoly._raw({tuple(keep): 1})
            out = out + term
        return out

    def evaluate(self, assignment: Mapping, zero=0):
        """Generic evaluation; values may be floats, numpy arrays, Fractions."""
        total = zero
        for mono, c in self._terms.items():
            term = c
            for v, e in mono:
                if v not in assignment:
                    raise UnboundVariable(v)
                term = term * assignment[v] ** e
            total = total + term
        return total

    def diff(self, name: str) -> "MultiPoly":
        out: dict = {}
        for mono, c in self._terms.items():
            for i, (v, e) in enumerate(mono):
                if v == name:
                    m = mono[:i] + (((v, e - 1),) if e > 1 else ()) + mono[i + 1:]
                    out[m] = out.get(m, 0) + c * e
        return MultiPoly(out)

    # division (exact only) ----------------------------------------------
    def leading(self, order: Sequence[str] | None = None):
        """Leading (monomial, coefficient) in lex order over ``order``."""
        if order is None:
            order = sorted(self.variables(), key=var_key)
        mono = max(self._terms, key=lambda m: _lex_key(m, order))
        return mono, self._terms[mono]

    def exact_div(self, other: "MultiPoly") -> "MultiPoly":
        """Quotient when ``other`` divides ``self`` exactly; else InexactDivision.

        Only used by the fraction-free determinant, where every division is
        known to be exact.
        """
        if not other._terms:
            raise ZeroDivisionError("division by zero polynomial")
        if other.is_constant():
            return self / other.constant_value()
        order = sorted(self.variables() | other.variables(), key=var_key)
        lm, lc = other.leading(order)
        rem = self
        quot: dict = {}
        while rem._terms:
            m, c = rem.leading(order)
            q = _mono_div(m, lm)
            if q is None:
                raise InexactDivision(f"{other} does not divide {self}")
            qc = _norm(Fraction(c) / lc)
            quot[q] = qc
            rem = rem - other * MultiPoly._raw({q: qc})
        return MultiPoly(quot)

    # rendering ----------------------------------------------------------
    def _sorted_terms(self):
        return sorted(
            self._terms.items(),
            key=lambda mc: (-_mono_deg(mc[0]), tuple((var_key(v), -e) for v, e in mc[0])),
        )

    def __str__(self):
        if not self._terms:
            return "0"
        pieces = []
        for idx, (mono, c) in enumerate(self._sorted_terms()):
            neg = c < 0
            a = -c if neg else c
            body = "*".join(v if e == 1 else f"{v}^{e}" for v, e in mono)
            if not body:
                txt = str(a)
            elif a == 1:
                txt = body
            else:
                txt = f"{a}*{body}"
            if idx == 0:
                pieces.append(("-" if neg else "") + txt)
            else:
                pieces.append((" - " if neg else " + ") + txt)
        return "".join(pieces)

    def __repr__(self):
        return f"MultiPoly({str(self)!r})"


def poly_eval(p: MultiPoly, assignment: Mapping) -> Fraction:
    """Exact value of ``p`` under a rational assignment."""
    total = Fraction(0)
    for mono, c in p.items():
        term = Fraction(c)
        for v, e in mono:
            try:
                val = assignment[v]
            except KeyError:
                raise UnboundVariable(v) from None
            term *= Fraction(val) ** e
        total += term
    return total


def as_poly(x) -> MultiPoly:
    if isinstance(x, MultiPoly):
        return x
    if isinstance(x, str):
        return parse_poly(x)
    return MultiPoly.const(x)


# parsing ------------------------------------------------------------------

def parse_poly(text: str) -> MultiPoly:
    """Parse e.g. ``"3*tau^2 - 1/2*x*y + 4"``; ``^`` and ``**`` both mean power."""
    src = text.replace("^", "**").strip()
    if not src:
        raise ValueError("empty polynomial text")
    tree = ast.parse(src, mode="eval")
    return _walk(tree.body)


def _walk(node) -> MultiPoly:
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return MultiPoly.const(node.value)
    if isinstance(node, ast.Name):
        return MultiPoly.var(node.id)
    if isinstance(node, ast.UnaryOp):
        inner = _walk(node.operand)
        if isinstance(node.op, ast.USub):
            return -inner
        if isinstance(node.op, ast.UAdd):
            return inner
    if isinstance(node, ast.BinOp):
        left = _walk(node.left)
        if isinstance(node.op, ast.Pow):
            if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)):
                raise ValueError("exponent must be an integer literal")
            return left ** node.right.value
        right = _walk(node.right)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            return left / right.constant_value()
    raise ValueError(f"unsupported syntax in polynomial: {ast.dump(node)}")


def reduce_radicals(p: MultiPoly, radicands: Mapping) -> MultiPoly:
    """Rewrite ``w^e`` as ``radicand^(e//2) * w^(e%2)`` for each ``w`` in ``radicands``."""
    rads = {k: as_poly(v) for k, v in radicands.items()}
    out = MultiPoly.zero()
    for mono, c in p.items():
        term = MultiPoly.const(c)
        keep = []
        for v, e in mono:
            if v in rads and e >= 2:
                term = term * rads[v] ** (e // 2)
                if e % 2:
                    keep.append((v, 1))
            else:
                keep.append((v, e))
        if keep:
            term = term * MultiPoly._raw({tuple(keep): 1})
        out = out + term
    return out
