"""The algebra of r^a c1^b s1^c c2^d s2^e with polynomial coefficients.

Derivatives follow s' = c and c' = tau*s.  A slot flagged degenerate means
tau = 0 there, so s becomes r and c becomes 1; such slots never carry c/s
exponents.  Nothing is ever rewritten with c^2 - tau s^2 = 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import GradingViolation, ModeMismatch, UnboundVariable
from .exact_core import MultiPoly, as_poly

# (r, c1, s1, c2, s2)
Atom = tuple

TAU1 = MultiPoly.var("tau1")
TAU2 = MultiPoly.var("tau2")


def _atom_mul(a: Atom, b: Atom) -> Atom:
    return tuple(x + y for x, y in zip(a, b))


class CSPoly:
    __slots__ = ("terms", "degenerate")

    def __init__(self, terms: Mapping | None = None, degenerate=(False, False)):
        self.degenerate = tuple(bool(f) for f in degenerate)
        clean = {}
        for atom, c in (terms or {}).items():
            c = as_poly(c)
            if c.is_zero():
                continue
            atom = tuple(atom)
            if len(atom) != 5:
                raise ValueError(f"atom must have 5 exponents, got {atom}")
            for slot, flag in enumerate(self.degenerate):
                if flag and (atom[1 + 2 * slot] or atom[2 + 2 * slot]):
                    raise ModeMismatch(f"atom {atom} uses c/s in degenerate slot {slot + 1}")
            clean[atom] = clean[atom] + c if atom in clean else c
            if clean[atom].is_zero():
                del clean[atom]
        self.terms = clean

    # constructors
    @classmethod
    def const(cls, c, degenerate=(False, False)) -> "CSPoly":
        return cls({(0, 0, 0, 0, 0): c}, degenerate)

    @classmethod
    def r(cls, degenerate=(False, False)) -> "CSPoly":
        return cls({(1, 0, 0, 0, 0): 1}, degenerate)

    @classmethod
    def c(cls, slot: int, degenerate=(False, False)) -> "CSPoly":
        if degenerate[slot - 1]:
            return cls.const(1, degenerate)
        atom = [0] * 5
        atom[2 * slot - 1] = 1
        return cls({tuple(atom): 1}, degenerate)

    @classmethod
    def s(cls, slot: int, degenerate=(False, False)) -> "CSPoly":
        if degenerate[slot - 1]:
            return cls.r(degenerate)
        atom = [0] * 5
        atom[2 * slot] = 1
        return cls({tuple(atom): 1}, degenerate)

    @classmethod
    def zero(cls, degenerate=(False, False)) -> "CSPoly":
        return cls({}, degenerate)

    # arithmetic
    def _check(self, other: "CSPoly"):
        if self.degenerate != other.degenerate:
            raise ModeMismatch(f"flags {self.degenerate} vs {other.degenerate}")

    def _lift(self, other):
        if isinstance(other, CSPoly):
            self._check(other)
            return other
        return CSPoly.const(other, self.degenerate)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = out[a] + c if a in out else c
        return CSPoly(out, self.degenerate)

    __radd__ = __add__

    def __neg__(self):
        return CSPoly({a: -c for a, c in self.terms.items()}, self.degenerate)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        return cs_mul(self, self._lift(other))

    def __rmul__(self, other):
        return cs_mul(self._lift(other), self)

    def __eq__(self, other):
        if not isinstance(other, CSPoly):
            other = CSPoly.const(other, self.degenerate)
        return self.degenerate == other.degenerate and self.terms == other.terms

    def __hash__(self):
        return hash((self.degenerate, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def map_coeffs(self, fn) -> "CSPoly":
        return CSPoly({a: fn(c) for a, c in self.terms.items()}, self.degenerate)

    def __str__(self):
        if not self.terms:
            return "0"
        names = ("r", "c1", "s1", "c2", "s2")
        parts = []
        for atom in sorted(self.terms, reverse=True):
            mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, atom) if e)
            parts.append(f"({self.terms[atom]})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    __repr__ = __str__


def cs_mul(f: CSPoly, g: CSPoly) -> CSPoly:
    if f.degenerate != g.degenerate:
        raise ModeMismatch(f"flags {f.degenerate} vs {g.degenerate}")
    out: dict = {}
    for a1, c1 in f.terms.items():
        for a2, c2 in g.terms.items():
            a = _atom_mul(a1, a2)
            p = c1 * c2
            out[a] = out[a] + p if a in out else p
    return CSPoly(out, f.degenerate)


def cs_derivative(f: CSPoly, tau1=TAU1, tau2=TAU2) -> CSPoly:
    """Product rule with r' = 1, s' = c, c' = tau*s."""
    taus = (as_poly(tau1), as_poly(tau2))
    out: dict = {}

    def add(atom, coeff):
        out[atom] = out[atom] + coeff if atom in out else coeff

    for atom, c in f.terms.items():
        r = atom[0]
        if r:
            add((r - 1,) + atom[1:], c.scale(r))
        for slot in (0, 1):
            ic, js = 1 + 2 * slot, 2 + 2 * slot
            cp, sp = atom[ic], atom[js]
            if cp:
                a = list(atom)
                a[ic] -= 1
                a[js] += 1
                add(tuple(a), c * taus[slot].scale(cp))
            if sp:
                a = list(atom)
                a[js] -= 1
                a[ic] += 1
                add(tuple(a), c.scale(sp))
    return CSPoly(out, f.degenerate)


def sc_values(tau, r):
    """(s_tau(r), c_tau(r)) in floating point; works on numpy arrays."""
    tau = float(tau)
    r = np.asarray(r, dtype=float)
    if tau > 0:
        q = np.sqrt(tau)
        return np.sinh(q * r) / q, np.cosh(q * r)
    if tau < 0:
        q = np.sqrt(-tau)
        return np.sin(q * r) / q, np.cos(q * r)
    return r.copy(), np.ones_like(r)


def cs_eval(f: CSPoly, r, tau1, tau2, coeff_assignment: Mapping | None = None):
    """Numeric value; the coefficient assignment may omit tau1/tau2."""
    env = {"tau1": float(tau1), "tau2": float(tau2), "tau": float(tau2)}
    for k, v in (coeff_assignment or {}).items():
        env[k] = float(v)
    s1, c1 = sc_values(tau1, r)
    s2, c2 = sc_values(tau2, r)
    rr = np.asarray(r, dtype=float)
    total = np.zeros_like(rr)
    for (a, b, c, d, e), coef in f.terms.items():
        try:
            k = float(coef.evaluate(env))
        except UnboundVariable:
            raise
        total = total + k * rr ** a * c1 ** b * s1 ** c * c2 ** d * s2 ** e
    return float(total) if total.ndim == 0 else total


def cs_at_zero(f: CSPoly) -> MultiPoly:
    """Exact value at r = 0 (s = 0, c = 1, r = 0)."""
    out = MultiPoly.zero()
    for (a, b, c, d, e), coef in f.terms.items():
        if a == 0 and c == 0 and e == 0:
            out = out + coef
    return out


def specialize_flat(f: CSPoly) -> CSPoly:
    """Send slot 1 to tau1 = 0: c1 -> 1, s1 -> r, tau1 -> 0 in coefficients."""
    if f.degenerate[0]:
        return f
    out: dict = {}
    for (a, b, c, d, e), coef in f.terms.items():
        atom = (a + c, 0, 0, d, e)
        k = coef.subs({"tau1": 0})
        out[atom] = out[atom] + k if atom in out else k
    return CSPoly(out, (True, f.degenerate[1]))


@dataclass(frozen=True)
class CoeffVector:
    """Stacked coefficients of a graded element.

    mixed: (alpha_{u,v} u-major | beta_{u,v}) for r^0 and r^1 parts;
    flat: alpha_{u,v} for u = 0..n1 (power of r), u-major.
    """

    n1: int
    n2: int
    mode: str
    data: tuple

    def __post_init__(self):
        want = 2 * self.n1 * self.n2 if self.mode == "mixed" else (self.n1 + 1) * self.n2
        if self.mode not in ("mixed", "flat"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if len(self.data) != want:
            raise ValueError(f"{self.mode} vector needs {want} entries, got {len(self.data)}")

    def __len__(self):
        return len(self.data)

    def alpha(self, u: int, v: int) -> MultiPoly:
        return self.data[u * self.n2 + v]

    def beta(self, u: int, v: int) -> MultiPoly:
        if self.mode != "mixed":
            raise ModeMismatch("flat vectors have no beta block")
        return self.data[self.n1 * self.n2 + u * self.n2 + v]

    def labels(self) -> list:
        if self.mode == "mixed":
            return [("alpha", u, v) for u in range(self.n1) for v in range(self.n2)] + [
                ("beta", u, v) for u in range(self.n1) for v in range(self.n2)
            ]
        return [("alpha", u, v) for u in range(self.n1 + 1) for v in range(self.n2)]

    def to_cspoly(self) -> CSPoly:
        n1, n2 = self.n1, self.n2
        terms = {}
        if self.mode == "mixed":
            for u in range(n1):
                for v in range(n2):
                    terms[(0, n1 - 1 - u, u, n2 - 1 - v, v)] = self.alpha(u, v)
                    terms[(1, n1 - 1 - u, u, n2 - 1 - v, v)] = self.beta(u, v)
            return CSPoly(terms, (False, False))
        for u in range(n1 + 1):
            for v in range(n2):
                terms[(u, 0, 0, n2 - 1 - v, v)] = self.alpha(u, v)
        return CSPoly(terms, (True, False))


def project_graded(f: CSPoly, n1: int, n2: int) -> CoeffVector:
    """Read off the graded coefficient vector; GradingViolation on any stray atom."""
    flat = f.degenerate[0]
    if f.degenerate[1]:
        raise ModeMismatch("slot 2 may not be degenerate")
    if flat:
        data = [MultiPoly.zero()] * ((n1 + 1) * n2)
        for atom, c in f.terms.items():
            r, _, _, cp, sp = atom
            if cp + sp != n2 - 1 or r > n1:
                raise GradingViolation(atom)
            data[r * n2 + sp] = c
        return CoeffVector(n1, n2, "flat", tuple(data))
    N = n1 * n2
    data = [MultiPoly.zero()] * (2 * N)
    for atom, c in f.terms.items():
        r, c1, s1, c2, s2 = atom
        if c1 + s1 != n1 - 1 or c2 + s2 != n2 - 1 or r > 1:
            raise GradingViolation(atom)
        data[r * N + s1 * n2 + s2] = c
    return CoeffVector(n1, n2, "mixed", tuple(data))
