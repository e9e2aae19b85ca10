"""Quadratic extension ``base + radical*w`` with ``w^2 = radicand``."""
from __future__ import annotations

from dataclasses import dataclass

from .poly import MultiPoly, as_poly


@dataclass(frozen=True)
class QuadExtElem:
    base: MultiPoly
    radical: MultiPoly
    radicand: MultiPoly

    def __post_init__(self):
        object.__setattr__(self, "base", as_poly(self.base))
        object.__setattr__(self, "radical", as_poly(self.radical))
        object.__setattr__(self, "radicand", as_poly(self.radicand))

    @classmethod
    def sqrt(cls, radicand) -> "QuadExtElem":
        return cls(MultiPoly.zero(), MultiPoly.one(), radicand)

    @classmethod
    def lift(cls, value, radicand) -> "QuadExtElem":
        return cls(as_poly(value), MultiPoly.zero(), radicand)

    def _other(self, other) -> "QuadExtElem":
        if isinstance(other, QuadExtElem):
            if other.radicand != self.radicand:
                raise ValueError("mixing different radicands")
            return other
        return QuadExtElem(as_poly(other), MultiPoly.zero(), self.radicand)

    def __add__(self, other):
        o = self._other(other)
        return QuadExtElem(self.base + o.base, self.radical + o.radical, self.radicand)

    __radd__ = __add__

    def __neg__(self):
        return QuadExtElem(-self.base, -self.radical, self.radicand)

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return self._other(other) - self

    def __mul__(self, other):
        o = self._other(other)
        base = self.base * o.base + self.radical * o.radical * self.radicand
        rad = self.base * o.radical + self.radical * o.base
        return QuadExtElem(base, rad, self.radicand)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = QuadExtElem.lift(1, self.radicand)
        for _ in range(k):
            out = out * self
        return out

    def conj(self) -> "QuadExtElem":
        return QuadExtElem(self.base, -self.radical, self.radicand)

    def norm(self) -> MultiPoly:
        return self.base * self.base - self.radical * self.radical * self.radicand

    def is_zero(self) -> bool:
        return self.base.is_zero() and self.radical.is_zero()

    def __eq__(self, other):
        try:
            o = self._other(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.base == o.base and self.radical == o.radical

    def __hash__(self):
        return hash((self.base, self.radical, self.radicand))

    def __str__(self):
        return f"({self.base}) + ({self.radical})*sqrt({self.radicand})"
