"""Principal curvatures of hypersurfaces built from two parallel families.

A point is (exp(s eta_1), exp(phi(s) eta_2)) in Q^{n1}_{eps1} x Q^{n2}_{eps2}.
Each factor's principal curvatures move along their normal geodesics by
the Riccati law kappa' = kappa^2 + eps; everything else is algebra in
phi', phi'' and W = sqrt(1 + phi'^2).
"""
from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import BadConfig, DomainExceeded, FocalPoint, HypothesisViolated

FOCAL_EPS = 1e-12
DEFAULT_H = 1e-5


def sc(tau: float, r: float) -> tuple[float, float]:
    """(s_tau(r), c_tau(r)); the tau = 0 case is (r, 1)."""
    tau = float(tau)
    if tau > 0:
        q = math.sqrt(tau)
        return math.sinh(q * r) / q, math.cosh(q * r)
    if tau < 0:
        q = math.sqrt(-tau)
        return math.sin(q * r) / q, math.cos(q * r)
    return float(r), 1.0


def parallel_flow_curvature(kappa0: float, epsilon: float, t: float) -> float:
    """Principal curvature after moving a distance t along the normal.

    With tau = -eps this is the one-dimensional case of A(t) = -B'(t) B(t)^-1,
    B = c - kappa0 s.
    """
    if t == 0:
        return float(kappa0)
    tau = -float(epsilon)
    if tau > 0:
        # exponential form: c - kappa0 s cancels badly near kappa0 = sqrt(tau)
        q = math.sqrt(tau)
        f = math.exp(-2 * q * abs(t))
        lo, hi = (kappa0 - q, kappa0 + q) if t > 0 else (kappa0 + q, kappa0 - q)
        num = lo + hi * f
        den = (-lo + hi * f) if t > 0 else (lo - hi * f)
        if abs(den) <= FOCAL_EPS * q:
            raise FocalPoint(f"focal point at t={t} (kappa0={kappa0}, eps={epsilon})")
        return q * num / den
    s, c = sc(tau, t)
    den = c - kappa0 * s
    if abs(den) <= FOCAL_EPS:
        raise FocalPoint(f"focal point at t={t} (kappa0={kappa0}, eps={epsilon})")
    return (kappa0 * c - tau * s) / den


def riccati_residual(kappa0: float, epsilon: float, t: float, h: float = DEFAULT_H) -> float:
    """|dkappa/dt - (kappa^2 + eps)| with a central difference."""
    d = (parallel_flow_curvature(kappa0, epsilon, t + h)
         - parallel_flow_curvature(kappa0, epsilon, t - h)) / (2 * h)
    k = parallel_flow_curvature(kappa0, epsilon, t)
    return abs(d - (k * k + epsilon))


@dataclass(frozen=True)
class SpaceFormFactor:
    epsilon: float
    dim: int
    base_curvatures: tuple

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError(f"factor dimension must be >= 2, got {self.dim}")
        object.__setattr__(self, "base_curvatures", tuple(float(k) for k in self.base_curvatures))
        if len(self.base_curvatures) != self.dim - 1:
            raise ValueError(f"need {self.dim - 1} base curvatures, got {len(self.base_curvatures)}")

    @classmethod
    def uniform(cls, epsilon: float, dim: int, kappa: float) -> "SpaceFormFactor":
        return cls(epsilon, dim, (kappa,) * (dim - 1))

    @classmethod
    def horospherical(cls, epsilon: float, dim: int) -> "SpaceFormFactor":
        """Horospheres for eps < 0, hyperplanes for eps = 0."""
        if epsilon > 0:
            raise BadConfig("no horospheres in a sphere")
        return cls.uniform(epsilon, dim, math.sqrt(-epsilon))

    def curvatures_at(self, t: float) -> list:
        return [parallel_flow_curvature(k, self.epsilon, t) for k in self.base_curvatures]


class PhiSpec:
    """phi as a linear map s -> a s, or a cubic spline through samples."""

    def __init__(self, kind: str, a: float | None = None, spline: CubicSpline | None = None,
                 domain=(-math.inf, math.inf)):
        if kind not in ("linear", "sampled"):
            raise ValueError(f"unknown phi kind {kind!r}")
        self.kind = kind
        self.a = a
        self._spline = spline
        self.domain = (float(domain[0]), float(domain[1]))

    @classmethod
    def linear(cls, a: float, domain=(-math.inf, math.inf)) -> "PhiSpec":
        return cls("linear", a=float(a), domain=domain)

    @classmethod
    def sampled(cls, s_values: Sequence[float], phi_values: Sequence[float]) -> "PhiSpec":
        s = np.asarray(s_values, dtype=float)
        spline = CubicSpline(s, np.asarray(phi_values, dtype=float))
        return cls("sampled", spline=spline, domain=(float(s.min()), float(s.max())))

    @classmethod
    def from_function(cls, fn: Callable[[float], float], lo: float, hi: float,
                      points: int = 2001) -> "PhiSpec":
        grid = np.linspace(lo, hi, points)
        return cls.sampled(grid, [fn(x) for x in grid])

    @property
    def is_linear(self) -> bool:
        return self.kind == "linear"

    def _check(self, s):
        lo, hi = self.domain
        if not lo <= s <= hi:
            raise DomainExceeded(f"s={s} outside [{lo}, {hi}]")

    def jet(self, s: float) -> tuple[float, float, float]:
        """(phi, phi', phi'') at s."""
        self._check(s)
        if self.kind == "linear":
            return self.a * s, self.a, 0.0
        sp = self._spline
        return float(sp(s)), float(sp(s, 1)), float(sp(s, 2))


@dataclass(frozen=True)
class CurvatureState:
    s: float
    k1: float
    k_factor1: tuple
    k_factor2: tuple
    H: float
    theta: float
    W: float

    def principal(self) -> list:
        return [self.k1, *self.k_factor1, *self.k_factor2]


def angle_function(dphi: float) -> float:
    p2 = dphi * dphi
    return (p2 - 1.0) / (p2 + 1.0)


def product_curvatures(f1: SpaceFormFactor, f2: SpaceFormFactor, phi: PhiSpec, s: float) -> CurvatureState:
    p, dp, ddp = phi.jet(s)
    W = math.sqrt(1.0 + dp * dp)
    lam = f1.curvatures_at(s)
    mu = f2.curvatures_at(p)
    k1 = ddp / W ** 3
    kf1 = tuple(-dp / W * x for x in lam)
    kf2 = tuple(x / W for x in mu)
    H = k1 + sum(kf1) + sum(kf2)
    return CurvatureState(float(s), k1, kf1, kf2, H, angle_function(dp), W)


def mean_curvature_formula(f1, f2, phi: PhiSpec, s: float) -> float:
    """H = phi''/W^3 - (phi'/W) H_1 + H_2/W, assembled from the factor means."""
    p, dp, ddp = phi.jet(s)
    W = math.sqrt(1.0 + dp * dp)
    return ddp / W ** 3 - dp / W * sum(f1.curvatures_at(s)) + sum(f2.curvatures_at(p)) / W


def curvature_grid(f1, f2, phi, s_grid) -> list:
    return [product_curvatures(f1, f2, phi, float(s)) for s in s_grid]


def seeded_grid(lo: float, hi: float, count: int, seed: int) -> list:
    """Endpoints plus ``count`` uniform draws, sorted."""
    rng = random.Random(seed)
    pts = [lo, hi] + [rng.uniform(lo, hi) for _ in range(count)]
    return sorted(pts)


def _spread(values) -> float:
    arr = np.asarray(values, dtype=float)
    return float(arr.max() - arr.min()) if arr.size else 0.0


@dataclass
class SuiteReport:
    label: str
    s_grid: list
    theta_dev: float
    H_dev: float
    k_dev: float
    H_values: list = field(repr=False, default_factory=list)
    tol: float = 1e-12

    @property
    def constant(self) -> bool:
        return max(self.theta_dev, self.H_dev, self.k_dev) < self.tol


def _validate_horospherical(f: SpaceFormFactor, which: int):
    if f.epsilon > 0:
        raise BadConfig(f"factor {which}: eps must be <= 0")
    want = math.sqrt(-f.epsilon)
    if any(abs(k - want) > 1e-12 for k in f.base_curvatures):
        kind = "hyperplane" if f.epsilon == 0 else "horosphere"
        raise BadConfig(f"factor {which}: base must be a {kind} (all curvatures {want})")


@dataclass(frozen=True)
class GeometryConfig:
    f1: SpaceFormFactor
    f2: SpaceFormFactor
    phi_a: float
    s_min: float = -5.0
    s_max: float = 5.0
    steps: int = 41
    seed: int = 0xC0FFEE
    label: str = ""

    @classmethod
    def make(cls, eps1, eps2, n1, n2, base1=None, base2=None, phi_a=1.0, **kw) -> "GeometryConfig":
        def factor(eps, n, base):
            if base is None:
                return SpaceFormFactor.horospherical(eps, n) if eps <= 0 else SpaceFormFactor.uniform(eps, n, 0.0)
            if isinstance(base, (int, float)):
                return SpaceFormFactor.uniform(eps, n, base)
            return SpaceFormFactor(eps, n, tuple(base))
        return cls(factor(eps1, n1, base1), factor(eps2, n2, base2), float(phi_a), **kw)

    def phi(self) -> PhiSpec:
        return PhiSpec.linear(self.phi_a)


def horospherical_suite(config: GeometryConfig, strict: bool = True, tol: float = 1e-12) -> SuiteReport:
    """Constancy of theta, H and every principal curvature over a seeded grid.

    ``strict=False`` skips the hyperplane/horosphere validation so that
    non-isoparametric controls can be scanned with the same code.
    """
    if strict:
        if config.phi_a <= 0:
            raise BadConfig("phi must be linear with positive slope")
        _validate_horospherical(config.f1, 1)
        _validate_horospherical(config.f2, 2)
    grid = seeded_grid(config.s_min, config.s_max, config.steps, config.seed)
    states = curvature_grid(config.f1, config.f2, config.phi(), grid)
    ks = np.array([st.principal() for st in states])
    k_dev = float((ks.max(axis=0) - ks.min(axis=0)).max())
    Hs = [st.H for st in states]
    return SuiteReport(
        label=config.label, s_grid=grid,
        theta_dev=_spread([st.theta for st in states]),
        H_dev=_spread(Hs), k_dev=k_dev, H_values=Hs, tol=tol,
    )


@dataclass(frozen=True)
class TraceResidual:
    first: float
    second: float
    lhs: tuple
    rhs: tuple

    def __iter__(self):
        return iter((self.first, self.second))

    def ok(self, rel: float = 1e-6, floor: float = 1e-9) -> bool:
        scale = max(1.0, *(abs(x) for x in self.lhs + self.rhs))
        return all(r <= max(rel * scale, floor) for r in (self.first, self.second))


def t_derivative(g: Callable[[float], float], dphi: float, s: float, h: float = DEFAULT_H) -> float:
    """T(g) for a function of s alone.

    T = PN - theta N works out to (-2 phi'/W^3) times the coordinate field
    d/ds, whose length is W. Equivalently (-2 phi'/W^2) times the unit field.
    """
    W2 = 1.0 + dphi * dphi
    return -2.0 * dphi / (W2 * math.sqrt(W2)) * (g(s + h) - g(s - h)) / (2 * h)


def trace_identity_check(f1: SpaceFormFactor, f2: SpaceFormFactor, phi: PhiSpec, s: float,
                         h: float = DEFAULT_H) -> TraceResidual:
    """Both norm/trace identities for a constant-angle split frame.

    With phi linear the block A_2 vanishes and A_1, A_3 are diagonal.
    """
    if not phi.is_linear:
        raise HypothesisViolated("trace identities need constant angle, i.e. linear phi")
    st = product_curvatures(f1, f2, phi, s)
    th = st.theta
    _, dphi, _ = phi.jet(s)

    def tr1(x):
        return sum(product_curvatures(f1, f2, phi, x).k_factor1)

    def tr3(x):
        return sum(product_curvatures(f1, f2, phi, x).k_factor2)

    n1a = sum(k * k for k in st.k_factor1)
    n3 = sum(k * k for k in st.k_factor2)
    n2 = 0.0
    one_m = 1.0 - th * th
    lhs1 = (1 - th) * n1a - (1 + th) * n2 + f1.epsilon * (f1.dim - 1) / 2 * one_m
    lhs2 = (1 - th) * n2 - (1 + th) * n3 - f2.epsilon * (f2.dim - 1) / 2 * one_m
    rhs1 = t_derivative(tr1, dphi, s, h)
    rhs2 = t_derivative(tr3, dphi, s, h)
    return TraceResidual(abs(lhs1 - rhs1), abs(lhs2 - rhs2), (lhs1, lhs2), (rhs1, rhs2))


@dataclass
class FamilyScan:
    s_grid: list
    H1: list
    H2: list
    H_sigma: list
    a: float
    b: float
    c: float
    relation_residual: float
    tol: float = 1e-12

    @property
    def h_constant(self) -> bool:
        return _spread(self.H_sigma) < self.tol

    @property
    def h1_constant(self) -> bool:
        return _spread(self.H1) < self.tol

    @property
    def h2_constant(self) -> bool:
        return _spread(self.H2) < self.tol

    @property
    def relation_holds(self) -> bool:
        return self.relation_residual < self.tol


def isoparametric_family_scan(f1, f2, phi: PhiSpec, s_grid, tol: float = 1e-12) -> FamilyScan:
    """a H_1 + b H_2 = c with a = -phi'/W, b = 1/W and c read at the first grid point."""
    if not phi.is_linear:
        raise HypothesisViolated("the scan assumes linear phi")
    grid = [float(s) for s in s_grid]
    H1 = [sum(f1.curvatures_at(s)) for s in grid]
    H2 = [sum(f2.curvatures_at(phi.jet(s)[0])) for s in grid]
    Hs = [product_curvatures(f1, f2, phi, s).H for s in grid]
    dphi = phi.a
    W = math.sqrt(1.0 + dphi * dphi)
    a, b = -dphi / W, 1.0 / W
    c = Hs[0]  # k1 = 0 for linear phi
    resid = max(abs(a * x + b * y - c) for x, y in zip(H1, H2))
    return FamilyScan(grid, H1, H2, Hs, a, b, c, resid, tol)


def csv_header(n1: int, n2: int) -> list:
    return (["s", "k1"] + [f"k1_{i + 1}" for i in range(n1 - 1)]
            + [f"k2_{i + 1}" for i in range(n2 - 1)] + ["H", "theta", "W"])


def write_states_csv(states: Sequence[CurvatureState], fh, n1: int, n2: int):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(csv_header(n1, n2))
    for st in states:
        w.writerow([repr(x) for x in (st.s, st.k1, *st.k_factor1, *st.k_factor2, st.H, st.theta, st.W)])
