"""kacflow command line: tables, verify, geometry.

Exit codes: 0 success, 1 a check failed (or a focal point inside a
geometry grid), 2 configuration or golden-file mismatch.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from . import __version__
from .errors import BadConfig, BadDimension, CapExceeded, FocalPoint, HypothesisViolated, KacflowError
from .exact_core import DEFAULT_SEED, MultiPoly, PolyMatrix, det_cofactor, parse_poly
from .jacobi import (
    DEFAULT_SYMBOLIC_CAP,
    ParallelFamily,
    ShapeMatrix,
    coeff_derivative,
    default_taus,
    expand_D,
    ivp_check,
    recurrence_mismatch,
)
from .kac import (
    check_independence,
    chessboard_check,
    compare_block_table,
    e1_coordinate_formula,
    e1_eigen_coordinates,
    first_row_blocks_check,
    km_binomial_check,
    mixed_product_check,
    predicted_spectrum,
    verify_eigenvector_second,
)
from .linsys import (
    LemmaReport,
    _parity_even,
    _parity_ok_singular,
    build_bundle,
    degree_structure,
    generalized_eigvec_check,
    norm_identity_check,
    solve_x0_from_tau,
    system_dim,
    vandermonde_generalized,
    verify_cramer,
    verify_independence_family,
    verify_rank,
    verify_singular,
)

SCHEMA = "kacflow.verify/1"
GEOMETRY_KEYS = ("eps1", "eps2", "n1", "n2", "base1", "base2", "phi_a", "s_min", "s_max", "steps")


class UsageError(KacflowError):
    pass


@dataclass
class RunConfig:
    command: str
    n1: int = 2
    n2: int = 2
    mode: str = "mixed"
    tau_samples: int = 20
    seed: int = DEFAULT_SEED
    symbolic_cap: int = DEFAULT_SYMBOLIC_CAP
    output_path: str | None = None
    format: str = "json"
    timing: bool = False
    jobs: int = 1


# tables ------------------------------------------------------------------------

def _delta_env(A: ShapeMatrix) -> dict:
    """D and Dij for the symbolic 3x3 shape matrix."""
    M = PolyMatrix.from_rows([[A[i, j] for j in range(A.size)] for i in range(A.size)])
    env = {"D": det_cofactor(M)}
    for i in range(A.size):
        for j in range(A.size):
            env[f"D{i + 1}{j + 1}"] = det_cofactor(M.delete(i, j))
    return env


def read_transcription(text: str) -> list:
    """``name[u,v,k] = expr`` lines; '#' starts a comment."""
    out = []
    for ln in text.splitlines():
        ln = ln.split("#", 1)[0].strip()
        if not ln:
            continue
        lhs, rhs = (p.strip() for p in ln.split("=", 1))
        name, idx = lhs.rstrip("]").split("[")
        u, v, k = (int(x) for x in idx.split(","))
        out.append((name, u, v, k, rhs))
    return out


def expand_delta(expr: str, env: dict) -> MultiPoly:
    p = parse_poly(expr)
    names = [n for n in p.variables() if n in env]
    return p.subs({n: env[n] for n in names}) if names else p


def table_lines(mode: str) -> list:
    """(label, computed, transcribed-expression) for P0 and P1 at n1 = n2 = 2."""
    A = ShapeMatrix.symbolic(2, 2)
    tau1, tau2 = default_taus(mode)
    P0 = expand_D(A, tau1, tau2)
    P1 = coeff_derivative(P0, tau1, tau2)
    golden = read_transcription(resources.files("kacflow").joinpath("data", f"tables_{mode}.txt").read_text())
    env = _delta_env(A)
    rows = []
    for name, u, v, k, expr in golden:
        P = (P0, P1)[k]
        got = P.alpha(u, v) if name == "alpha" else P.beta(u, v)
        rows.append((f"{name}[{u},{v},{k}]", got, expr, got == expand_delta(expr, env)))
    if len(rows) != 2 * len(P0):
        raise BadConfig(f"transcription covers {len(rows)} of {2 * len(P0)} coefficients")
    return rows


def cmd_tables(cfg: RunConfig, out) -> int:
    if (cfg.n1, cfg.n2) != (2, 2):
        raise UsageError("tables are only defined for n1 = n2 = 2")
    rows = table_lines(cfg.mode)
    bad = 0
    for label, got, expr, ok in rows:
        flag = "" if ok else "   <-- MISMATCH"
        out.write(f"{label} = {got}   # {expr}{flag}\n")
        bad += not ok
    out.write(f"# {len(rows) - bad}/{len(rows)} coefficients match the transcription\n")
    return 2 if bad else 0


# verify ------------------------------------------------------------------------

def _report(lemma_id: str, params: dict, ok: bool, witness=None, discrepancy: bool = False) -> LemmaReport:
    status = "verified" if ok else ("paper_discrepancy" if discrepancy else "failed")
    return LemmaReport(lemma_id, params, status, witness if witness is not None or ok else {"ok": False})


def _shape(cfg: RunConfig, seed_offset: int = 0, zero_first: bool = False, symbolic_ok: bool = True):
    if symbolic_ok and cfg.n1 + cfg.n2 <= 4:
        return ShapeMatrix.symbolic(cfg.n1, cfg.n2, zero_first=zero_first)
    return ShapeMatrix.random(cfg.n1, cfg.n2, seed=cfg.seed + seed_offset, zero_first=zero_first)


SPECTRUM_POINTS = ((2, 3), (2, 5), (3, 5), (2, 7), (3, 7), (5, 7), (2, 11), (3, 11))


def spectrum_point(n1: int, n2: int) -> tuple:
    """First (sqrt x, sqrt y) from a fixed list that is (n1, n2)-independent."""
    for sx, sy in SPECTRUM_POINTS:
        if check_independence(n1, n2, sx, sy):
            return sx, sy
    raise BadConfig(f"no independent pair in {SPECTRUM_POINTS} for ({n1},{n2})")


def _spectrum(cfg):
    n1, n2 = cfg.n1, cfg.n2
    sx, sy = spectrum_point(n1, n2)
    rep = predicted_spectrum(n1, n2, sx, sy)
    coords = e1_eigen_coordinates(n1, n2, sx, sy)
    coords_ok = coords == e1_coordinate_formula(n1, n2) and all(c != 0 for c in coords)
    ev_ok = all(verify_eigenvector_second(n1, n2, u, v, sx=sx, sy=sy) for u in range(n1) for v in range(n2))
    w = {"charpoly_matches": rep.charpoly_matches, "squarefree": rep.squarefree,
         "rank": rep.computed_rank, "expected_rank": rep.parity_expected_rank,
         "e1_coordinates_ok": coords_ok, "eigenvectors_ok": ev_ok}
    return _report("kac_spectrum", {"n1": n1, "n2": n2, "sqrt_x": sx, "sqrt_y": sy},
                   rep.ok and coords_ok and ev_ok, w)


def _powers(cfg):
    n1, n2 = cfg.n1, cfg.n2
    chess = {m: chessboard_check(n2, "y", m) for m in range(1, 9)}
    binom = {m: km_binomial_check(n1, n2, "x", "y", m) for m in range(1, 5)}
    blocks = {m: first_row_blocks_check(n1, n2, m) for m in range(1, 7)}
    ok = all(chess.values()) and all(binom.values()) and all(blocks.values())
    w = {"chessboard": chess, "binomial": binom, "first_row_blocks": blocks}
    return _report("kac_powers", {"n1": n1, "n2": n2}, ok, w)


def _block_table(cfg):
    cells = compare_block_table()
    bad = [{"m": c.m, "ell": c.ell} for c in cells if not c.matches]
    return _report("block_table", {"n1": 5}, not bad,
                   {"cells": len(cells), "mismatched": bad}, discrepancy=True)


def _kronecker(cfg):
    rng = random.Random(cfg.seed)

    def rand(r, c):
        return PolyMatrix.from_rows([[Fraction(rng.randint(-9, 9)) for _ in range(c)] for _ in range(r)])

    A, B, C, D = rand(2, 2), rand(2, 2), rand(2, 2), rand(2, 2)
    res = mixed_product_check(A, B, C, D)
    # the standard law must hold; a failing printed law is recorded, not fatal
    if not res["standard"]:
        return _report("kronecker_mixed_product", {}, False, res)
    return _report("kronecker_mixed_product", {}, res["printed"], res, discrepancy=True)


def _ivp_recurrence(cfg):
    A = _shape(cfg)
    tau1, tau2 = default_taus(cfg.mode)
    k_max = 3 if A.is_symbolic() else 6
    ivp = ivp_check(A, tau1, tau2)
    bad = recurrence_mismatch(A, tau1, tau2, k_max=k_max, cap=cfg.symbolic_cap)
    w = {"ivp": ivp, "k_max": k_max, "symbolic_A": A.is_symbolic(), "first_mismatch": bad}
    return _report("recurrence", {"n1": cfg.n1, "n2": cfg.n2, "mode": cfg.mode}, ivp and bad is None, w)


def _log_derivative(cfg):
    A = ShapeMatrix.random(cfg.n1, cfg.n2, seed=cfg.seed, max_num=5, max_den=3)
    tau1 = 0.0 if cfg.mode == "flat" else 0.7
    fam = ParallelFamily(A, tau1, -1.3)
    worst = 0.0
    used = 0
    for i in range(41):
        r = -0.2 + 0.01 * i
        try:
            st = fam.state(r)
        except KacflowError:
            continue
        worst = max(worst, abs(st.log_derivative_residual) / max(1.0, abs(st.H_r)))
        used += 1
    ok = used > 0 and worst < 1e-8
    return _report("mean_curvature_log_derivative", {"n1": cfg.n1, "n2": cfg.n2, "mode": cfg.mode},
                   ok, {"points": used, "max_rel_residual": worst})


def _vandermonde(cfg):
    sy = 3
    nodes = [(cfg.n2 - 1 - 2 * v) * sy for v in range(cfg.n2)]
    nodes = [x for x in nodes if x != 0]
    res = vandermonde_generalized(nodes, cfg.n1)
    return _report("generalized_vandermonde", {"n1": cfg.n1, "nodes": nodes}, res.nonsingular,
                   {"determinant": str(res.determinant)})


def build_jobs(cfg: RunConfig) -> list:
    """Ordered (name, thunk) pairs for one (n1, n2, mode)."""
    n1, n2, mode = cfg.n1, cfg.n2, cfg.mode
    dim = system_dim(n1, n2, mode)
    jobs: list = [
        ("kac_spectrum", lambda: _spectrum(cfg)),
        ("kac_powers", lambda: _powers(cfg)),
        ("block_table", lambda: _block_table(cfg)),
        ("kronecker_mixed_product", lambda: _kronecker(cfg)),
        ("recurrence", lambda: _ivp_recurrence(cfg)),
        ("mean_curvature_log_derivative", lambda: _log_derivative(cfg)),
    ]
    bundle_cache: dict = {}

    def bundle():
        if "b" not in bundle_cache:
            bundle_cache["b"] = build_bundle(None, n1, n2, mode)
        return bundle_cache["b"]

    if _parity_ok_singular(n1, n2, mode):
        jobs.append(("m_singular", lambda: verify_singular(bundle(), samples=cfg.tau_samples, seed=cfg.seed)))
    if _parity_even(n1, n2, mode):
        jobs.append(("m_rank", lambda: verify_rank(bundle(), seed=cfg.seed)))
        for s in (2, 5):
            jobs.append((f"krylov_independence/{s}",
                         lambda s=s: verify_independence_family(n1, n2, mode, s, seed=cfg.seed)))
    else:
        for s in (dim + 6, dim + 11):
            jobs.append((f"krylov_independence/{s}",
                         lambda s=s: verify_independence_family(n1, n2, mode, s, seed=cfg.seed)))
    symbolic_cramer = n1 + n2 <= 4
    jobs.append(("cramer_consistency", lambda: verify_cramer(
        _shape(cfg, 1, symbolic_ok=symbolic_cramer), mode, samples=cfg.tau_samples, seed=cfg.seed)))
    if dim <= 9:
        jobs.append(("degree_structure", lambda: degree_structure(n1, n2, mode, seed=cfg.seed)))
    jobs.append(("x0_recovery", lambda: solve_x0_from_tau(
        ShapeMatrix.random(n1, n2, seed=cfg.seed + 2), mode, seed=cfg.seed)))
    if mode == "flat":
        jobs.append(("generalized_eigvec", lambda: generalized_eigvec_check(n1, n2)))
    jobs.append(("generalized_vandermonde", lambda: _vandermonde(cfg)))
    jobs.append(("norm_identity", lambda: norm_identity_check(_shape(cfg, 3, zero_first=True), mode)))
    return jobs


def _run_job(job):
    name, thunk = job
    t0 = time.perf_counter()
    try:
        rep = thunk()
    except HypothesisViolated as exc:
        return ("skipped", name, str(exc))
    if rep.elapsed_ms is None:
        rep.elapsed_ms = (time.perf_counter() - t0) * 1e3
    return rep


def run_verify(cfg: RunConfig) -> list:
    jobs = build_jobs(cfg)
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            return list(pool.map(_run_job, jobs))
    return [_run_job(j) for j in jobs]


def _check_caps(cfg: RunConfig):
    if cfg.n1 < 2 or cfg.n2 < 2:
        raise BadDimension(f"n1, n2 must be >= 2, got ({cfg.n1}, {cfg.n2})")
    if cfg.n1 + cfg.n2 > cfg.symbolic_cap:
        raise CapExceeded(f"n1 + n2 = {cfg.n1 + cfg.n2} exceeds the cap {cfg.symbolic_cap}")


def cmd_verify(cfg: RunConfig, out) -> int:
    _check_caps(cfg)
    header = {"schema": SCHEMA, "version": __version__, "n1": cfg.n1, "n2": cfg.n2, "mode": cfg.mode,
              "seed": cfg.seed, "tau_samples": cfg.tau_samples, "symbolic_cap": cfg.symbolic_cap}
    out.write(json.dumps(header, sort_keys=True) + "\n")
    counts = {"verified": 0, "failed": 0, "paper_discrepancy": 0}
    failed, disc, skipped = [], [], []
    for rep in run_verify(cfg):
        if isinstance(rep, tuple):
            skipped.append({"lemma_id": rep[1], "reason": rep[2]})
            continue
        d = rep.to_dict()
        if not cfg.timing:
            d["elapsed_ms"] = None
        out.write(json.dumps(d, sort_keys=True, default=str) + "\n")
        counts[rep.status] += 1
        if rep.status == "failed":
            failed.append(rep.lemma_id)
        elif rep.status == "paper_discrepancy":
            disc.append(rep.lemma_id)
    summary = {"summary": dict(counts, failed_ids=failed, paper_discrepancies=disc, skipped=skipped)}
    out.write(json.dumps(summary, sort_keys=True) + "\n")
    return 1 if failed else 0


# geometry ----------------------------------------------------------------------

def parse_geometry_spec(text: str) -> dict:
    """key=value lines; base1/base2 may be a comma list or a single number."""
    vals: dict = {}
    for lineno, ln in enumerate(text.splitlines(), 1):
        ln = ln.split("#", 1)[0].strip()
        if not ln:
            continue
        if "=" not in ln:
            raise BadConfig(f"line {lineno}: expected key=value")
        k, v = (p.strip() for p in ln.split("=", 1))
        if k not in GEOMETRY_KEYS:
            raise BadConfig(f"line {lineno}: unknown key {k!r}")
        try:
            if k in ("n1", "n2", "steps"):
                vals[k] = int(v)
            elif k in ("base1", "base2"):
                vals[k] = [float(x) for x in v.split(",")]
            else:
                vals[k] = float(v)
        except ValueError as exc:
            raise BadConfig(f"line {lineno}: {exc}") from None
    missing = [k for k in ("eps1", "eps2", "n1", "n2", "phi_a") if k not in vals]
    if missing:
        raise BadConfig(f"missing keys: {', '.join(missing)}")
    return vals


def geometry_factors(vals: dict):
    from .geometry import SpaceFormFactor

    def factor(i):
        eps, n = vals[f"eps{i}"], vals[f"n{i}"]
        base = vals.get(f"base{i}")
        try:
            if base is None:
                return SpaceFormFactor.horospherical(eps, n)
            if len(base) == 1:
                base = base * (n - 1)
            return SpaceFormFactor(eps, n, tuple(base))
        except ValueError as exc:
            raise BadConfig(str(exc)) from None

    return factor(1), factor(2)


def cmd_geometry(spec_path: str, out, h: float = 1e-5) -> int:
    from .geometry import PhiSpec, curvature_grid, trace_identity_check, write_states_csv
    try:
        with open(spec_path) as fh:
            vals = parse_geometry_spec(fh.read())
    except OSError as exc:
        raise BadConfig(str(exc)) from None
    f1, f2 = geometry_factors(vals)
    phi = PhiSpec.linear(vals["phi_a"])
    lo, hi, steps = vals.get("s_min", -5.0), vals.get("s_max", 5.0), vals.get("steps", 41)
    if steps < 2 or not lo < hi:
        raise BadConfig("need s_min < s_max and steps >= 2")
    grid = [lo + (hi - lo) * i / (steps - 1) for i in range(steps)]
    try:
        states = curvature_grid(f1, f2, phi, grid)
    except FocalPoint as exc:
        sys.stderr.write(f"kacflow: {exc}\n")
        return 1
    write_states_csv(states, out, f1.dim, f2.dim)
    thetas = [st.theta for st in states]
    Hs = [st.H for st in states]
    res = []
    for s in grid[1:-1] or grid:
        try:
            res.append(tuple(trace_identity_check(f1, f2, phi, s, h)))
        except FocalPoint:
            continue
    r1 = max((r[0] for r in res), default=math.nan)
    r2 = max((r[1] for r in res), default=math.nan)
    out.write(f"# max_theta_deviation,{max(thetas) - min(thetas)!r}\n")
    out.write(f"# max_H_deviation,{max(Hs) - min(Hs)!r}\n")
    out.write(f"# trace_identity_residuals,{r1!r},{r2!r}\n")
    return 0


# entry point -------------------------------------------------------------------

def _seed(text: str) -> int:
    return int(text, 0)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kacflow", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"kacflow {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("tables", help="reproduce the n1 = n2 = 2 coefficient tables")
    t.add_argument("--mode", choices=("mixed", "flat"), default="mixed")
    t.add_argument("--n1", type=int, default=2)
    t.add_argument("--n2", type=int, default=2)
    t.add_argument("-o", "--output")

    v = sub.add_parser("verify", help="run the check suite, JSON lines on stdout")
    v.add_argument("--n1", type=int, default=2)
    v.add_argument("--n2", type=int, default=2)
    v.add_argument("--mode", choices=("mixed", "flat"), default="mixed")
    v.add_argument("--tau-samples", type=int, default=20)
    v.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    v.add_argument("--symbolic-cap", type=int, default=DEFAULT_SYMBOLIC_CAP)
    v.add_argument("--jobs", type=int, default=1, help="worker threads; output order is fixed")
    v.add_argument("--timing", action="store_true", help="fill elapsed_ms (breaks byte-identical output)")
    v.add_argument("-o", "--output")

    g = sub.add_parser("geometry", help="curvature CSV for a key=value spec file")
    g.add_argument("specfile")
    g.add_argument("--h", type=float, default=1e-5, help="finite-difference step")
    g.add_argument("-o", "--output")
    return p


def config_from_args(args) -> RunConfig:
    cfg = RunConfig(command=args.command, output_path=getattr(args, "output", None))
    for name in ("n1", "n2", "mode", "tau_samples", "seed", "symbolic_cap", "timing", "jobs"):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))
    env = os.environ.get("KACFLOW_SEED")
    if env and args.command == "verify":
        cfg.seed = _seed(env)
    cfg.format = {"tables": "text", "verify": "json", "geometry": "csv"}[args.command]
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ValueError as exc:
        parser.error(f"bad KACFLOW_SEED: {exc}")
    buf = io.StringIO()
    try:
        if cfg.command == "tables":
            code = cmd_tables(cfg, buf)
        elif cfg.command == "verify":
            code = cmd_verify(cfg, buf)
        else:
            code = cmd_geometry(args.specfile, buf, args.h)
    except UsageError as exc:
        parser.error(str(exc))
    except (BadConfig, BadDimension, CapExceeded) as exc:
        sys.stderr.write(f"kacflow: {type(exc).__name__}: {exc}\n")
        return 2
    text = buf.getvalue()
    if cfg.output_path:
        with open(cfg.output_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
