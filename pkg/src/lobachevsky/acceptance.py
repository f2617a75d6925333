"""Acceptance checks for the package's headline numerical claims.

Each ``check_*`` function runs one criterion end to end and returns a
:class:`CriterionResult`; runtime limits are part of the pass condition.
The pytest acceptance suite and ``lobachevsky verify`` both call these.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .berry import alpha_independence_check, berry_connection_numeric, berry_phase
from .geometry import GeodesicCircle, Point, flux_area_quadrature, flux_through_loop, geodesic_distance
from .krein import (
    q_closed_form,
    q_derivative,
    q_oracle_regularized,
    resolve_convention,
)
from .model import ModelParams, apply_H0_fd, green0_values, landau_levels, threshold
from .numerics import central_diff
from .spectral import IntervalKind, bound_states, intervals, norm_check, solve_level
from .specialfn import EULER_GAMMA, digamma, hyp2f1_log_case_scaled, trigamma

__all__ = ["CriterionResult", "CHECKS", "run_all"]


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    elapsed: float
    limit: float
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        bits = ", ".join(f"{k}={_fmt(v)}" for k, v in self.detail.items())
        return (f"[{tag}] criterion {self.number:2d} {self.name}: {bits}; "
                f"{self.elapsed:.3g}s (limit {self.limit:g}s)")

    def as_dict(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed,
                "elapsed": self.elapsed, "limit": self.limit, "detail": self.detail}


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.3e}"
    return str(v)


def _timed(fn: Callable[[], tuple[bool, dict]], number: int, name: str, limit: float):
    t0 = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - t0
    return CriterionResult(number, name, bool(ok and elapsed < limit), elapsed, limit, detail)


# 1 -------------------------------------------------------------------------

def check_landau_levels() -> CriterionResult:
    def run():
        params = ModelParams(a=1.0, b=3.0)
        t0 = time.perf_counter()
        levs = landau_levels(params)
        th = threshold(params)
        call = time.perf_counter() - t0
        want = [2.75, 6.75, 8.75]
        err = max(abs(e - w) for (_, e), w in zip(levs, want)) if len(levs) == 3 else np.inf
        err = max(err, abs(th - 9.0))
        return (len(levs) == 3 and err <= 1e-14 and call < 1e-3,
                {"max_error": float(err), "call_seconds": call})
    return _timed(run, 1, "Landau levels (a=1, b=3)", 1.0)


# 2 -------------------------------------------------------------------------

def _random_green_cases(n, seed=20240601):
    rng = np.random.default_rng(seed)
    cases = []
    while len(cases) < n:
        a = rng.uniform(0.7, 2.0)
        b = rng.uniform(-3.0, 3.0)
        params = ModelParams(a=a, b=b)
        z = complex(rng.uniform(-1, 1), rng.uniform(0.6, 2.5))
        zp = complex(rng.uniform(-1, 1), rng.uniform(0.6, 2.5))
        d = geodesic_distance(z, zp, a)
        if not a / 2 < d < 3 * a:
            continue
        if rng.uniform() < 0.5:
            zeta = complex(rng.uniform(-2, 2) / a ** 2, rng.uniform(0.2, 2) / a ** 2)
        else:
            levs = landau_levels(params)
            bottom = levs[0][1] if levs else threshold(params)
            zeta = bottom - rng.uniform(0.2, 3.0) / a ** 2
        cases.append((params, z, zp, zeta))
    return cases


def pde_orders(cases, hs=(1e-2, 5e-3, 2.5e-3)):
    orders = []
    for params, z, zp, zeta in cases:
        def f(x, zp=zp, zeta=zeta, params=params):
            return green0_values(x, zp, zeta, params)
        res = [abs(apply_H0_fd(f, z, h, params) - zeta * f(z)) for h in hs]
        slope = np.polyfit(np.log(hs), np.log(res), 1)[0]
        orders.append(float(slope))
    return np.array(orders)


def check_pde_residual() -> CriterionResult:
    def run():
        orders = pde_orders(_random_green_cases(20))
        ok = bool(np.all(np.abs(orders - 2.0) <= 0.2))
        return ok, {"min_order": float(orders.min()), "max_order": float(orders.max())}
    return _timed(run, 2, "G0 finite-difference residual order", 5.0)


# 3 -------------------------------------------------------------------------

def check_q_properties() -> CriterionResult:
    def run():
        params = ModelParams(a=1.0, b=3.0)
        conv = resolve_convention(params)
        levs = [e for _, e in landau_levels(params)]
        pole = min(abs(q_closed_form(e + s * 1e-8, params, conv)) for e in levs for s in (-1, 1))
        qs = [q_closed_form(-10.0 ** k, params, conv) for k in range(1, 7)]
        b_ok = qs[5] < qs[2] < 0 and all(x > y for x, y in zip(qs, qs[1:]))
        # dense grid across all intervals
        grid = []
        for iv in intervals(params):
            lo = iv.lo if np.isfinite(iv.lo) else iv.hi - 50.0
            w = iv.hi - lo
            grid.append(lo + w * np.linspace(1e-6, 1 - 1e-6, 250))
        grid = np.concatenate(grid)
        dq = np.array([q_derivative(x, params, conv) for x in grid])
        rng = np.random.default_rng(7)
        rel = []
        edges = [-np.inf] + levs + [threshold(params)]
        while len(rel) < 100:
            x = rng.uniform(-20.0, 9.0)
            gap = min(abs(x - e) for e in edges[1:])
            if gap < 1e-3:
                continue
            h = 1e-2 * min(gap, 1.0)
            fd = central_diff(lambda s: q_closed_form(s, params, conv), x, h)
            an = q_derivative(x, params, conv)
            rel.append(abs(fd - an) / abs(an))
        rel = max(rel)
        ok = pole > 1e6 and b_ok and grid.size >= 1000 and np.all(dq > 0) and rel < 1e-8
        return ok, {"sign": conv.sign, "min_pole_abs": float(pole), "Q(-1e6)": float(qs[5]),
                    "Q(-1e3)": float(qs[2]), "min_dQ": float(dq.min()), "grid": int(grid.size),
                    "max_fd_rel": float(rel)}
    return _timed(run, 3, "Q-function properties (a), (b), (d)", 10.0)


# 4 -------------------------------------------------------------------------

def check_sign_oracle() -> CriterionResult:
    def run():
        drifts, zdevs = [], []
        for params in (ModelParams(1.0, 1.0), ModelParams(1.0, 3.0), ModelParams(1.7, 0.3)):
            conv = resolve_convention(params)
            drifts.append(conv.drift)
            levs = landau_levels(params)
            bottom = levs[0][1] if levs else threshold(params)
            zeta = bottom - 1.0 / params.a ** 2
            zdevs.append(abs(q_oracle_regularized(zeta, 1j, params)
                             - q_oracle_regularized(zeta, 3 + 2j, params)))
            if conv.sign != -1:
                return False, {"sign": conv.sign}
        return (max(drifts) < 1e-5 and max(zdevs) < 1e-6,
                {"sign": -1, "max_drift": float(max(drifts)), "max_z_dev": float(max(zdevs))})
    return _timed(run, 4, "regularized-trace oracle vs closed form", 30.0)


# 5 -------------------------------------------------------------------------

def _scan(iv):
    # clustered towards both ends, where roots for large |alpha| sit
    if not np.isfinite(iv.lo):
        return iv.hi - np.geomspace(1e-10, 1e14, 10_000)[::-1]
    s = np.linspace(-12.0, 12.0, 10_000)
    u = 0.5 * (1.0 + np.tanh(s))
    pts = iv.lo + (iv.hi - iv.lo) * u
    return pts[(pts > iv.lo) & (pts < iv.hi)]


def check_spectral_solver() -> CriterionResult:
    def run():
        params = ModelParams(a=1.0, b=3.0)
        conv = resolve_convention(params)
        ivs = intervals(params)
        scans = [(pts, q_closed_form(pts, params, conv)) for pts in map(_scan, ivs)]
        worst, census_ok, states = 0.0, True, 0
        for alpha in np.linspace(-1.5, 1.5, 50):
            for iv, (pts, q) in zip(ivs, scans):
                root = solve_level(iv, float(alpha), params, conv)
                vals = q - alpha
                changes = np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))
                if root is None:
                    census_ok &= changes.size == 0 and iv.kind is IntervalKind.SPECIAL
                    continue
                states += 1
                worst = max(worst, abs(q_closed_form(root, params, conv) - alpha))
                census_ok &= changes.size == 1 and pts[changes[0]] <= root <= pts[changes[0] + 1]
        return (worst < 1e-12 and census_ok,
                {"max_residual": float(worst), "census_agrees": bool(census_ok), "roots": states})
    return _timed(run, 5, "spectral solver residual and root census", 10.0)


# 6 -------------------------------------------------------------------------

def check_normalization() -> CriterionResult:
    def run():
        params = ModelParams(a=1.0, b=3.0)
        conv = resolve_convention(params)
        states = bound_states(0.0, 1j, params, conv)
        worst, slowest = 0.0, 0.0
        for s in states:
            t0 = time.perf_counter()
            worst = max(worst, abs(norm_check(s) - 1.0))
            slowest = max(slowest, time.perf_counter() - t0)
        return (len(states) >= 3 and worst <= 1e-6 and slowest < 30.0,
                {"levels": len(states), "max_norm_dev": float(worst), "slowest_level_s": slowest})
    return _timed(run, 6, "normalization cross-check (a=1, b=3, alpha=0)", 30.0 * 4)


# 7 -------------------------------------------------------------------------

def check_berry_connection() -> CriterionResult:
    def run():
        worst_u, worst_v, slowest = 0.0, 0.0, 0.0
        for b, v in itertools.product((1.0, 3.0), (0.5, 1.0, 2.0)):
            params = ModelParams(a=1.0, b=b)
            state = bound_states(0.0, complex(0.0, v), params)[0]
            t0 = time.perf_counter()
            c = berry_connection_numeric(state)
            slowest = max(slowest, time.perf_counter() - t0)
            ref = b / v
            worst_u = max(worst_u, abs(c.u_component - ref) / ref)
            worst_v = max(worst_v, abs(c.v_component) / ref)
        return (worst_u < 1e-4 and worst_v < 1e-6 and slowest < 120.0,
                {"max_u_rel": float(worst_u), "max_v_over_ref": float(worst_v),
                 "slowest_point_s": slowest})
    return _timed(run, 7, "Berry connection = (b/v, 0)", 120.0 * 6)


# 8 -------------------------------------------------------------------------

UNIT_CIRCLE = GeodesicCircle(Point(0.0, 1.0), 1.0)
ACCEPTANCE_SAMPLES = 64


def check_berry_phase() -> CriterionResult:
    def run():
        params = ModelParams(a=1.0, b=1.0)
        ref = 2.0 * np.pi * (np.cosh(1.0) - 1.0)
        rep = berry_phase(UNIT_CIRCLE, params, "numeric", alpha=0.0, level=0,
                          samples=ACCEPTANCE_SAMPLES)
        line = flux_through_loop(UNIT_CIRCLE, params.B, params.a)
        area = flux_area_quadrature(UNIT_CIRCLE, params.B, params.a)
        rel = abs(rep.numeric_phase - ref) / ref
        fl = abs(line - area) / abs(line)
        return (rel < 1e-3 and fl < 1e-8,
                {"numeric_phase": rep.numeric_phase, "reference": float(ref),
                 "rel_dev": float(rel), "flux_line_vs_area": float(fl), "samples": rep.samples})
    return _timed(run, 8, "Berry phase = flux, geodesic circle r=1", 600.0)


# 9 -------------------------------------------------------------------------

def check_independence() -> CriterionResult:
    def run():
        params = ModelParams(a=1.0, b=1.0)
        rep = alpha_independence_check(UNIT_CIRCLE, [-1.0, 0.0, 1.0], 0, params,
                                       levels=[0, 1], samples=ACCEPTANCE_SAMPLES)
        dev = rep["max_pairwise_relative_deviation"]
        detail = {"max_pairwise_rel": dev,
                  "runs": ";".join(f"a{r['alpha']:+g}k{r['level']}={r['phase']:.10f}"
                                   for r in rep["runs"])}
        return dev < 2e-3, detail
    return _timed(run, 9, "phase independent of alpha and level", 1800.0)


# 10 ------------------------------------------------------------------------

def special_function_identities() -> dict:
    rng = np.random.default_rng(3)
    z = rng.uniform(-6, 6, 200) + 1j * rng.uniform(-4, 4, 200)
    z = z[np.abs(z - np.round(z.real)) > 0.05]
    rec_d = np.max(np.abs(digamma(z + 1) - digamma(z) - 1 / z) / (1 + np.abs(digamma(z + 1))))
    rec_t = np.max(np.abs(trigamma(z + 1) - trigamma(z) + 1 / z ** 2) / (1 + np.abs(trigamma(z))))
    ref_d = np.max(np.abs(digamma(1 - z) - digamma(z) - np.pi / np.tan(np.pi * z))
                   / (1 + np.abs(digamma(z))))
    ref_t = np.max(np.abs(trigamma(1 - z) + trigamma(z) - (np.pi / np.sin(np.pi * z)) ** 2)
                   / (1 + np.abs(trigamma(z))))
    ln2 = np.log(2.0)
    spots = [
        (digamma(1.0), -EULER_GAMMA),
        (digamma(0.5), -EULER_GAMMA - 2 * ln2),
        (digamma(1.5), 2 - EULER_GAMMA - 2 * ln2),
        (digamma(-0.5), 2 - EULER_GAMMA - 2 * ln2),
        (trigamma(1.0), np.pi ** 2 / 6),
        (trigamma(0.5), np.pi ** 2 / 2),
        (trigamma(-0.5), np.pi ** 2 / 2 + 4),
    ]
    spot = max(abs(a - b) for a, b in spots)
    return {"recurrence": float(max(rec_d, rec_t)), "reflection": float(max(ref_d, ref_t)),
            "spot_values": float(spot)}


def hyp2f1_overlap() -> float:
    worst = 0.0
    cases = [(1.5, 1.2), (3.5 + 3, 3.5 - 3), (2.2 + 0.7j, 1.1 - 0.4j), (0.7, 0.9), (4.0, -2.5)]
    for p, q in cases:
        x = np.linspace(0.35, 0.75, 9)
        s = hyp2f1_log_case_scaled(p, q, x, method="series")
        c = hyp2f1_log_case_scaled(p, q, x, method="connection")
        worst = max(worst, float(np.max(np.abs(s - c) / np.abs(c))))
    # Euler integral against the series branch where both are accurate
    for p, q in [(8.0, 3.0), (20.0, 18.0)]:
        x = np.linspace(0.1, 0.6, 6)
        s = hyp2f1_log_case_scaled(p, q, x, method="series")
        e = hyp2f1_log_case_scaled(p, q, x, method="integral")
        worst = max(worst, float(np.max(np.abs(s - e) / np.abs(s))))
    return worst


def check_special_functions() -> CriterionResult:
    def run():
        ids = special_function_identities()
        ov = hyp2f1_overlap()
        ok = max(ids.values()) < 1e-12 and ov < 1e-11
        return ok, {**ids, "hyp2f1_overlap": ov}
    return _timed(run, 10, "special-function identities and 2F1 branch overlap", 1.0)


CHECKS = {
    1: check_landau_levels,
    2: check_pde_residual,
    3: check_q_properties,
    4: check_sign_oracle,
    5: check_spectral_solver,
    6: check_normalization,
    7: check_berry_connection,
    8: check_berry_phase,
    9: check_independence,
    10: check_special_functions,
}


def run_all(selection=None, report: Callable[[CriterionResult], None] | None = None):
    out = []
    for n in sorted(selection or CHECKS):
        res = CHECKS[n]()
        if report is not None:
            report(res)
        out.append(res)
    return out
