"""Numerical substrate: adaptive quadrature, polar quadrature, roots, derivatives.

All integrators accept vectorised integrands. A 1-D integrand is called with a
1-D array of abscissae and must return an array whose leading axis matches it
(trailing axes are treated as independent components, complex values are
allowed). The polar integrand is called on an ``(nr, 1)`` by ``(1, nphi)``
grid and returns an ``(nr, nphi, ...)`` array.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize

from .errors import BadBracket, NonConvergence

__all__ = [
    "QuadratureSpec",
    "RootBracket",
    "PolarIntegral",
    "integrate_1d",
    "integrate_polar",
    "find_root",
    "expand_bracket",
    "central_diff",
]

# Gauss-Kronrod 21/10 abscissae and weights (QUADPACK qk21).
_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525709256,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

# Full 21-point node set on [-1, 1] and matching weight vectors.
_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[:-1][::-1]])
_KW = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[:-1][::-1]])
_GW = np.zeros(21)
_GW[1:10:2] = _WG
_GW[11:20:2] = _WG[::-1]

_EPS = np.finfo(float).eps
_R_HARD_CAP = 690.0


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances shared by the 1-D and polar integrators.

    ``n_phi`` is the initial number of trapezoid nodes in the angle; it is
    doubled until the angular sum settles, up to ``max_n_phi``.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 4000
    truncation_threshold: float = 1e-16
    n_phi: int = 64
    max_n_phi: int = 4096

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if self.n_phi < 4 or self.n_phi % 2:
            raise ValueError("n_phi must be an even number >= 4")


@dataclass(frozen=True)
class RootBracket:
    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise BadBracket(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if not np.sign(self.f_lo) * np.sign(self.f_hi) < 0:
            raise BadBracket(
                f"f has no sign change on [{self.lo}, {self.hi}]: "
                f"f(lo)={self.f_lo}, f(hi)={self.f_hi}"
            )


@dataclass(frozen=True)
class PolarIntegral:
    value: complex | float | np.ndarray
    error: float
    r_max: float
    n_phi: int


def _norm(v: np.ndarray) -> float:
    v = np.asarray(v)
    return float(np.max(np.abs(v))) if v.size else 0.0


def _gk_panels(f, a: np.ndarray, b: np.ndarray):
    """Apply GK21 to every panel ``[a[i], b[i]]`` with a single call to ``f``."""
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
    fx = np.asarray(f(x))
    tail = fx.shape[1:]
    fx = fx.reshape((a.size, 21) + tail)
    shape = (1, 21) + (1,) * len(tail)
    kw = _KW.reshape(shape)
    gw = _GW.reshape(shape)
    h = half.reshape((-1,) + (1,) * len(tail))
    kron = np.sum(kw * fx, axis=1) * h
    gauss = np.sum(gw * fx, axis=1) * h
    absf = np.abs(fx)
    resabs = np.sum(kw * absf, axis=1) * np.abs(h)
    mean = kron / (2.0 * h)
    resasc = np.sum(kw * np.abs(fx - mean[:, None]), axis=1) * np.abs(h)
    err = np.abs(kron - gauss)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(
            resasc > 0, resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5), err
        )
    scaled = np.maximum(scaled, 50.0 * _EPS * resabs)
    red = tuple(range(1, scaled.ndim))
    err_n = np.max(scaled, axis=red) if red else scaled
    mass = np.max(resabs, axis=red) if red else resabs
    return kron, err_n, mass


def _adaptive(f, lo, hi, rel_tol, abs_tol, max_sub, *, floor_scale=0.0, pieces=1):
    """Batched globally adaptive GK21.

    Returns ``(value, error, mass, n_panels)``. The stopping test is
    ``error <= max(abs_tol, rel_tol * max(|value|, floor_scale))``.
    """
    edges = np.linspace(lo, hi, pieces + 1)
    a, b = edges[:-1], edges[1:]
    val, err, mass = _gk_panels(f, a, b)
    n_split = 0
    width = hi - lo
    while True:
        total = val.sum(axis=0)
        total_err = float(err.sum())
        tol = max(abs_tol, rel_tol * max(_norm(total), floor_scale))
        if total_err <= tol:
            return total, total_err, float(mass.sum()), a.size
        share = tol * (b - a) / width
        pick = err > share
        if not pick.any():
            pick = err == err.max()
        n_split += int(pick.sum())
        if n_split > max_sub:
            raise NonConvergence(
                f"adaptive quadrature on [{lo}, {hi}] exceeded {max_sub} "
                f"subdivisions (error {total_err:.3e} > {tol:.3e})"
            )
        am, bm = a[pick], b[pick]
        cm = 0.5 * (am + bm)
        na = np.concatenate([am, cm])
        nb = np.concatenate([cm, bm])
        nval, nerr, nmass = _gk_panels(f, na, nb)
        keep = ~pick
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb])
        val = np.concatenate([val[keep], nval])
        err = np.concatenate([err[keep], nerr])
        mass = np.concatenate([mass[keep], nmass])


def _vectorised(f: Callable) -> Callable:
    def g(x):
        out = np.asarray(f(x))
        if out.ndim == 0:
            out = np.broadcast_to(out, x.shape)
        return out
    return g


def integrate_1d(f: Callable, lo: float, hi: float, spec: QuadratureSpec = QuadratureSpec()):
    """Adaptive Gauss-Kronrod integral of ``f`` over ``[lo, hi]``.

    ``f`` receives an array of abscissae. Scalar-valued ``f`` (e.g. a constant)
    is broadcast. Raises :class:`NonConvergence` when ``max_subdivisions`` is
    exhausted.
    """
    if not lo < hi:
        raise ValueError("integrate_1d requires lo < hi")
    value, _, _, _ = _adaptive(
        _vectorised(f), float(lo), float(hi), spec.rel_tol, spec.abs_tol, spec.max_subdivisions
    )
    if np.ndim(value) == 0:
        value = value.item()
    return value


def _polar_fixed_phi(g, n_phi, spec, staggered=False):
    phi = (2.0 * np.pi / n_phi) * (np.arange(n_phi) + (0.5 if staggered else 0.0))
    wphi = 2.0 * np.pi / n_phi
    tail_shape = []

    def radial(r):
        vals = np.asarray(g(r[:, None], phi[None, :]))
        if vals.ndim < 2 or vals.shape[:2] != (r.size, n_phi):
            vals = np.broadcast_to(vals, (r.size, n_phi) + vals.shape[2:])
        if not tail_shape:
            tail_shape.append(vals.shape[2:])
        flat = vals.reshape(r.size, n_phi, -1)
        s = np.sinh(r)[:, None]
        ang = wphi * np.sum(flat, axis=1) * s
        # last column: angular sum of |g|, used as the absolute mass
        mass = wphi * np.sum(np.max(np.abs(flat), axis=2), axis=1)[:, None] * s
        return np.concatenate([ang, mass.astype(ang.dtype)], axis=1)

    total = 0.0
    total_err = 0.0
    mass_total = 0.0
    quiet = 0
    r0, width = 0.0, 0.5
    while True:
        r1 = r0 + width
        if r1 > _R_HARD_CAP:
            raise NonConvergence(
                f"polar integrand shows no decay before r = {_R_HARD_CAP}"
            )
        val, err, _, _ = _adaptive(
            radial, r0, r1, spec.rel_tol, spec.abs_tol, spec.max_subdivisions,
            floor_scale=mass_total,
        )
        mass = abs(val[-1])
        total = total + val[:-1]
        total_err += err
        mass_total += mass
        if mass <= spec.truncation_threshold * mass_total:
            quiet += 1
            if quiet >= 3:
                value = total.reshape(tail_shape[0])
                return value, total_err, mass_total, r1
        else:
            quiet = 0
        r0 = r1
        width = min(2.0 * width, 4.0)


def integrate_polar(
    g: Callable,
    spec: QuadratureSpec = QuadratureSpec(),
    *,
    full_output: bool = False,
    staggered: bool = False,
):
    """Integrate ``g(r, phi) sinh(r) dr dphi`` over ``r >= 0``, ``0 <= phi < 2pi``.

    Radial panels are marched outwards until three consecutive panels carry
    less than ``truncation_threshold`` of the accumulated absolute mass; the
    angular trapezoid rule is doubled from ``spec.n_phi`` nodes until two
    successive totals agree. With ``full_output`` a :class:`PolarIntegral`
    carrying the cutoff radius and final node count is returned.
    ``staggered`` shifts the angular nodes by half a step, keeping rays off
    the axis directions (the nodes stay symmetric under ``phi -> pi - phi``).
    """
    n_phi = spec.n_phi
    prev, _, _, _ = _polar_fixed_phi(g, n_phi, spec, staggered)
    while True:
        n_phi *= 2
        if n_phi > spec.max_n_phi:
            raise NonConvergence(f"angular rule did not settle by n_phi={spec.max_n_phi}")
        cur, err, mass, r_max = _polar_fixed_phi(g, n_phi, spec, staggered)
        if _norm(cur - prev) <= max(spec.abs_tol, spec.rel_tol * mass):
            break
        prev = cur
    value = cur.item() if np.ndim(cur) == 0 else cur
    if full_output:
        return PolarIntegral(value=value, error=err + _norm(cur - prev), r_max=r_max, n_phi=n_phi)
    return value


def expand_bracket(f: Callable[[float], float], lo: float, hi: float) -> RootBracket:
    """Evaluate ``f`` at both ends and build a validated bracket."""
    return RootBracket(lo, hi, float(f(lo)), float(f(hi)))


def find_root(f: Callable[[float], float], bracket: RootBracket, tol: float = 1e-12) -> float:
    """Root of ``f`` strictly inside ``bracket`` with ``|f(x)| <= tol``.

    Brent's safeguarded bisection/secant/inverse-quadratic iteration is run to
    full floating-point resolution; the residual contract is then checked.
    """
    if isinstance(bracket, tuple):
        bracket = expand_bracket(f, *bracket)
    try:
        x, info = optimize.brentq(
            f, bracket.lo, bracket.hi, xtol=1e-300, rtol=4 * _EPS,
            maxiter=500, full_output=True, disp=False,
        )
    except (RuntimeError, ValueError) as exc:
        raise NonConvergence(str(exc)) from exc
    if not info.converged:
        raise NonConvergence(f"root search stalled after {info.iterations} iterations")
    # Brent may land exactly on an endpoint when the root sits within one ulp of it.
    if x <= bracket.lo:
        x = np.nextafter(bracket.lo, bracket.hi)
    elif x >= bracket.hi:
        x = np.nextafter(bracket.hi, bracket.lo)
    fx = abs(float(f(x)))
    if fx > tol:
        # step to the neighbouring floats; the best one is the answer.
        cands = [x, np.nextafter(x, -np.inf), np.nextafter(x, np.inf)]
        cands = [c for c in cands if bracket.lo < c < bracket.hi]
        vals = [abs(float(f(c))) for c in cands]
        x = cands[int(np.argmin(vals))]
        fx = min(vals)
        if fx > tol:
            raise NonConvergence(f"|f(x*)| = {fx:.3e} exceeds tol {tol:.1e} at float resolution")
    return float(x)


def central_diff(f: Callable, x: float, h: float):
    """Richardson-extrapolated central difference, error O(h**4).

    ``f`` may return arrays; the combination is applied elementwise.
    """
    d_h = (np.asarray(f(x + h)) - np.asarray(f(x - h))) / (2.0 * h)
    h2 = 0.5 * h
    d_h2 = (np.asarray(f(x + h2)) - np.asarray(f(x - h2))) / (2.0 * h2)
    out = (4.0 * d_h2 - d_h) / 3.0
    return out.item() if np.ndim(out) == 0 else out
