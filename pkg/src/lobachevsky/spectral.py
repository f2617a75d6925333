"""Bound states of the point-perturbed operator H_{w,alpha}.

The discrete spectrum below the threshold consists of the roots of
``Q(zeta) = alpha``, one per interval between consecutive Landau levels plus
possibly one on the last ("special") interval ending at the threshold.

Roots are located in the variable ``t = 1/2 + sqrt(b^2 - a^2 zeta)``. There Q
is ``sign/(4 pi) [psi(t+b) + psi(t-b) + ...]`` with poles exactly at
``t = |b| - n`` and no branch point at the threshold (``t = 1/2``).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import NonConvergence
from .geometry import Point, as_complex, polar_offsets, sigma_minus_one
from .krein import QConvention, q_bracket, resolve_convention
from .model import (
    ModelParams,
    green0,
    landau_levels,
    is_half_integer,
    phase_factor,
    radial_green,
    threshold,
)
from .numerics import QuadratureSpec, RootBracket, find_root, integrate_polar
from .specialfn import trigamma

__all__ = [
    "IntervalKind",
    "SpectralInterval",
    "BoundState",
    "intervals",
    "solve_level",
    "bound_states",
    "eigenfunction",
    "eigenfunction_factors",
    "norm_check",
]

_POLE_OFFSET = 1e-10
_MIN_OFFSET = 1e-15


class IntervalKind(enum.Enum):
    REGULAR = "regular"
    SPECIAL = "special"


@dataclass(frozen=True)
class SpectralInterval:
    kind: IntervalKind
    lo: float
    hi: float
    index: int

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("interval must have lo < hi")

    def contains(self, e: float) -> bool:
        return self.lo < e < self.hi


@dataclass(frozen=True)
class BoundState:
    k: int
    energy: float
    c_k: float
    w: Point
    alpha: float
    params: ModelParams
    t: float = field(default=np.nan, repr=False)
    sign: int = field(default=-1, repr=False)

    def as_dict(self) -> dict:
        return {"k": self.k, "energy": self.energy, "c_k": self.c_k,
                "w": [self.w.x, self.w.y], "alpha": self.alpha}


def intervals(params: ModelParams) -> list[SpectralInterval]:
    """The ``n0 + 2`` intervals of ``(-inf, b^2/a^2)`` cut at the Landau levels."""
    levs = [e for _, e in landau_levels(params)]
    th = threshold(params)
    edges = [-np.inf] + levs + [th]
    out = []
    for k in range(len(edges) - 1):
        kind = IntervalKind.SPECIAL if k == len(edges) - 2 else IntervalKind.REGULAR
        out.append(SpectralInterval(kind, edges[k], edges[k + 1], k))
    return out


def _energy(t: float, params: ModelParams) -> float:
    s = t - 0.5
    return (params.b - s) * (params.b + s) / params.a ** 2


def _t_range(interval: SpectralInterval, params: ModelParams):
    # t decreases as zeta increases; Landau level n sits at t = |b| - n
    ab = abs(params.b)
    k = interval.index
    t_hi = np.inf if k == 0 else ab - (k - 1)
    t_lo = 0.5 if interval.kind is IntervalKind.SPECIAL else ab - k
    return t_lo, t_hi


def _dq_dzeta(t, params, sign):
    b, a2 = params.b, params.a ** 2
    return sign * (trigamma(t + b) + trigamma(t - b)) / (4.0 * np.pi) * (-a2 / (2.0 * (t - 0.5)))


def solve_level(interval: SpectralInterval, alpha: float, params: ModelParams,
                conv: QConvention | None = None, tol: float = 1e-12) -> float | None:
    """Root of ``Q(zeta) = alpha`` on ``interval``, or ``None`` if the special
    interval has none."""
    conv = conv if conv is not None else resolve_convention(params)
    sign = conv.sign
    t = _solve_t(interval, alpha, params, sign, tol)
    return None if t is None else _energy(t, params)


def _solve_t(interval, alpha, params, sign, tol):
    if not np.isfinite(alpha):
        raise ValueError("alpha must be finite")
    t_lo, t_hi = _t_range(interval, params)

    def f(t):
        return sign * q_bracket(t, params) - alpha

    # Q(zeta) increases in zeta, i.e. sign*bracket decreases in t when sign=-1.
    # f(t_lo side) > 0, f(t_hi side) < 0 for the resolved convention.
    if interval.kind is IntervalKind.SPECIAL:
        conv = QConvention(sign=sign)
        if not is_half_integer(params.b):
            if not _special_ok(alpha, params, conv):
                return None
            lo = t_lo
        else:
            lo = None
    else:
        lo = None
    if lo is None:
        off = _POLE_OFFSET
        while True:
            lo = t_lo + off * max(1.0, abs(t_lo))
            if _side(f(lo)) == _side_near_lo(sign):
                break
            off *= 0.1
            if off < _MIN_OFFSET:
                raise NonConvergence("no sign change next to the lower pole")
    if np.isinf(t_hi):
        hi = max(2.0 * lo, lo + 1.0)
        while _side(f(hi)) == _side(f(lo)):
            hi = 2.0 * hi
            if hi > 1e300:
                raise NonConvergence("could not bracket the lowest level")
    else:
        off = _POLE_OFFSET
        while True:
            hi = t_hi - off * max(1.0, abs(t_hi))
            if _side(f(hi)) != _side(f(lo)):
                break
            off *= 0.1
            if off < _MIN_OFFSET:
                raise NonConvergence("no sign change next to the upper pole")
    root = find_root(f, RootBracket(lo, hi, float(f(lo)), float(f(hi))), tol=tol)
    e = _energy(root, params)
    if not interval.contains(e):
        raise NonConvergence("root landed on an interval endpoint")
    return root


def _side(v):
    return v > 0


def _side_near_lo(sign):
    # small t corresponds to the upper end in zeta, where Q is large positive
    # (a pole) for sign = -1
    return sign < 0


def _special_ok(alpha, params, conv):
    from .krein import special_interval_solvable
    return special_interval_solvable(alpha, params, conv)


def bound_states(alpha: float, w, params: ModelParams,
                 conv: QConvention | None = None) -> list[BoundState]:
    """All discrete eigenvalues of ``H_{w,alpha}`` below the threshold, increasing."""
    conv = conv if conv is not None else resolve_convention(params)
    wp = w if isinstance(w, Point) else Point.from_complex(complex(w))
    out = []
    for iv in intervals(params):
        t = _solve_t(iv, alpha, params, conv.sign, 1e-12)
        if t is None:
            continue
        e = _energy(t, params)
        dq = float(np.real(_dq_dzeta(t, params, conv.sign)))
        if not dq > 0:
            raise NonConvergence(f"dQ/dzeta = {dq} is not positive at E_{iv.index}")
        out.append(BoundState(iv.index, e, dq ** -0.5, wp, float(alpha), params,
                              t=float(t), sign=conv.sign))
    return out


def eigenfunction(state: BoundState, z):
    """``c_k G0(z, w; E_k)``; vectorised over ``z``."""
    zc = as_complex(z)
    if np.ndim(zc) == 0:
        return state.c_k * green0(zc, state.w.z, state.energy, state.params)
    phase, radial = eigenfunction_factors(state, zc)
    return phase * radial


def eigenfunction_factors(state: BoundState, z):
    """``(phase_factor(z, w, b), phi(sigma(z, w)))`` with ``phi`` real."""
    zc = as_complex(z)
    sm1 = sigma_minus_one(zc, state.w.z)
    radial = state.c_k * np.real(radial_green(sm1, _state_t(state), state.params.b))
    return phase_factor(zc, state.w.z, state.params.b), radial


def _state_t(state: BoundState) -> float:
    if np.isfinite(state.t):
        return state.t
    p = state.params
    return 0.5 + np.sqrt(max(p.b ** 2 - p.a ** 2 * state.energy, 0.0))


def radial_profile(state: BoundState, rho):
    """``phi`` as a function of the unit-model geodesic distance ``rho`` from ``w``."""
    sm1 = np.sinh(0.5 * np.asarray(rho, dtype=float)) ** 2
    return state.c_k * np.real(radial_green(sm1, _state_t(state), state.params.b))


def polar_values(state: BoundState, rho, phi):
    """Eigenfunction on the polar grid centred at ``w`` (unit-model ``rho``)."""
    X, Y = polar_offsets(rho, phi)
    w = state.w.z
    z = w.real + w.imag * X + 1j * w.imag * Y
    return phase_factor(z, w, state.params.b) * radial_profile(state, rho)


def norm_check(state: BoundState, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """``int |Psi|^2 d mu_a`` by polar quadrature about ``w``."""
    def g(r, phi):
        return radial_profile(state, r) ** 2 + 0.0 * phi

    val = integrate_polar(g, spec)
    return float(np.real(val)) * state.params.a ** 2
