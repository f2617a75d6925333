"""Berry connection and Berry phase for a transported point interaction.

The bound state ``Psi_k(.; w)`` is followed as the interaction site ``w``
moves. The connection ``V(w) = i <Psi | grad_w Psi>`` is evaluated by
quadrature of the explicitly differenced product, centred at ``w``; the phase
is its line integral around a loop. The reference values are
``V = (b / v, 0)`` and ``gamma(C) = int_C (B a^2 / v) du``, the flux through C.
"""

from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateLoop, DomainError, NonConvergence
from .geometry import (
    GeodesicCircle,
    LoopSpec,
    Point,
    flux_area_quadrature,
    flux_through_loop,
    polar_offsets,
)
from .krein import QConvention, resolve_convention
from .model import ModelParams, radial_green
from .numerics import QuadratureSpec, integrate_polar
from .spectral import BoundState, _state_t, bound_states

__all__ = [
    "BerryConnection",
    "BerryPhaseReport",
    "berry_connection_numeric",
    "berry_connection_analytic",
    "berry_phase",
    "alpha_independence_check",
    "DEFAULT_CONNECTION_SPEC",
]

DEFAULT_H_REL = 1e-4
DEFAULT_CONNECTION_SPEC = QuadratureSpec(rel_tol=1e-8, abs_tol=1e-12, n_phi=16)


@dataclass(frozen=True)
class BerryConnection:
    u_component: float
    v_component: float
    w: Point
    level: int
    # real parts of <Psi|d_u Psi>, <Psi|d_v Psi>; zero for a normalised family
    residue: tuple = (0.0, 0.0)

    def as_dict(self) -> dict:
        return {"u_component": self.u_component, "v_component": self.v_component,
                "w": [self.w.x, self.w.y], "level": self.level,
                "residue": list(self.residue)}


@dataclass(frozen=True)
class BerryPhaseReport:
    loop: LoopSpec
    numeric_phase: float
    analytic_phase: float
    flux: float
    flux_quanta: float
    level: int
    alpha: float
    samples: int = 0
    flux_area: float = float("nan")

    @property
    def deviation(self) -> float:
        return self.numeric_phase - self.analytic_phase

    @property
    def relative_deviation(self) -> float:
        if self.analytic_phase == 0:
            return abs(self.deviation)
        return abs(self.deviation) / abs(self.analytic_phase)

    def as_dict(self) -> dict:
        return {"numeric_phase": self.numeric_phase, "analytic_phase": self.analytic_phase,
                "flux": self.flux, "flux_area": self.flux_area,
                "flux_quanta": self.flux_quanta, "level": self.level, "alpha": self.alpha,
                "samples": self.samples, "deviation": self.deviation,
                "relative_deviation": self.relative_deviation}


def _shifted_values(state: BoundState, X, Y, du: float, dv: float):
    """``Psi(z; w + du + i dv)`` at the points ``z = u + v X + i v Y`` near ``w``.

    Offsets are formed before any subtraction so the log singularity at the
    shifted centre keeps full relative accuracy.
    """
    w = state.w
    v = w.y
    b = state.params.b
    vs = v + dv
    ex = v * X - du
    ey = v * Y
    sm1 = (ex * ex + (ey - vs) ** 2) / (4.0 * ey * vs)
    radial = state.c_k * np.real(radial_green(sm1, _state_t(state), b))
    phase = np.exp(1j * b * (np.pi - 2.0 * np.arctan2(ey + vs, ex)))
    return phase * radial


def _derivative_integrand(state: BoundState, h: float):
    # Richardson central difference: (4 D(h/2) - D(h)) / 3, both directions at once
    def g(r, phi):
        X, Y = polar_offsets(r, phi)
        psi = _shifted_values(state, X, Y, 0.0, 0.0)
        cpsi = np.conj(psi)
        out = []
        for du, dv in ((1.0, 0.0), (0.0, 1.0)):
            d1 = (_shifted_values(state, X, Y, du * h, dv * h)
                  - _shifted_values(state, X, Y, -du * h, -dv * h)) / (2.0 * h)
            d2 = (_shifted_values(state, X, Y, 0.5 * du * h, 0.5 * dv * h)
                  - _shifted_values(state, X, Y, -0.5 * du * h, -0.5 * dv * h)) / h
            out.append(cpsi * (4.0 * d2 - d1) / 3.0)
        return np.stack(out, axis=-1)
    return g


def berry_connection_numeric(state: BoundState, h_rel: float = DEFAULT_H_REL,
                             spec: QuadratureSpec = DEFAULT_CONNECTION_SPEC) -> BerryConnection:
    """``V(w) = i <Psi | grad_w Psi>`` by polar quadrature about ``w``.

    The step in ``w`` is ``h = h_rel * v * min(1, 1/(t - 1/2))``: the state
    decays like ``exp(-(t - 1/2) rho)``, so deep states (large ``t``) get a
    proportionally finer step. Returns the real connection
    ``-Im <Psi|d Psi>``; the real parts of the inner products are kept as
    ``residue``.
    """
    if not 0 < h_rel < 0.5:
        raise DomainError("h_rel must lie in (0, 0.5)")
    h = h_rel * state.w.y * min(1.0, 1.0 / (_state_t(state) - 0.5))
    val = integrate_polar(_derivative_integrand(state, h), spec, staggered=True)
    val = np.asarray(val) * state.params.a ** 2
    conn = np.real(1j * val)
    return BerryConnection(float(conn[0]), float(conn[1]), state.w, state.k,
                           (float(np.real(val[0])), float(np.real(val[1]))))


def berry_connection_analytic(w, params: ModelParams) -> BerryConnection:
    """``(b / v, 0)``; no dependence on the coupling or the level."""
    wp = w if isinstance(w, Point) else Point.from_complex(complex(w))
    return BerryConnection(params.b / wp.y, 0.0, wp, -1)


def _state_for(state_or_params, alpha, level, w, conv):
    if isinstance(state_or_params, BoundState):
        return state_or_params
    params = state_or_params
    states = bound_states(alpha, w, params, conv)
    for s in states:
        if s.k == level:
            return s
    raise DomainError(f"level {level} has no bound state at alpha = {alpha}")


def _numeric_phase(state: BoundState, loop: LoopSpec, samples: int, h_rel: float,
                   spec: QuadratureSpec, tol: float, max_samples: int):
    a = state.params.a
    cache: dict = {}

    def conn(z):
        key = (float(z.real), float(z.imag))
        if key not in cache:
            if z.imag <= 0:
                raise DomainError("loop leaves the upper half-plane")
            moved = dataclasses.replace(state, w=Point(key[0], key[1]))
            c = berry_connection_numeric(moved, h_rel, spec)
            cache[key] = complex(c.u_component, c.v_component)
        return cache[key]

    def phase(n):
        nodes, dz = loop.discretize(n, a)
        total = 0.0
        for z, d in zip(nodes, dz):
            c = conn(complex(z))
            total += c.real * d.real + c.imag * d.imag
        return total

    n = samples
    # the every-other-node subset is a nested coarse rule for periodic loops
    coarse = phase(n // 2) if n >= 4 else None
    while True:
        fine = phase(n)
        if coarse is not None and abs(fine - coarse) < tol:
            return fine, n
        if 2 * n > max_samples:
            raise NonConvergence(f"Berry phase unsettled at {n} samples "
                                 f"(last change {abs(fine - coarse):.3g})")
        coarse, n = fine, 2 * n


def berry_phase(loop: LoopSpec, state_or_params, mode: str = "numeric", *,
                alpha: float = 0.0, level: int = 0, samples: int = 256,
                h_rel: float = DEFAULT_H_REL, spec: QuadratureSpec = DEFAULT_CONNECTION_SPEC,
                conv: QConvention | None = None, tol: float = 1e-6,
                max_samples: int = 4096) -> BerryPhaseReport:
    """Berry phase of ``loop`` for a bound state (or for ``level`` at ``alpha``).

    ``mode="analytic"`` integrates ``(B a^2 / v) du``; ``"numeric"`` integrates
    the numeric connection with the periodic trapezoid rule, halving the node
    spacing until two rules agree to ``tol``. A loop enclosing no area has
    phase 0.
    """
    if mode not in ("numeric", "analytic"):
        raise ValueError("mode must be 'numeric' or 'analytic'")
    if isinstance(state_or_params, BoundState):
        params = state_or_params.params
        alpha, level = state_or_params.alpha, state_or_params.k
    else:
        params = state_or_params
    a = params.a
    try:
        flux = flux_through_loop(loop, params.B, a)
    except DegenerateLoop:
        return BerryPhaseReport(loop, 0.0, 0.0, 0.0, 0.0, level, alpha, 0, 0.0)
    try:
        flux_area = flux_area_quadrature(loop, params.B, a)
    except NonConvergence:
        flux_area = float("nan")
    analytic = flux
    if mode == "analytic":
        numeric, n = analytic, 0
    else:
        # the state is built once; its energy does not depend on w
        nodes, _ = loop.discretize(4, a)
        w0 = Point.from_complex(complex(nodes[0]))
        conv = conv if conv is not None else resolve_convention(params)
        state = _state_for(state_or_params, alpha, level, w0, conv)
        numeric, n = _numeric_phase(state, loop, samples, h_rel, spec, tol, max_samples)
    return BerryPhaseReport(loop, float(numeric), float(analytic), float(flux),
                            float(flux / (2.0 * np.pi)), level, float(alpha), n, float(flux_area))


def alpha_independence_check(loop: LoopSpec, alphas: Sequence[float], k: int,
                             params: ModelParams, *, levels: Sequence[int] = (),
                             a_values: Sequence[float] = (), samples: int = 64,
                             h_rel: float = DEFAULT_H_REL,
                             spec: QuadratureSpec = DEFAULT_CONNECTION_SPEC) -> dict:
    """Numeric phases across couplings, levels and curvature radii.

    Runs level ``k`` for every alpha in ``alphas``; every extra level in
    ``levels`` at the first alpha; every ``a`` in ``a_values`` at fixed ``b``
    and fixed coordinate loop (a geodesic circle has its radius rescaled so
    that it stays the same curve). Returns the phases and the largest pairwise
    relative deviation.
    """
    runs = []
    for al in alphas:
        r = berry_phase(loop, params, "numeric", alpha=al, level=k, samples=samples,
                        h_rel=h_rel, spec=spec)
        runs.append({"alpha": al, "level": k, "a": params.a, "phase": r.numeric_phase})
    al0 = alphas[0] if len(alphas) else 0.0
    for lev in levels:
        if lev == k:
            continue
        r = berry_phase(loop, params, "numeric", alpha=al0, level=lev, samples=samples,
                        h_rel=h_rel, spec=spec)
        runs.append({"alpha": al0, "level": lev, "a": params.a, "phase": r.numeric_phase})
    for a in a_values:
        if a == params.a:
            continue
        p2 = ModelParams(a=a, b=params.b, nu=params.nu)
        # geodesic radii are measured in the metric with radius a; keep the coordinates
        lp = loop.scaled_radius(a / params.a) if isinstance(loop, GeodesicCircle) else loop
        r = berry_phase(lp, p2, "numeric", alpha=al0, level=k, samples=samples,
                        h_rel=h_rel, spec=spec)
        runs.append({"alpha": al0, "level": k, "a": a, "phase": r.numeric_phase})
    phases = np.array([r["phase"] for r in runs])
    dev = 0.0
    for x, y in itertools.combinations(phases, 2):
        dev = max(dev, abs(x - y) / max(abs(x), abs(y)))
    return {"runs": runs, "max_pairwise_relative_deviation": float(dev),
            "analytic_phase": float(flux_through_loop(loop, params.B, params.a))}
