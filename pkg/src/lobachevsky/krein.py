"""Krein Q-function of the point interaction.

Q is the regularized diagonal of the free resolvent,

    Q(zeta) = lim_{z' -> z} [ G0(z, z'; zeta) + ln d_a(z, z') / (2 pi) ],

which in closed form is ``sign/(4 pi) [psi(t+b) + psi(t-b) + 2 gamma - 2 ln 2a]``.
The overall sign is fixed by comparing with the regularized limit (see
:func:`resolve_convention`); it comes out as ``-1``. The oracle and the closed
form then agree with zero offset.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, NonConvergence, SpectrumError
from .model import (
    ModelParams,
    green0,
    is_half_integer,
    landau_levels,
    t_of_zeta,
    threshold,
)
from .specialfn import EULER_GAMMA, digamma, trigamma

__all__ = [
    "QConvention",
    "q_bracket",
    "q_closed_form",
    "q_derivative",
    "q_threshold",
    "q_oracle_regularized",
    "resolve_convention",
    "special_interval_solvable",
    "alpha_from_lambda",
    "lambda_from_alpha",
]


@dataclass(frozen=True)
class QConvention:
    """Overall sign of the closed-form Q, plus how it was established.

    ``offset`` is oracle minus signed closed form (kept out of Q itself);
    ``drift`` is its spread over the sampled energies.
    """

    sign: int
    resolved: bool = True
    offset: float = 0.0
    drift: float = 0.0

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise ValueError("sign must be +1 or -1")


def _require(conv, params: ModelParams) -> QConvention:
    if conv is None:
        return resolve_convention(params)
    if not conv.resolved:
        raise ValueError("Q convention has not been resolved")
    return conv


def _spectral_t(zeta, params: ModelParams):
    t = t_of_zeta(zeta, params)
    b = params.b
    for s in (np.asarray(t + b), np.asarray(t - b)):
        re = np.real(s)
        hit = (np.imag(s) == 0) & (re <= 0) & (np.abs(re - np.round(re)) < 1e-13)
        if np.any(hit):
            raise SpectrumError(f"zeta = {zeta!r} is a Landau level")
    return t


def q_bracket(t, params: ModelParams):
    """Unsigned bracket ``(1/4pi)[psi(t+b) + psi(t-b) + 2 gamma - 2 ln 2a]``."""
    b = params.b
    return (digamma(t + b) + digamma(t - b) + 2.0 * EULER_GAMMA
            - 2.0 * np.log(2.0 * params.a)) / (4.0 * np.pi)


def q_closed_form(zeta, params: ModelParams, conv: QConvention | None = None):
    """Signed closed-form Q. Real for real ``zeta`` below the threshold."""
    conv = _require(conv, params)
    t = _spectral_t(zeta, params)
    return conv.sign * q_bracket(t, params)


def q_derivative(zeta: float, params: ModelParams, conv: QConvention | None = None) -> float:
    """dQ/dzeta by the chain rule, ``dt/dzeta = -a^2 / (2 sqrt(b^2 - a^2 zeta))``."""
    conv = _require(conv, params)
    if np.iscomplexobj(zeta) and np.imag(zeta) != 0:
        raise DomainError("q_derivative takes a real energy")
    zeta = float(np.real(zeta))
    t = _spectral_t(zeta, params)
    b, a2 = params.b, params.a ** 2
    dt = -a2 / (2.0 * (t - 0.5))
    return conv.sign * (trigamma(t + b) + trigamma(t - b)) / (4.0 * np.pi) * dt


def q_threshold(params: ModelParams, conv: QConvention | None = None) -> float:
    """Limit of Q at the threshold from below, evaluated at ``t = 1/2`` exactly.

    Returns ``+inf`` (times the sign) for half-integer ``|b|``, where
    ``psi(1/2 - |b|)`` has a pole.
    """
    conv = _require(conv, params)
    if is_half_integer(params.b):
        # psi(1/2-|b|) -> -inf from the left as t -> 1/2+, so the bracket -> -inf
        return -conv.sign * np.inf
    return conv.sign * q_bracket(0.5, params)


def _oracle_samples(zeta, z, params, distances):
    z = complex(z)
    out = []
    for d in distances:
        # vertical geodesic: the gauge factor is exactly 1 there
        zp = complex(z.real, z.imag * np.exp(d / params.a))
        g = green0(z, zp, zeta, params)
        out.append(np.real(g) + np.log(d) / (2.0 * np.pi))
    return np.array(out)


def q_oracle_regularized(zeta: float, z=1j, params: ModelParams = ModelParams(),
                         levels: int = 9, tol: float = 1e-8) -> float:
    """Regularized-trace estimate of Q at real ``zeta`` below the spectrum.

    Samples ``G0 + ln d / 2pi`` at ``d_j = 1e-2 * 2^-j`` along the vertical
    geodesic through ``z`` and extrapolates to ``d -> 0``. The remainder is
    ``d^2 (A + B ln d) + O(d^4 ln d)``, so each window of three consecutive
    samples is fitted on the basis ``1, d^2, d^2 ln d``; the last two window
    estimates must agree to ``tol``.
    """
    if np.iscomplexobj(zeta) and np.imag(zeta) != 0:
        raise DomainError("oracle takes a real energy")
    zeta = float(np.real(zeta))
    levs = landau_levels(params)
    bottom = levs[0][1] if levs else threshold(params)
    if zeta >= bottom:
        raise DomainError("oracle requires zeta below the whole spectrum")
    d = 1e-2 * 2.0 ** -np.arange(levels)
    f = _oracle_samples(zeta, z, params, d)
    est = []
    for j in range(levels - 2):
        dd = d[j:j + 3]
        A = np.column_stack([np.ones(3), dd ** 2, dd ** 2 * np.log(dd)])
        est.append(np.linalg.solve(A, f[j:j + 3])[0])
    est = np.array(est)
    spread = abs(est[-1] - est[-2])
    if not np.isfinite(est[-1]) or spread > tol * max(1.0, abs(est[-1])):
        raise NonConvergence(f"regularized trace did not settle (spread {spread:.3g})")
    return float(est[-1])


@lru_cache(maxsize=64)
def _resolve_cached(a: float, b: float, nu: float) -> QConvention:
    params = ModelParams(a=a, b=b, nu=nu)
    levs = landau_levels(params)
    bottom = levs[0][1] if levs else threshold(params)
    scale = 1.0 / params.a ** 2
    zetas = bottom - scale * np.array([0.5, 1.0, 2.0, 4.0, 8.0])
    oracle = np.array([q_oracle_regularized(zz, 1j, params) for zz in zetas])
    # slope test: the regularized trace is increasing in zeta
    increasing = oracle[0] > oracle[-1]
    sign = 1 if increasing == (q_bracket(t_of_zeta(zetas[0], params), params)
                               > q_bracket(t_of_zeta(zetas[-1], params), params)) else -1
    closed = np.array([sign * q_bracket(t_of_zeta(zz, params), params) for zz in zetas])
    diff = oracle - closed
    return QConvention(sign=sign, resolved=True, offset=float(np.mean(diff)),
                       drift=float(np.ptp(diff)))


def resolve_convention(params: ModelParams = ModelParams(a=1.0, b=1.0)) -> QConvention:
    """Fix the sign of the closed-form Q from the slope of the regularized trace.

    The result is cached per parameter set. ``offset`` and ``drift`` record the
    comparison between oracle and signed closed form on five energies below
    the spectrum.
    """
    return _resolve_cached(float(params.a), float(params.b), float(params.nu))


def special_interval_solvable(alpha: float, params: ModelParams,
                              conv: QConvention | None = None) -> bool:
    """Whether ``Q(zeta) = alpha`` has a root on the interval ending at the threshold.

    Q increases there from ``-inf`` (or from a pole) up to its threshold
    value, so the root exists iff ``alpha < Q(threshold-)``; always for
    half-integer ``|b|``.
    """
    conv = _require(conv, params)
    if is_half_integer(params.b):
        return True
    qth = q_threshold(params, conv)
    if conv.sign < 0:
        return bool(alpha < qth)
    # with the opposite sign Q would decrease towards the threshold
    return bool(alpha > qth)


def alpha_from_lambda(lam: float) -> float:
    """Coupling in the closed-form convention, ``2 pi alpha = ln lambda``."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    return float(np.log(lam) / (2.0 * np.pi))


def lambda_from_alpha(alpha: float) -> float:
    return float(np.exp(2.0 * np.pi * alpha))
