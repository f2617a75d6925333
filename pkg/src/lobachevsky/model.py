"""Free magnetic Hamiltonian on the Lobachevsky plane.

Units: e = c = hbar = 2 m* = 1. With curvature radius ``a`` and reduced field
``b = B a^2`` the operator is

    H0 = (1/a^2) [ -y^2 (d_xx + d_yy) + 2 i b y d_x + b^2 ] - nu / (4 a^2)

in the Landau gauge ``A = (b / y) dx``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DiagonalSingularity, DomainError, SpectrumError
from .geometry import as_complex, sigma_minus_one
from .specialfn import hyp2f1_log_case_scaled

__all__ = [
    "ModelParams",
    "HALF_INTEGER_TOL",
    "is_half_integer",
    "landau_levels",
    "n0",
    "threshold",
    "t_of_zeta",
    "phase_factor",
    "radial_green",
    "green0",
    "green0_values",
    "apply_H0_fd",
]

HALF_INTEGER_TOL = 1e-12
DIAGONAL_TOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    a: float = 1.0
    b: float = 0.0
    nu: float = 1.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"curvature radius a must be positive, got {self.a}")
        if not np.isfinite(self.b):
            raise ValueError("field b must be finite")

    @classmethod
    def from_field(cls, B: float, a: float = 1.0, nu: float = 1.0) -> "ModelParams":
        """Build from the raw field intensity; ``b = B a^2`` in code units."""
        return cls(a=a, b=B * a * a, nu=nu)

    @property
    def B(self) -> float:
        return self.b / (self.a * self.a)

    @property
    def curvature(self) -> float:
        return -2.0 / (self.a * self.a)

    def as_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "B": self.B, "nu": self.nu}


def is_half_integer(b: float) -> bool:
    m = abs(b) - 0.5
    return abs(m - round(m)) < HALF_INTEGER_TOL and m > -HALF_INTEGER_TOL


def n0(params: ModelParams) -> int:
    """Index of the highest Landau level, ``ceil(|b| - 1/2) - 1`` (``-1`` if none).

    Values of ``|b| - 1/2`` within ``HALF_INTEGER_TOL`` of an integer are
    treated as that integer, so the level touching the threshold is excluded.
    """
    m = abs(params.b) - 0.5
    r = round(m)
    if abs(m - r) < HALF_INTEGER_TOL:
        return int(r) - 1
    return int(np.ceil(m)) - 1


def landau_levels(params: ModelParams) -> list[tuple[int, float]]:
    """``(n, E0_n)`` for ``0 <= n < |b| - 1/2``, increasing."""
    ab = abs(params.b)
    a2 = params.a * params.a
    return [(n, (params.b ** 2 - (ab - n - 0.5) ** 2) / a2) for n in range(n0(params) + 1)]


def threshold(params: ModelParams) -> float:
    """Bottom of the absolutely continuous spectrum, ``b^2 / a^2``."""
    return params.b ** 2 / params.a ** 2


def t_of_zeta(zeta, params: ModelParams):
    """``t = 1/2 + sqrt(b^2 - a^2 zeta)`` with the principal square root.

    Real arguments at or above the threshold lie on the cut and raise
    :class:`DomainError`; real arguments below it give real ``t > 1/2``.
    """
    z = np.asarray(zeta)
    if np.iscomplexobj(z):
        on_cut = (np.imag(z) == 0) & (np.real(z) >= threshold(params))
        if np.any(on_cut):
            raise DomainError("zeta lies on the cut [b^2/a^2, inf)")
        t = 0.5 + np.sqrt(params.b ** 2 - params.a ** 2 * z.astype(complex))
    else:
        if np.any(z >= threshold(params)):
            raise DomainError("zeta lies on the cut [b^2/a^2, inf)")
        t = 0.5 + np.sqrt(params.b ** 2 - params.a ** 2 * z.astype(float))
    return t.item() if t.ndim == 0 else t


def _t_value(zeta, params):
    # internal: allow the threshold itself (t = 1/2) for boundary evaluations
    if np.iscomplexobj(zeta) and np.imag(zeta) != 0:
        return 0.5 + np.sqrt(complex(params.b ** 2 - params.a ** 2 * zeta))
    return 0.5 + np.sqrt(max(params.b ** 2 - params.a ** 2 * float(np.real(zeta)), 0.0))


def phase_factor(z, w, b: float):
    """Unit-modulus gauge factor ``(-(conj(z) - w) / (z - conj(w)))^b``.

    With ``xi = z - conj(w)`` (``Im xi > 0``) the base is ``-conj(xi)/xi`` and
    its principal argument is ``pi - 2 arg(xi)``, so the power is taken as
    ``exp(i b (pi - 2 arg xi))``.
    """
    z, w = as_complex(z), as_complex(w)
    xi = z - np.conj(w)
    out = np.exp(1j * b * (np.pi - 2.0 * np.angle(xi)))
    return out


def _check_off_spectrum(t, b):
    for s in (t + b, t - b):
        if np.imag(s) == 0 and np.real(s) <= 0 and abs(np.real(s) - round(np.real(s))) < 1e-13:
            raise SpectrumError("spectral parameter sits on a Landau level")


def radial_green(sm1, t, b: float):
    """Gauge-stripped Green's function as a function of ``sigma - 1``.

    ``(1/4pi) Gamma(t+b) Gamma(t-b) / Gamma(2t) sigma^-t 2F1(t+b, t-b; 2t; 1/sigma)``.
    Real for real ``t``. No diagonal check; ``sm1 = 0`` gives ``inf``.
    """
    sm1 = np.asarray(sm1, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        sig = 1.0 + sm1
        x = np.where(np.isfinite(sig), 1.0 / sig, 0.0)
        y = np.where(np.isfinite(sig), sm1 / sig, 1.0)
        log_sig = np.log1p(sm1)
    out = np.zeros(sm1.shape, dtype=complex)
    live = x > 0
    diag = sm1 <= 0
    ok = live & ~diag
    if np.any(ok):
        # sigma^-t = exp(-t ln sigma) folded into the 2F1 evaluation
        out[ok] = hyp2f1_log_case_scaled(t + b, t - b, x[ok], one_minus_x=y[ok],
                                         log_weight=-np.real(t) * log_sig[ok]) \
            * np.exp(-1j * np.imag(t) * log_sig[ok]) / (4.0 * np.pi)
    out[diag] = np.inf
    return out.item() if out.ndim == 0 else out


def green0_values(z, zp, zeta, params: ModelParams):
    """Vectorised free Green's function without the diagonal check."""
    t = _t_value(zeta, params)
    _check_off_spectrum(t, params.b)
    z, zp = np.asarray(z, dtype=complex), np.asarray(zp, dtype=complex)
    sm1 = np.abs(z - zp) ** 2 / (4.0 * np.imag(z) * np.imag(zp))
    return phase_factor(z, zp, params.b) * radial_green(sm1, t, params.b)


def green0(z, zp, zeta, params: ModelParams) -> complex:
    """Integral kernel of ``(H0 - zeta)^{-1}`` with respect to ``d mu_a``.

    Raises :class:`DiagonalSingularity` when ``sigma - 1 < 1e-12`` and
    :class:`SpectrumError` on a Landau level or on the cut.
    """
    zc, zpc = as_complex(z), as_complex(zp)
    if np.any(sigma_minus_one(zc, zpc) < DIAGONAL_TOL):
        raise DiagonalSingularity("green0 evaluated at coincident points")
    zc_arr = np.asarray(zeta)
    if np.isrealobj(zc_arr) or np.imag(zeta) == 0:
        if float(np.real(zeta)) >= threshold(params):
            raise SpectrumError("zeta lies in the continuous spectrum")
    out = green0_values(zc, zpc, zeta, params)
    return out.item() if np.ndim(out) == 0 else out


def apply_H0_fd(f: Callable, z, h: float, params: ModelParams) -> complex:
    """Second-order finite-difference application of H0 to ``f`` at ``z``.

    ``f`` takes a complex point. Five-point Laplacian plus a central first
    derivative in x; truncation error O(h^2).
    """
    zc = as_complex(z)
    y = zc.imag
    if y - h <= 0:
        raise DomainError("stencil leaves the upper half-plane")
    f0 = f(zc)
    fxp, fxm = f(zc + h), f(zc - h)
    fyp, fym = f(zc + 1j * h), f(zc - 1j * h)
    lap = (fxp + fxm + fyp + fym - 4.0 * f0) / (h * h)
    fx = (fxp - fxm) / (2.0 * h)
    a2 = params.a ** 2
    b = params.b
    return (-y * y * lap + 2j * b * y * fx + b * b * f0) / a2 - params.nu / (4.0 * a2) * f0
