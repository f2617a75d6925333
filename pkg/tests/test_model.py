import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lobachevsky.errors import DiagonalSingularity, DomainError, SpectrumError
from lobachevsky.geometry import geodesic_distance, sigma_minus_one
from lobachevsky.model import (
    ModelParams,
    apply_H0_fd,
    green0,
    is_half_integer,
    landau_levels,
    n0,
    phase_factor,
    radial_green,
    t_of_zeta,
    threshold,
)


def test_params():
    p = ModelParams.from_field(3.0, a=2.0)
    assert p.b == 12.0 and p.B == 3.0
    assert p.curvature == pytest.approx(-0.5)
    with pytest.raises(ValueError):
        ModelParams(a=0.0)


def test_levels_examples():
    assert landau_levels(ModelParams(1.0, 0.4)) == []
    assert landau_levels(ModelParams(1.0, 3.0)) == [(0, 2.75), (1, 6.75), (2, 8.75)]
    assert landau_levels(ModelParams(1.0, -3.0)) == [(0, 2.75), (1, 6.75), (2, 8.75)]


def test_half_integer_counts():
    assert n0(ModelParams(1.0, 2.5)) == 1
    assert [n for n, _ in landau_levels(ModelParams(1.0, 2.5))] == [0, 1]
    assert n0(ModelParams(1.0, 0.5)) == -1
    assert is_half_integer(2.5) and not is_half_integer(2.4)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 20.0), st.floats(0.2, 3.0))
def test_levels_forms_agree(b, a):
    levs = landau_levels(ModelParams(a, b))
    for n, e in levs:
        alt = (abs(b) * (2 * n + 1) - (n + 0.5) ** 2) / a ** 2
        assert e == pytest.approx(alt, rel=1e-12, abs=1e-12)
        assert e < threshold(ModelParams(a, b))
    assert all(e1 < e2 for (_, e1), (_, e2) in zip(levs, levs[1:]))


def test_threshold():
    assert threshold(ModelParams(1.0, 3.0)) == 9.0
    assert threshold(ModelParams(2.0, 3.0)) == 2.25
    assert threshold(ModelParams(1.0, 0.0)) == 0.0


def test_t_of_zeta():
    p = ModelParams(1.0, 3.0)
    assert t_of_zeta(0.0, p) == 3.5
    assert t_of_zeta(2.75, p) == pytest.approx(3.0, abs=1e-15)
    assert t_of_zeta(-1e8, p) == pytest.approx(1e4, rel=1e-4)
    with pytest.raises(DomainError):
        t_of_zeta(9.0, p)
    with pytest.raises(DomainError):
        t_of_zeta(12.0 + 0j, p)
    tc = t_of_zeta(12.0 + 1j, p)
    assert tc.real > 0.5


def test_phase_factor_properties(rng):
    z = rng.uniform(-3, 3, 40) + 1j * rng.uniform(0.1, 3, 40)
    w = rng.uniform(-3, 3, 40) + 1j * rng.uniform(0.1, 3, 40)
    b = rng.uniform(-5, 5, 40)
    np.testing.assert_allclose(np.abs(phase_factor(z, w, b)), 1.0, atol=1e-14)
    assert phase_factor(1 + 2j, 1 + 2j, 3.7) == pytest.approx(1.0, abs=1e-14)
    for m in (1, 2, 3, -2):
        base = -(np.conj(z) - w) / (z - np.conj(w))
        np.testing.assert_allclose(phase_factor(z, w, m), base ** m, atol=1e-13)


def test_phase_product_translation(rng):
    # u-translation of both points leaves the factor invariant
    z, w = 0.3 + 1.2j, -0.7 + 2.1j
    assert phase_factor(z + 5, w + 5, 2.3) == pytest.approx(phase_factor(z, w, 2.3), abs=1e-14)


def test_green_hermiticity(rng):
    p = ModelParams(1.3, 2.2)
    for _ in range(20):
        z = complex(rng.uniform(-2, 2), rng.uniform(0.3, 3))
        zp = complex(rng.uniform(-2, 2), rng.uniform(0.3, 3))
        zeta = complex(rng.uniform(-5, 2), rng.uniform(-3, 3))
        g1 = green0(z, zp, np.conj(zeta), p)
        g2 = np.conj(green0(zp, z, zeta, p))
        assert g1 == pytest.approx(g2, rel=1e-11, abs=1e-14)


def test_green_isometry():
    p = ModelParams(1.0, 1.7)
    z, zp, zeta = 0.2 + 1j, 1.1 + 1.5j, -2.0
    g = green0(z, zp, zeta, p)
    # dilation about the origin keeps sigma and the gauge factor
    assert green0(3 * z, 3 * zp, zeta, p) == pytest.approx(g, rel=1e-12)
    assert green0(z + 4, zp + 4, zeta, p) == pytest.approx(g, rel=1e-12)


def test_green_log_singularity():
    p = ModelParams(1.0, 3.0)
    t = t_of_zeta(-1.0, p)
    vals = []
    for d in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6):
        sm1 = math.sinh(d / 2) ** 2
        vals.append(float(np.real(radial_green(sm1, t, p.b))) + math.log(d) / (2 * math.pi))
    assert max(vals) - min(vals) < 1e-3
    # through green0 along the vertical geodesic where the guard still allows it
    for d in (1e-2, 1e-4):
        zp = 1j * math.exp(d)
        g = green0(1j, zp, -1.0, p)
        assert abs(g + math.log(d) / (2 * math.pi) - vals[-1]) < 1e-3


def test_green_guards():
    p = ModelParams(1.0, 3.0)
    with pytest.raises(DiagonalSingularity):
        green0(1j, 1j, -1.0, p)
    with pytest.raises(SpectrumError):
        green0(1j, 2j, 2.75, p)
    with pytest.raises(SpectrumError):
        green0(1j, 2j, 10.0, p)


def test_green_decay():
    p = ModelParams(1.0, 1.0)
    t = t_of_zeta(-2.0, p)
    s1, s2 = 1e4, 1e6
    g1 = float(np.real(radial_green(s1 - 1, t, p.b)))
    g2 = float(np.real(radial_green(s2 - 1, t, p.b)))
    assert g2 / g1 == pytest.approx((s2 / s1) ** -t, rel=1e-3)


def test_fd_constant():
    p = ModelParams(1.5, 2.0, nu=1.0)
    val = apply_H0_fd(lambda z: 1.0, 1j, 1e-3, p)
    assert val == pytest.approx((4.0 - 0.25) / 2.25, rel=1e-12)


def test_fd_nu_shift():
    f = lambda z: np.exp(-abs(z - 1j) ** 2)  # noqa: E731
    a = apply_H0_fd(f, 0.3 + 1.2j, 1e-3, ModelParams(1.2, 1.0, nu=1.0))
    b = apply_H0_fd(f, 0.3 + 1.2j, 1e-3, ModelParams(1.2, 1.0, nu=4.0))
    assert b - a == pytest.approx(-(3.0 / (4 * 1.44)) * f(0.3 + 1.2j), rel=1e-10)


@pytest.mark.parametrize("a,b,zeta", [(1.0, 3.0, -1.0), (1.0, 1.0, 0.3 + 0.7j), (2.0, 0.4, -0.5)])
def test_fd_resolvent_residual(a, b, zeta):
    p = ModelParams(a, b)
    zp = 0.2 + 1.0j
    z = 1.1 + 2.3j
    assert geodesic_distance(z, zp, a) > a / 2
    f = lambda x: green0(x, zp, zeta, p)  # noqa: E731
    res = [abs(apply_H0_fd(f, z, h, p) - zeta * f(z)) for h in (1e-2, 5e-3)]
    assert math.log2(res[0] / res[1]) == pytest.approx(2.0, abs=0.1)


def test_stencil_domain():
    with pytest.raises(DomainError):
        apply_H0_fd(lambda z: 1.0, 0.001j, 0.01, ModelParams())


def test_sigma_helpers_consistent():
    assert sigma_minus_one(1j, 2j) == pytest.approx(0.125)
