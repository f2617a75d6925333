import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lobachevsky.errors import PoleArgument
from lobachevsky.specialfn import (
    EULER_GAMMA,
    Hyp2F1Params,
    digamma,
    gamma,
    hyp2f1_log_case,
    hyp2f1_log_case_scaled,
    ln_gamma,
    rgamma,
    trigamma,
)

mp.mp.dps = 30


def test_ln_gamma_values():
    assert ln_gamma(1.0) == pytest.approx(0.0, abs=1e-15)
    assert ln_gamma(0.5) == pytest.approx(0.5723649429247001, rel=1e-14)
    assert ln_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-14)


def test_digamma_values():
    assert digamma(1.0) == pytest.approx(-EULER_GAMMA, rel=1e-15)
    assert digamma(0.5) == pytest.approx(-1.9635100260214235, rel=1e-14)
    assert digamma(2.0) == pytest.approx(1.0 - EULER_GAMMA, rel=1e-14)
    assert digamma(-0.5) == pytest.approx(2.0 - EULER_GAMMA - 2 * math.log(2), rel=1e-13)


def test_trigamma_values():
    assert trigamma(1.0) == pytest.approx(math.pi ** 2 / 6, rel=1e-14)
    assert trigamma(0.5) == pytest.approx(math.pi ** 2 / 2, rel=1e-14)
    # psi'(-1/2) = psi'(1/2) + 4
    assert trigamma(-0.5) == pytest.approx(math.pi ** 2 / 2 + 4.0, rel=1e-13)


def test_real_in_real_out():
    assert np.isrealobj(digamma(np.array([0.3, 2.5])))
    assert np.iscomplexobj(digamma(np.array([0.3 + 1j])))


def test_poles():
    for f in (ln_gamma, gamma, digamma, trigamma):
        with pytest.raises(PoleArgument):
            f(-2.0)
        with pytest.raises(PoleArgument):
            f(0.0)
    assert rgamma(-3.0) == 0.0


@settings(max_examples=60, deadline=None)
@given(st.floats(-30, 30), st.floats(-30, 30))
def test_against_mpmath(x, y):
    z = complex(x, y)
    if x < 0.5 and abs(z - min(round(x), 0)) < 1e-2:
        return
    assert complex(digamma(z)) == pytest.approx(complex(mp.digamma(z)), rel=1e-12, abs=1e-12)
    assert complex(trigamma(z)) == pytest.approx(complex(mp.psi(1, z)), rel=1e-11, abs=1e-12)
    lg = complex(ln_gamma(z))
    ref = complex(mp.loggamma(z))
    assert lg.real == pytest.approx(ref.real, rel=1e-12, abs=1e-12)
    # imaginary part is defined modulo 2 pi
    assert math.cos(lg.imag - ref.imag) == pytest.approx(1.0, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 40.0))
def test_reflection(x):
    # Gamma(x) Gamma(1-x) = pi / sin(pi x) away from integers
    if abs(x - round(x)) < 1e-3:
        return
    lhs = gamma(x) * gamma(1 - x)
    assert lhs == pytest.approx(math.pi / math.sin(math.pi * x), rel=1e-11)


def test_recurrences(rng):
    z = rng.uniform(-8, 8, 50) + 1j * rng.uniform(0.1, 8, 50)
    np.testing.assert_allclose(digamma(z + 1), digamma(z) + 1 / z, rtol=1e-12, atol=1e-13)
    np.testing.assert_allclose(trigamma(z + 1), trigamma(z) - 1 / z ** 2, rtol=1e-11, atol=1e-13)


def test_hyp2f1_closed_forms():
    assert hyp2f1_log_case(1.0, 1.0, 1e-12) == pytest.approx(1.0, abs=1e-11)
    assert hyp2f1_log_case(1.0, 1.0, 0.5) == pytest.approx(2 * math.log(2), rel=1e-13)
    assert hyp2f1_log_case(1.0, 1.0, 0.9) == pytest.approx(-math.log(0.1) / 0.9, rel=1e-13)
    assert hyp2f1_log_case(Hyp2F1Params(1.0, 1.0, 0.5)) == pytest.approx(2 * math.log(2), rel=1e-13)
    assert math.isinf(abs(hyp2f1_log_case(1.0, 1.0, 1.0)))


def test_hyp2f1_params_domain():
    with pytest.raises(ValueError):
        Hyp2F1Params(1.0, 1.0, 1.5)
    assert Hyp2F1Params(1.5, 0.5, 0.2).c == 2.0


def test_hyp2f1_terminating():
    # 2F1(-2, q; q-2; x) is a quadratic
    q, x = 3.5, 0.7
    c = q - 2
    ref = 1 + (-2) * q / c * x + (-2) * (-1) * q * (q + 1) / (c * (c + 1)) * x * x / 2
    assert hyp2f1_log_case(-2.0, q, x) == pytest.approx(ref, rel=1e-13)


@pytest.mark.parametrize("p,q", [(1.3, 0.4), (3.7, 0.3), (4.0 + 1.5j, 2.0 - 1.5j), (6.5, 0.5)])
@pytest.mark.parametrize("x", [0.05, 0.3, 0.5, 0.7, 0.95, 0.999])
def test_hyp2f1_against_mpmath(p, q, x):
    ref = complex(mp.hyp2f1(p, q, p + q, x))
    assert complex(hyp2f1_log_case(p, q, x)) == pytest.approx(ref, rel=1e-11)


@pytest.mark.parametrize("p,q", [(2.3, 0.6), (5.0, 1.0), (3.0 + 0.5j, 1.0 + 0.5j)])
def test_branch_overlap(p, q):
    x = np.linspace(0.3, 0.8, 11)
    a = hyp2f1_log_case(p, q, x, method="series")
    b = hyp2f1_log_case(p, q, x, method="connection")
    np.testing.assert_allclose(a, b, rtol=1e-11)


def _scaled_ref(p, q, x, lw=0.0):
    return complex(mp.gamma(p) * mp.gamma(q) / mp.gamma(p + q) * mp.hyp2f1(p, q, p + q, x)
                   * mp.exp(lw))


@pytest.mark.parametrize("t,b", [(3.2, 1.0), (25.0, 3.0), (120.5, 1.0), (601.8, 1.0)])
@pytest.mark.parametrize("sm1", [1e-6, 0.02, 0.7, 5.0])
def test_scaled_large_parameters(t, b, sm1):
    # the combination used by the Green's function, including sigma^-t
    mp.mp.dps = 60
    try:
        sig = 1 + mp.mpf(sm1)
        x = 1 / sig
        lw = -t * float(mp.log(sig))
        ref = _scaled_ref(mp.mpf(t + b), mp.mpf(t - b), x, lw)
    finally:
        mp.mp.dps = 30
    val = hyp2f1_log_case_scaled(t + b, t - b, float(x), one_minus_x=sm1 / (1 + sm1),
                                 log_weight=lw)
    assert complex(val) == pytest.approx(ref, rel=1e-11)


def test_scaled_integral_method_matches_direct():
    p, q, x = 4.0, 2.0, 0.6
    ref = _scaled_ref(p, q, x)
    assert complex(hyp2f1_log_case_scaled(p, q, x, method="integral")) == pytest.approx(ref, rel=1e-11)
    assert complex(hyp2f1_log_case_scaled(p, q, x, method="series")) == pytest.approx(ref, rel=1e-12)
    assert complex(hyp2f1_log_case_scaled(p, q, x, method="connection")) == pytest.approx(ref, rel=1e-12)
    with pytest.raises(ValueError):
        hyp2f1_log_case_scaled(1.0 + 1j, 2.0, 0.5, method="integral")
