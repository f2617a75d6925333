import math

import numpy as np
import pytest

from lobachevsky.errors import BadBracket, NonConvergence
from lobachevsky.numerics import (
    QuadratureSpec,
    RootBracket,
    central_diff,
    expand_bracket,
    find_root,
    integrate_1d,
    integrate_polar,
)
from lobachevsky.specialfn import EULER_GAMMA, digamma


def test_integrate_constant():
    assert integrate_1d(lambda x: 1.0, 0.0, 1.0) == pytest.approx(1.0, abs=1e-14)


def test_integrate_sinh():
    val = integrate_1d(np.sinh, 0.0, 1.0)
    assert val == pytest.approx(math.cosh(1.0) - 1.0, rel=1e-12)
    assert val == pytest.approx(0.5430806348, abs=1e-10)


def test_integrate_odd_window():
    spec = QuadratureSpec()
    val = integrate_1d(lambda x: x * np.exp(-x * x), -1.0, 1.0, spec)
    assert abs(val) <= spec.abs_tol


def test_integrate_log_endpoint():
    # integrable endpoint singularity: int_0^1 ln x dx = -1
    assert integrate_1d(np.log, 0.0, 1.0) == pytest.approx(-1.0, rel=1e-9)


def test_integrate_rejects_empty_interval():
    with pytest.raises(ValueError):
        integrate_1d(np.sin, 1.0, 1.0)


def test_integrate_subdivision_limit():
    spec = QuadratureSpec(rel_tol=1e-14, abs_tol=1e-300, max_subdivisions=2)
    with pytest.raises(NonConvergence):
        integrate_1d(lambda x: np.sin(1.0 / x), 1e-4, 1.0, spec)


def test_polar_exponential():
    val = integrate_polar(lambda r, phi: np.exp(-2.0 * r) + 0.0 * phi)
    assert val == pytest.approx(2.0 * math.pi / 3.0, rel=1e-10)


def test_polar_angular_orthogonality():
    spec = QuadratureSpec()
    val = integrate_polar(lambda r, phi: np.cos(2.0 * phi) * np.exp(-3.0 * r), spec)
    assert abs(val) <= 1e-12


def test_polar_against_1d_oracle():
    # 1/(4 cosh^4(r/2)), radial integral done by the 1-D rule on a truncated range
    g = lambda r: 0.25 / np.cosh(0.5 * r) ** 4  # noqa: E731
    tight = QuadratureSpec(rel_tol=1e-13, abs_tol=1e-16)
    oracle = 2.0 * math.pi * integrate_1d(lambda r: g(r) * np.sinh(r), 0.0, 80.0, tight)
    val = integrate_polar(lambda r, phi: g(r) + 0.0 * phi)
    assert val == pytest.approx(oracle, rel=1e-10)
    # closed form: int sinh r / (4 cosh^4(r/2)) dr = 1/2
    assert val == pytest.approx(math.pi, rel=1e-10)


def test_polar_vector_valued_and_full_output():
    res = integrate_polar(lambda r, phi: np.stack([np.exp(-2 * r) + 0 * phi,
                                                   np.exp(-3 * r) + 0 * phi], axis=-1),
                          full_output=True)
    assert res.value[0] == pytest.approx(2 * math.pi / 3, rel=1e-10)
    assert res.value[1] == pytest.approx(2 * math.pi / 8, rel=1e-10)
    assert res.r_max > 0 and res.n_phi >= 64


def test_polar_staggered_same_value():
    f = lambda r, phi: np.exp(-2 * r) * (1 + 0.3 * np.sin(phi))  # noqa: E731
    assert integrate_polar(f, staggered=True) == pytest.approx(integrate_polar(f), rel=1e-11)


def test_polar_no_decay():
    with pytest.raises(NonConvergence):
        integrate_polar(lambda r, phi: np.exp(-0.5 * r) + 0.0 * phi)


def test_root_linear():
    assert find_root(lambda x: x - 2.0, expand_bracket(lambda x: x - 2.0, 0.0, 5.0)) == \
        pytest.approx(2.0, abs=1e-15)


def test_root_digamma():
    f = lambda x: float(digamma(x)) + EULER_GAMMA  # noqa: E731
    assert find_root(f, (0.5, 2.0)) == pytest.approx(1.0, abs=1e-14)


def test_root_residual_contract():
    f = lambda x: math.exp(x) - 3.0  # noqa: E731
    x = find_root(f, (0.0, 2.0), tol=1e-12)
    assert abs(f(x)) <= 1e-12


def test_bad_bracket():
    with pytest.raises(BadBracket):
        RootBracket(0.0, 1.0, 1.0, 2.0)
    with pytest.raises(BadBracket):
        RootBracket(1.0, 0.0, -1.0, 1.0)


def test_central_diff():
    assert central_diff(lambda x: x * x, 3.0, 0.1) == pytest.approx(6.0, abs=1e-12)
    assert central_diff(np.exp, 0.0, 1e-2) == pytest.approx(1.0, abs=1e-9)
    assert central_diff(lambda x: 4.0, 1.0, 1e-3) == 0.0
    out = central_diff(lambda x: np.array([x, x ** 3]), 2.0, 1e-2)
    np.testing.assert_allclose(out, [1.0, 12.0], rtol=1e-9)


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(n_phi=5)
