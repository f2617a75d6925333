import math

import numpy as np
import pytest

from lobachevsky.berry import (
    alpha_independence_check,
    berry_connection_analytic,
    berry_connection_numeric,
    berry_phase,
)
from lobachevsky.errors import DomainError
from lobachevsky.geometry import CoordinateEllipse, GeodesicCircle, Point, Polyline
from lobachevsky.model import ModelParams
from lobachevsky.spectral import bound_states

DISC_1 = 2 * math.pi * (math.cosh(1.0) - 1.0)
SMALL = GeodesicCircle(Point(0.0, 1.0), 0.3)


def test_analytic_connection():
    c = berry_connection_analytic(Point(0.7, 2.0), ModelParams(1.0, 3.0))
    assert (c.u_component, c.v_component) == (1.5, 0.0)
    c0 = berry_connection_analytic(1j, ModelParams(1.0, 0.0))
    assert (c0.u_component, c0.v_component) == (0.0, 0.0)
    p = ModelParams.from_field(0.75, a=2.0)
    assert berry_connection_analytic(2j, p).u_component == p.B * p.a ** 2 / 2.0


def test_numeric_connection_b3():
    p = ModelParams(1.0, 3.0)
    s = bound_states(0.0, Point(0.0, 2.0), p)[0]
    c = berry_connection_numeric(s)
    assert c.u_component == pytest.approx(1.5, rel=1e-4)
    assert abs(c.v_component) < 1e-6 * 1.5
    # the family is normalised, so Re <Psi|dPsi> vanishes
    assert max(abs(r) for r in c.residue) < 1e-6


def test_numeric_connection_translation():
    p = ModelParams(1.0, 1.0)
    a = berry_connection_numeric(bound_states(0.0, Point(0.0, 0.5), p)[0])
    b = berry_connection_numeric(bound_states(0.0, Point(7.0, 0.5), p)[0])
    assert a.u_component == pytest.approx(b.u_component, rel=1e-8)


def test_numeric_connection_deep_state():
    p = ModelParams(1.0, 1.0)
    s = bound_states(-1.0, Point(0.0, 1.0), p)[0]
    c = berry_connection_numeric(s)
    assert c.u_component == pytest.approx(1.0, rel=1e-4)


def test_step_validation():
    s = bound_states(0.0, 1j, ModelParams(1.0, 1.0))[0]
    with pytest.raises(DomainError):
        berry_connection_numeric(s, h_rel=0.0)


def test_analytic_phase_circle():
    rep = berry_phase(GeodesicCircle(Point(0.0, 1.0), 1.0), ModelParams(1.0, 1.0), "analytic")
    assert rep.analytic_phase == pytest.approx(DISC_1, rel=1e-12)
    assert rep.flux_quanta == rep.flux / (2 * math.pi)
    assert rep.flux_quanta == pytest.approx(0.5430806, abs=1e-7)
    assert abs(rep.flux - rep.flux_area) < 1e-8


def test_phase_depends_on_b_not_a():
    loop = CoordinateEllipse(Point(0.0, 2.0), 1.0, 0.5)
    r1 = berry_phase(loop, ModelParams(1.0, 2.0), "analytic")
    r2 = berry_phase(loop, ModelParams(2.0, 2.0), "analytic")
    assert r1.analytic_phase == pytest.approx(r2.analytic_phase, rel=1e-13)


def test_reversal_negates():
    loop = GeodesicCircle(Point(1.0, 2.0), 0.5)
    p = ModelParams(1.0, 2.0)
    a = berry_phase(loop, p, "analytic").analytic_phase
    b = berry_phase(loop.reversed(), p, "analytic").analytic_phase
    assert b == pytest.approx(-a, rel=1e-13)


def test_degenerate_loop():
    flat = Polyline((Point(0, 1), Point(1, 1), Point(2, 1)))
    rep = berry_phase(flat, ModelParams(1.0, 1.0), "numeric")
    assert rep.numeric_phase == 0.0 and rep.analytic_phase == 0.0


def test_bad_mode():
    with pytest.raises(ValueError):
        berry_phase(SMALL, ModelParams(1.0, 1.0), "exact")


def test_additivity():
    # two squares sharing an edge: fluxes add
    p = ModelParams(1.0, 1.5)
    left = Polyline((Point(0, 1), Point(1, 1), Point(1, 2), Point(0, 2)))
    right = Polyline((Point(1, 1), Point(2, 1), Point(2, 2), Point(1, 2)))
    both = Polyline((Point(0, 1), Point(2, 1), Point(2, 2), Point(0, 2)))
    f = lambda lp: berry_phase(lp, p, "analytic").analytic_phase  # noqa: E731
    assert f(left) + f(right) == pytest.approx(f(both), rel=1e-13)


@pytest.mark.slow
def test_numeric_phase_small_circle():
    p = ModelParams(1.0, 1.0)
    rep = berry_phase(SMALL, p, "numeric", samples=16, tol=1e-5)
    assert rep.relative_deviation < 1e-4
    assert rep.samples >= 16


@pytest.mark.slow
def test_numeric_phase_reversed_and_state_input():
    p = ModelParams(1.0, 1.0)
    start = SMALL.discretize(4)[0][0]
    s = bound_states(0.0, Point.from_complex(start), p)[0]
    fwd = berry_phase(SMALL, s, "numeric", samples=16, tol=1e-5)
    rev = berry_phase(SMALL.reversed(), s, "numeric", samples=16, tol=1e-5)
    assert rev.numeric_phase == pytest.approx(-fwd.numeric_phase, rel=1e-6)


@pytest.mark.slow
def test_independence_small_loop():
    p = ModelParams(1.0, 1.0)
    rep = alpha_independence_check(SMALL, [0.0, 1.0], 0, p, a_values=[2.0], samples=16)
    assert len(rep["runs"]) == 3
    assert rep["max_pairwise_relative_deviation"] < 2e-3
    np.testing.assert_allclose([r["phase"] for r in rep["runs"]], rep["analytic_phase"], rtol=1e-4)
