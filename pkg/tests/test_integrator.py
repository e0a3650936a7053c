import math

import numpy as np
import pytest

from slq.coeffs import CoefficientSet
from slq.errors import MaxStepsExceeded, SpanError, StepSizeUnderflow
from slq.integrator import QuasiState, Tolerances, fundamental_pair, solve_system


def test_tolerances_validation():
    with pytest.raises(ValueError):
        Tolerances(rel=0.0)
    with pytest.raises(ValueError):
        Tolerances(max_steps=0)


def test_linear_solution(free):
    traj = solve_system(free, 0.0, (0, 1), QuasiState(0, 0, 1))
    u, u1 = traj(1.0)
    assert u == pytest.approx(1.0, abs=1e-12) and u1 == pytest.approx(1.0, abs=1e-12)


def test_sine(free):
    traj = solve_system(free, math.pi ** 2, (0, 1), QuasiState(0, 0, math.pi))
    u, u1 = traj(1.0)
    assert abs(u) <= 1e-8
    assert u1 == pytest.approx(-math.pi, abs=1e-8)
    assert traj.direction == "forward"


def test_dense_output(free):
    traj = solve_system(free, 4.0, (0, 3), QuasiState(0, 1, 0))
    xs = np.linspace(0, 3, 1001)
    u, u1 = traj(xs)
    np.testing.assert_allclose(u.real, np.cos(2 * xs), atol=1e-8)
    np.testing.assert_allclose(u1.real, -2 * np.sin(2 * xs), atol=1e-8)


def test_delta_matching(delta):
    traj = solve_system(delta, 0.0, (0, 1), QuasiState(0, 0, 1))
    u_mid = traj.u(0.5)
    assert u_mid == pytest.approx(0.5, abs=1e-12)
    assert traj.u(1.0) == pytest.approx(3.5, abs=1e-10)
    assert abs(traj.u1(0.5, "right") - traj.u1(0.5, "left")) <= 1e-11
    jump = traj.slope(0.5, "right") - traj.slope(0.5, "left")
    assert jump == pytest.approx(10 * u_mid, rel=1e-10)
    assert 0.5 in traj.xs


def test_fundamental_pair_free(free):
    th, ph = fundamental_pair(free, 0.0, (0, 1))
    xs = np.linspace(0, 1, 50)
    np.testing.assert_allclose(th.u(xs), 1.0, atol=1e-12)
    np.testing.assert_allclose(th.u1(xs), 0.0, atol=1e-12)
    np.testing.assert_allclose(ph.u(xs), xs, atol=1e-12)
    th, ph = fundamental_pair(free, 1.0, (0, 1))
    np.testing.assert_allclose(th.u(xs).real, np.cos(xs), atol=1e-8)
    np.testing.assert_allclose(ph.u(xs).real, np.sin(xs), atol=1e-8)


def test_fundamental_pair_delta(delta):
    _, ph = fundamental_pair(delta, 0.0, (0, 1))
    assert ph.u(1.0) == pytest.approx(3.5, abs=1e-10)


@pytest.mark.parametrize("coeffs", [("1 + x^2", "sin(x)", "x", "0"), ("2", "0", "-1", "0.5")])
def test_linearity(coeffs, rng):
    c = CoefficientSet.from_strings(*coeffs)
    y, z = rng.normal(size=2) + 1j * rng.normal(size=2), rng.normal(size=2) + 1j * rng.normal(size=2)
    al, be = 0.7 - 1.1j, 2.0 + 0.3j
    ty = solve_system(c, 1.5, (0, 2), QuasiState(0, *y))
    tz = solve_system(c, 1.5, (0, 2), QuasiState(0, *z))
    tw = solve_system(c, 1.5, (0, 2), QuasiState(0, *(al * y + be * z)))
    xs = np.linspace(0, 2, 200)
    for k in range(2):
        lhs = tw(xs)[k]
        rhs = al * ty(xs)[k] + be * tz(xs)[k]
        scale = 1 + np.max(np.abs(rhs))
        assert np.max(np.abs(lhs - rhs)) <= 10 * Tolerances().rel * scale


@pytest.mark.parametrize("coeffs, jumps", [(("1",), ((0.5, 10.0),)), (("1 + x^2", "x", "2"), ((0.3, -2.0), (1.2, 4.0)))])
def test_reversibility(coeffs, jumps):
    c = CoefficientSet.from_strings(*coeffs, jumps=jumps)
    fwd = solve_system(c, 3.0, (0, 2), QuasiState(0, 0.3, 1.0))
    u, u1 = fwd.ys[-1]
    back = solve_system(c, 3.0, (2, 0), QuasiState(2, u, u1))
    assert back.direction == "backward"
    tol = Tolerances()
    scale = 1 + abs(u) + abs(u1)
    assert abs(back.ys[-1, 0] - 0.3) <= 100 * tol.rel * scale
    assert abs(back.ys[-1, 1] - 1.0) <= 100 * tol.rel * scale


def test_continuity_across_all_jumps():
    c = CoefficientSet.from_strings("1", "x", "0", jumps=((0.2, 3.0), (0.4, -7.0), (0.8, 12.0)))
    traj = solve_system(c, 2.0, (0, 1), QuasiState(0, 1, 0))
    for x0 in (0.2, 0.4, 0.8):
        assert abs(traj.u1(x0, "right") - traj.u1(x0, "left")) <= 10 * Tolerances().abs
        assert abs(traj.u(x0, "right") - traj.u(x0, "left")) <= 10 * Tolerances().abs


def test_real_data_stays_real(delta):
    traj = solve_system(delta, 7.0, (0, 1), QuasiState(0, 0.2, 1.0))
    assert np.max(np.abs(traj.ys.imag)) <= Tolerances().abs


def test_inhomogeneous(free):
    # l[u] = -u'' = 1 with u(0) = u'(0) = 0: u = -x^2/2
    traj = solve_system(free, 0.0, (0, 1), QuasiState(0, 0, 0), f=1.0)
    assert traj.u(1.0) == pytest.approx(-0.5, abs=1e-12)
    assert traj.u1(1.0) == pytest.approx(-1.0, abs=1e-12)


def test_csv(delta):
    traj = solve_system(delta, 0.0, (0, 1), QuasiState(0, 0, 1))
    lines = traj.to_csv().splitlines()
    assert lines[0] == "x,re_u,im_u,re_u1,im_u1"
    assert len(lines) == traj.n_steps + 2
    assert lines[-1].startswith("1,3.5,")


def test_span_errors(free):
    traj = solve_system(free, 0.0, (0, 1), QuasiState(0, 0, 1))
    with pytest.raises(SpanError):
        traj(1.5)
    with pytest.raises(ValueError):
        solve_system(free, 0.0, (0, 1), QuasiState(0.5, 0, 1))
    with pytest.raises(ValueError):
        solve_system(free, 0.0, (0, math.inf), QuasiState(0, 0, 1))


def test_underflow_at_undeclared_zero_of_p():
    c = CoefficientSet.from_strings("x - 0.3")
    with pytest.raises(StepSizeUnderflow) as info:
        solve_system(c, 0.0, (0, 1), QuasiState(0, 0, 1))
    assert info.value.x == pytest.approx(0.3, abs=1e-6)


def test_max_steps(free):
    with pytest.raises(MaxStepsExceeded):
        solve_system(free, 1e4, (0, 10), QuasiState(0, 0, 1), tol=Tolerances(max_steps=20))


def test_consistency_with_quasi_derivative():
    # u' recovered from the first row equals the finite-difference derivative of u
    c = CoefficientSet.from_strings("2 + sin(x)", "cos(x)", "1", "0")
    traj = solve_system(c, 0.5, (0, 2), QuasiState(0, 1, 0.4))
    xs = np.linspace(0.1, 1.9, 50)
    h = 1e-5
    fd = (traj.u(xs + h) - traj.u(xs - h)) / (2 * h)
    np.testing.assert_allclose(traj.slope(xs), fd, atol=1e-7)
