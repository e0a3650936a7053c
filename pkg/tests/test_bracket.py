import math

import numpy as np
import pytest

from slq.bracket import bracket_at, bracket_tail_limit, bracket_values, lagrange_residual
from slq.coeffs import CoefficientSet
from slq.errors import SpanError
from slq.integrator import QuasiState, fundamental_pair, solve_system


def test_free_pair(free):
    th, ph = fundamental_pair(free, 0.0, (0, 1))
    b = bracket_at(th, ph, 0.3)
    assert b.t == 0.3 and b.value == pytest.approx(1.0, abs=1e-14)


def test_wronskian_cos_sin(free):
    th, ph = fundamental_pair(free, 1.0, (0, 5))
    vals = bracket_values(th, ph, np.linspace(0, 5, 101))
    np.testing.assert_allclose(vals, 1.0, atol=1e-8)


def test_self_bracket_real(delta):
    u = solve_system(delta, 3.0, (0, 1), QuasiState(0, 0.4, 1.0))
    assert bracket_at(u, u, 0.77).value == 0.0


def test_self_bracket_complex_is_imaginary():
    c = CoefficientSet.from_strings("1 + x^2", "x", "1", "0")
    u = solve_system(c, 2.0, (0, 1), QuasiState(0, 1 + 1j, 0.5 - 2j))
    val = bracket_at(u, u, 0.6).value
    assert val.real == pytest.approx(0.0, abs=1e-15)


def test_antisymmetry_and_sesquilinearity(rng):
    c = CoefficientSet.from_strings("2 + cos(x)", "sin(x)", "x", "0.3")
    u = solve_system(c, 1.0, (0, 1), QuasiState(0, 1 + 0.2j, -1j))
    v = solve_system(c, 1.0, (0, 1), QuasiState(0, 0.5, 2 + 1j))
    w = solve_system(c, 1.0, (0, 1), QuasiState(0, -1j, 0.3))
    for t in rng.uniform(0, 1, 20):
        uv, vu = bracket_at(u, v, t).value, bracket_at(v, u, t).value
        assert abs(uv + np.conj(vu)) <= 1e-12 * (1 + abs(uv))
    a, b, t = 0.3 - 2j, 1.1 + 0.5j, 0.45
    # [a u + b w, v] at fixed t from the pointwise formula
    uu, uu1 = u(t)
    ww, ww1 = w(t)
    vv, vv1 = v(t)
    lhs = (a * uu + b * ww) * np.conj(vv1) - (a * uu1 + b * ww1) * np.conj(vv)
    rhs = a * bracket_at(u, v, t).value + b * bracket_at(w, v, t).value
    assert lhs == pytest.approx(rhs, rel=1e-13)


def test_bracket_outside_span(free):
    th, ph = fundamental_pair(free, 0.0, (0, 1))
    with pytest.raises(SpanError):
        bracket_at(th, ph, 1.5)


def test_constancy_for_solution_pairs():
    c = CoefficientSet.from_strings("1 + x^2", "cos(2*x)", "x", "0", jumps=((0.4, 3.0),))
    u = solve_system(c, 4.0, (0, 1), QuasiState(0, 1, 0.5))
    v = solve_system(c, 4.0, (0, 1), QuasiState(0, -0.2, 1))
    ts = np.linspace(0, 1, 1000)
    vals = bracket_values(u, v, ts)
    b0 = vals[0]
    assert np.max(np.abs(vals - b0)) <= 1e-7 * (1 + abs(b0))


def test_lagrange_homogeneous(delta):
    u = solve_system(delta, 0.0, (0, 1), QuasiState(0, 1, 0))
    v = solve_system(delta, 0.0, (0, 1), QuasiState(0, 0, 1))
    res = lagrange_residual(delta, u, None, v, None, 0, 1)
    assert res <= 1e-8


def test_lagrange_inhomogeneous(free):
    # l[u] = 1, v = theta = 1: int 1 dx = [u, v]_0^1 = -u1(1) + u1(0) = 1
    u = solve_system(free, 0.0, (0, 1), QuasiState(0, 0, 0), f=1.0)
    th, _ = fundamental_pair(free, 0.0, (0, 1))
    assert lagrange_residual(free, u, 1.0, th, None, 0, 1) <= 1e-7


def test_lagrange_with_lambda(delta):
    u = solve_system(delta, 5.0, (0, 1), QuasiState(0, 1, 0.3), f="sin(x)")
    v = solve_system(delta, -2.0, (0, 1), QuasiState(0, 0, 1))
    assert lagrange_residual(delta, u, "sin(x)", v, None, 0.1, 0.9) <= 1e-8


def test_lagrange_self_real(delta):
    u = solve_system(delta, 2.0, (0, 1), QuasiState(0, 0.5, 1))
    assert lagrange_residual(delta, u, None, u, None, 0, 1) <= 1e-10


def test_lagrange_span(free):
    th, ph = fundamental_pair(free, 0.0, (0, 1))
    with pytest.raises(SpanError):
        lagrange_residual(free, th, None, ph, None, 0, 2)


class TestTail:
    def test_self_real(self):
        c = CoefficientSet.from_strings("1", "0", "1")
        u = solve_system(c, 0.0, (0, 20), QuasiState(0, 1, -1))
        est, ok = bracket_tail_limit(u, u, "+", [5, 10, 15, 20])
        assert est == 0 and ok

    def test_free_constant(self, free):
        th, ph = fundamental_pair(free, 0.0, (0, 100))
        est, ok = bracket_tail_limit(th, ph, "+", [12.5, 25, 50, 100])
        assert est == pytest.approx(1.0, abs=1e-10) and ok

    def test_negative_side(self, free):
        th, ph = fundamental_pair(free, 2.0, (0, -40))
        est, ok = bracket_tail_limit(th, ph, "-", [-5, -10, -20, -40])
        assert est == pytest.approx(1.0, abs=1e-8) and ok

    def test_not_converged(self):
        # bracket of solutions at different lam changes with t
        c = CoefficientSet.from_strings("1")
        u = solve_system(c, 1.0, (0, 40), QuasiState(0, 0, 1))
        v = solve_system(c, 4.0, (0, 40), QuasiState(0, 0, 1))
        _, ok = bracket_tail_limit(u, v, "+", [5, 10, 20, 40])
        assert not ok

    def test_bad_direction(self, free):
        th, ph = fundamental_pair(free, 0.0, (0, 1))
        with pytest.raises(ValueError):
            bracket_tail_limit(th, ph, "up", [0.5])
        with pytest.raises(ValueError):
            bracket_tail_limit(th, ph, "-", [0.5])

    def test_single_window(self, free):
        th, ph = fundamental_pair(free, 0.0, (0, 1))
        assert bracket_tail_limit(th, ph, "+", [1.0]) == (1.0, False)
