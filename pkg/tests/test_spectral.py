import math
import warnings

import numpy as np
import pytest

from slq.coeffs import CoefficientSet
from slq.errors import EigenSearchError
from slq.integrator import Tolerances
from slq.spectral import (
    ComplexShootWarning,
    default_scan,
    dependence_defect,
    dirichlet_shoot,
    eigenvalues_on_interval,
    scan_shoot,
)

from _helpers import delta_oracle


@pytest.mark.parametrize("lam, expected", [(math.pi ** 2, 0.0), (0.0, 1.0), (-1.0, math.sinh(1.0))])
def test_shoot(free, lam, expected):
    assert dirichlet_shoot(free, lam, (0, 1)) == pytest.approx(expected, abs=1e-8)


def test_shoot_complex_warns():
    c = CoefficientSet.from_strings("1", "0", "0", "1")
    with pytest.warns(ComplexShootWarning):
        dirichlet_shoot(c, 1.0, (0, 1))


def test_scan_matches_closed_form(free):
    lams = np.linspace(-20, 200, 57)
    vals = scan_shoot(free, (0, 1), lams).real
    k = np.sqrt(np.abs(lams))
    exact = np.where(lams > 0, np.sin(k) / np.where(k == 0, 1, k), np.sinh(k) / np.where(k == 0, 1, k))
    np.testing.assert_allclose(vals, exact, atol=1e-6)


def test_default_scan():
    assert default_scan((0, 1), 3) == (-50.0, 450.0, 500.0 / 1200)


def test_free(free):
    res = eigenvalues_on_interval(free, (0, 1), 3)
    np.testing.assert_allclose(res.lams, [(k * math.pi) ** 2 for k in (1, 2, 3)], rtol=1e-7)
    assert res.k_range == [1, 2, 3]
    for lam, (lo, hi) in zip(res.lams, res.brackets):
        assert lo <= lam <= hi and hi - lo <= 1e-10 * (1 + abs(lam))
    assert all(r <= 1e-9 for r in res.residuals)


def test_scaled(free):
    c = CoefficientSet.from_strings("4")
    assert eigenvalues_on_interval(c, (0, 1), 1).lams[0] == pytest.approx(4 * math.pi ** 2, rel=1e-7)


def test_shifted_interval():
    c = CoefficientSet.from_strings("1", "0", "3")
    res = eigenvalues_on_interval(c, (2, 4), 2)
    np.testing.assert_allclose(res.lams, [(k * math.pi / 2) ** 2 + 3 for k in (1, 2)], rtol=1e-8)


def test_delta(delta):
    lam = eigenvalues_on_interval(delta, (0, 1), 1).lams[0]
    assert lam == pytest.approx(delta_oracle(), rel=1e-6)


def test_delta_monotone_in_height(free, delta):
    base = eigenvalues_on_interval(free, (0, 1), 1).lams[0]
    assert eigenvalues_on_interval(delta, (0, 1), 1).lams[0] >= base


def test_eigenfunction_dependence(delta):
    lam = eigenvalues_on_interval(delta, (0, 1), 1).lams[0]
    assert dependence_defect(delta, lam, (0, 1)) <= 1e-6
    assert dependence_defect(delta, lam + 1.0, (0, 1)) > 1e-3


def test_mesh_independence():
    c = CoefficientSet.from_strings("1 + x^2", "sin(3*x)", "x", jumps=((0.3, 2.0),))
    coarse = eigenvalues_on_interval(c, (0, 1), 3)
    fine = eigenvalues_on_interval(c, (0, 1), 3, tol=Tolerances(5e-11, 5e-13))
    for a, b, (lo, hi) in zip(coarse.lams, fine.lams, coarse.brackets):
        assert abs(a - b) <= max(hi - lo, 1e-9 * abs(a))


def test_too_few(free):
    with pytest.raises(EigenSearchError) as info:
        eigenvalues_on_interval(free, (0, 1), 3, scan=(0, 50, 0.5))
    assert info.value.found == 2


def test_csv(free):
    lines = eigenvalues_on_interval(free, (0, 1), 2).to_csv().splitlines()
    assert lines[0] == "k,lambda,residual,bracket_lo,bracket_hi"
    assert lines[1].startswith("1,9.86960440")


def test_complex_experimental():
    # constant r is a gauge term: r = 1, Q = 0 shifts every eigenvalue by -1
    c = CoefficientSet.from_strings("1", "0", "0", "1")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        res = eigenvalues_on_interval(c, (0, 1), 2)
    assert res.experimental
    np.testing.assert_allclose(res.lams, [math.pi ** 2 - 1, 4 * math.pi ** 2 - 1], rtol=1e-6)


@pytest.mark.parametrize("kw", [dict(count=0), dict(span=(1, 0)), dict(scan=(5, 1, 0.1))])
def test_bad_arguments(free, kw):
    args = dict(span=(0, 1), count=1)
    args.update(kw)
    with pytest.raises(ValueError):
        eigenvalues_on_interval(free, **args)
