"""Quadratic form of the preminimal operator, cutoff multiplication, Rayleigh probing.

For u with compact support and p, 1/p locally bounded,

    (L u, u) = int p |u'|^2 - int Q d|u|^2 + int s |u|^2 + int i r (u' conj(u) - u conj(u')),

where -int Q d|u|^2 is evaluated as -int Q (|u|^2)' dx. The last term vanishes
for real u or r = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coeffs import CoefficientSet
from .errors import HypothesisViolation, QuadratureError
from .expr import Expr, parse_expression
from .integrator import QuasiTrajectory
from .quadrature import integrate

_FD_REL = 1e-6


def _expr(e):
    return parse_expression(e) if isinstance(e, str) else e


@dataclass(frozen=True)
class TestFunction:
    """Smooth compactly supported surrogate for an element of the preminimal domain.

    ``u`` and ``du`` are the real parts (value and declared derivative);
    ``u_im``/``du_im`` optionally add an imaginary part. Outside ``support``
    the function is zero.
    """

    __test__ = False  # not a pytest class

    u: Expr
    du: Expr
    support: tuple
    u_im: Expr | None = None
    du_im: Expr | None = None

    def __post_init__(self):
        for name in ("u", "du", "u_im", "du_im"):
            val = getattr(self, name)
            if isinstance(val, str):
                object.__setattr__(self, name, parse_expression(val))
        if (self.u_im is None) != (self.du_im is None):
            raise ValueError("u_im and du_im must be given together")
        a, b = map(float, self.support)
        if not (math.isfinite(a) and math.isfinite(b) and a < b):
            raise ValueError("support must be a finite interval")
        object.__setattr__(self, "support", (a, b))
        ends = np.abs(self.value(np.array([a, b])))
        if np.any(ends > 1e-10):
            raise ValueError(f"test function does not vanish at the support ends ({ends.max():.3g})")
        xs = np.linspace(a, b, 102)[1:-1]
        h = 1e-5 * max(1.0, b - a)
        fd = (self.value(xs + h) - self.value(xs - h)) / (2 * h)
        du = self.derivative(xs)
        scale = max(1.0, float(np.max(np.abs(du))))
        if np.max(np.abs(fd - du)) > _FD_REL * scale:
            raise ValueError("declared derivative does not match finite differences of u")

    @property
    def is_complex(self):
        return self.u_im is not None

    def value(self, x):
        val = np.asarray(self.u(x), dtype=complex)
        if self.u_im is not None:
            val = val + 1j * self.u_im(x)
        return val

    def derivative(self, x):
        val = np.asarray(self.du(x), dtype=complex)
        if self.du_im is not None:
            val = val + 1j * self.du_im(x)
        return val

    @classmethod
    def sine(cls, k: int, a: float = 0.0, b: float = 1.0) -> "TestFunction":
        """sin(k*pi*(x-a)/(b-a)) on [a, b]."""
        w = b - a
        arg = f"{k}*pi*(x - {a!r})/{w!r}"
        return cls(f"sin({arg})", f"{k}*pi/{w!r}*cos({arg})", (a, b))


@dataclass(frozen=True)
class CutoffFamily:
    """Cutoff phi: 1 on ``plateau``, 0 outside ``support``, smoothstep ramps between.

    ``shape`` is "quintic" (C^2, |phi'| <= (15/8)/width) or "cubic" (C^1,
    |phi'| <= 1.5/width). Infinite plateau ends mean no ramp on that side.
    """

    plateau: tuple
    support: tuple
    shape: str = "quintic"
    n: int = 0

    def __post_init__(self):
        (s0, s1), (p0, p1) = self.support, self.plateau
        if not (s0 <= p0 < p1 <= s1):
            raise ValueError("plateau must lie inside support")
        if self.shape not in ("quintic", "cubic"):
            raise ValueError(f"unknown cutoff shape {self.shape!r}")

    @classmethod
    def standard(cls, n: int, ramp: float = 1.0, shape="quintic") -> "CutoffFamily":
        """phi_n: 1 on [-n, n], supported in [-n-ramp, n+ramp]."""
        return cls((-float(n), float(n)), (-n - ramp, n + ramp), shape, n)

    @classmethod
    def identity(cls) -> "CutoffFamily":
        return cls((-math.inf, math.inf), (-math.inf, math.inf))

    @property
    def ramps(self):
        (s0, s1), (p0, p1) = self.support, self.plateau
        out = []
        if math.isfinite(p0) and p0 > s0:
            out.append((s0, p0))
        if math.isfinite(p1) and s1 > p1:
            out.append((p1, s1))
        return out

    @property
    def K(self) -> float:
        widths = [b - a for a, b in self.ramps]
        if not widths:
            return 0.0
        peak = 15.0 / 8.0 if self.shape == "quintic" else 1.5
        return peak / min(widths)

    def _S(self, t, order):
        t = np.clip(t, 0.0, 1.0)
        if self.shape == "quintic":
            return (t ** 3 * (10 - 15 * t + 6 * t * t), 30 * t * t * (1 - t) ** 2, 60 * t * (1 - t) * (1 - 2 * t))[order]
        return (t * t * (3 - 2 * t), 6 * t * (1 - t), 6 - 12 * t)[order]

    def _eval(self, x, order):
        x = np.asarray(x, dtype=float)
        (s0, s1), (p0, p1) = self.support, self.plateau
        out = np.zeros(x.shape)
        if order == 0:
            out[(x >= p0) & (x <= p1)] = 1.0
        for k, (a, b) in enumerate(self.ramps):
            w = b - a
            inside = (x > a) & (x < b)
            left = math.isfinite(p0) and a == s0 and b == p0 and k == 0
            t = (x[inside] - a) / w if left else (b - x[inside]) / w
            sgn = 1.0 if left else -1.0
            out[inside] = self._S(t, order) * (sgn / w) ** order
        if order == 0:
            np.clip(out, 0.0, 1.0, out=out)
        return float(out) if out.ndim == 0 else out

    def __call__(self, x):
        return self._eval(x, 0)

    def derivative(self, x):
        return self._eval(x, 1)

    def second_derivative(self, x):
        return self._eval(x, 2)


# ----------------------------------------------------------------- form values

def _density(c, x, u, du):
    """Complex form density; its imaginary part is rounding noise for real coefficients."""
    p, Q, s, r = c.p(x), c.Q(x), c.s(x), c.r(x)
    ub, dub = np.conj(u), np.conj(du)
    return p * du * dub - Q * (du * ub + u * dub) + s * u * ub + 1j * r * (du * ub - u * dub)


def _check_p_bounded(c, a, b, n=2001):
    xs = np.unique(np.concatenate([np.linspace(a, b, n), c.breakpoints(a, b)]))
    pl, pr = c.p(xs, "left"), c.p(xs, "right")
    pv = np.concatenate([pl, pr])
    big = float(np.max(np.abs(pv)))
    if not np.all(np.isfinite(pv)) or np.min(np.abs(pv)) <= 1e-12 * max(big, 1.0):
        raise HypothesisViolation(f"p or 1/p is not bounded on [{a}, {b}] (sampled)")


def form_integral(c: CoefficientSet, u: TestFunction) -> complex:
    """Complex value of the form integral (imaginary part ~ 0)."""
    a, b = u.support
    _check_p_bounded(c, a, b)
    res = integrate(lambda x: _density(c, x, u.value(x), u.derivative(x)), a, b, c.breakpoints(a, b),
                    rel=1e-12, abs_tol=1e-14)
    if not res.converged:
        raise QuadratureError(f"form quadrature did not converge (error {res.error:.3g})")
    return complex(res.value)


def form_value(c: CoefficientSet, u: TestFunction) -> float:
    """(L u, u) for a compactly supported test function.

    Raises:
        HypothesisViolation: p or 1/p unbounded on the support (sampled).
        QuadratureError: integral did not converge.
    """
    return form_integral(c, u).real


def norm_squared(u: TestFunction) -> float:
    a, b = u.support
    res = integrate(lambda x: np.abs(u.value(x)) ** 2, a, b, rel=1e-12, abs_tol=1e-15)
    return float(np.real(res.value))


def _traj_points(c, w, a, b):
    pts = set(c.breakpoints(a, b))
    xs = getattr(w, "xs", ())
    pts |= {float(t) for t in xs if a < t < b}
    return sorted(pts)


def form_value_trajectory(c: CoefficientSet, w, a: float, b: float) -> complex:
    """Form integral over [a, b] for any (u, u[1]) path, with u' recovered from u[1]."""
    def f(x):
        u = w.u(x)
        return _density(c, x, u, w.slope(x))

    res = integrate(f, a, b, _traj_points(c, w, a, b), rel=1e-11, abs_tol=1e-14)
    if not res.converged:
        raise QuadratureError(f"form quadrature did not converge (error {res.error:.3g})")
    return complex(res.value)


def rayleigh_lower_bound_probe(c: CoefficientSet, family):
    """Smallest Rayleigh quotient (L u, u)/||u||^2 over a finite family.

    A finite family only estimates the bottom of the form from above; the
    result is evidence for a lower bound, not a certificate.

    Returns:
        (min_quotient, argmin)
    """
    family = list(family)
    if not family:
        raise ValueError("family must be nonempty")
    quotients = []
    for k, u in enumerate(family):
        nrm = norm_squared(u)
        if nrm <= 0.0:
            raise ValueError(f"family member {k} has zero norm")
        quotients.append(form_value(c, u) / nrm)
    k = int(np.argmin(quotients))
    return float(quotients[k]), k


# -------------------------------------------------------------------- cutoffs

class CutoffTrajectory(QuasiTrajectory):
    """phi*u with quasi-derivative p phi' u + phi u[1]."""

    def __init__(self, base: QuasiTrajectory, phi: CutoffFamily, coeffs: CoefficientSet):
        self.base = base
        self.phi = phi
        self.coeffs = coeffs
        self.lam = base.lam
        self.forcing = None
        self.direction = base.direction
        self._asc = base._asc
        self.xs = base.xs
        self.hs = base.hs
        self.ys = np.column_stack(self.evaluate(base.xs))

    def evaluate(self, x, side="right"):
        u, u1 = self.base.evaluate(x, side)
        ph, dph = self.phi(x), self.phi.derivative(x)
        p = self.coeffs.p(x, side)
        return ph * u, p * dph * u + ph * u1


def cutoff_multiply(c: CoefficientSet, phi: CutoffFamily, u: QuasiTrajectory) -> CutoffTrajectory:
    """Multiply a trajectory by a cutoff: (phi u, p phi' u + phi u[1]).

    Raises:
        HypothesisViolation: p <= 0 sampled where phi' != 0.
    """
    for a, b in phi.ramps:
        lo, hi = max(a, u.lo), min(b, u.hi)
        if lo < hi:
            xs = np.unique(np.concatenate([np.linspace(lo, hi, 1001), c.breakpoints(lo, hi)]))
            if np.any(c.p(xs, "left") <= 0) or np.any(c.p(xs, "right") <= 0):
                raise HypothesisViolation(f"p <= 0 on the cutoff ramp [{a}, {b}]")
    return CutoffTrajectory(u, phi, c)


def _ramp_integral(c, phi, v, density):
    total = 0j
    for a, b in phi.ramps:
        lo, hi = max(a, v.lo), min(b, v.hi)
        if lo < hi:
            res = integrate(density, lo, hi, _traj_points(c, v, lo, hi), rel=1e-11, abs_tol=1e-15)
            total += complex(res.value)
    return total


def cutoff_cross_term(c: CoefficientSet, phi: CutoffFamily, v) -> complex:
    """int p phi phi' (v conj(v)' - v' conj(v)) dx; its integrand is purely imaginary."""
    def f(x):
        u, du = v.u(x), v.slope(x)
        return c.p(x) * phi(x) * phi.derivative(x) * (u * np.conj(du) - du * np.conj(u))

    return _ramp_integral(c, phi, v, f)


def cutoff_cross_scale(c: CoefficientSet, phi: CutoffFamily, v) -> float:
    """int |p phi phi'| |v| |v'| dx, the natural size of :func:`cutoff_cross_term`."""
    def f(x):
        return np.abs(c.p(x) * phi(x) * phi.derivative(x)) * np.abs(v.u(x)) * np.abs(v.slope(x))

    return _ramp_integral(c, phi, v, f).real


def cutoff_energy_identity(c: CoefficientSet, phi: CutoffFamily, v):
    """Both sides of the energy identity for phi*v when l[v] = lam*v (r = 0).

    lhs = (L phi v, phi v) as a form integral;
    rhs = int p phi'^2 |v|^2 + lam int phi^2 |v|^2 + int p phi phi' (v conj(v)' - v' conj(v)).
    """
    w = cutoff_multiply(c, phi, v)
    a, b = max(phi.support[0], v.lo), min(phi.support[1], v.hi)
    lhs = form_value_trajectory(c, w, a, b)

    def g(x):
        u = v.u(x)
        return (c.p(x) * phi.derivative(x) ** 2 + v.lam * phi(x) ** 2) * np.abs(u) ** 2

    res = integrate(g, a, b, _traj_points(c, v, a, b), rel=1e-11, abs_tol=1e-15)
    rhs = complex(res.value) + cutoff_cross_term(c, phi, v)
    return lhs, rhs
