"""Lagrange bracket [u, v](t) = u conj(v[1]) - u[1] conj(v) and the Lagrange identity."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coeffs import CoefficientSet, PiecewiseFn
from .errors import QuadratureError, SpanError
from .expr import Expr
from .integrator import _as_forcing
from .quadrature import integrate


@dataclass(frozen=True)
class BracketValue:
    t: float
    value: complex


def bracket_values(u, v, t):
    """Vectorised bracket at the points `t` (no wrapping)."""
    uu, uu1 = u.evaluate(t)
    vv, vv1 = v.evaluate(t)
    return uu * np.conj(vv1) - uu1 * np.conj(vv)


def bracket_at(u, v, t: float) -> BracketValue:
    """[u, v](t) from the dense output of both trajectories.

    Raises:
        SpanError: `t` lies outside either trajectory.
    """
    return BracketValue(float(t), complex(bracket_values(u, v, float(t))))


def _forcing_values(f, t):
    if f is None:
        return np.zeros(np.shape(t))
    if callable(f) and not isinstance(f, (PiecewiseFn, Expr)):
        return np.asarray(f(t))
    return _as_forcing(f)(t)


def l_values(traj, f, t):
    """l[u] at `t` for a trajectory solving l[u] = lam*u + f."""
    u = traj.u(t)
    return traj.lam * u + _forcing_values(f if f is not None else traj.forcing, t)


def lagrange_residual(c: CoefficientSet, u, fu, v, fv, a: float, b: float, rel=1e-11) -> float:
    """| int_a^b l[u] conj(v) - int_a^b u conj(l[v]) - [u, v]_a^b |.

    `fu`, `fv` are the inhomogeneities that produced `u` and `v` (None for
    homogeneous solutions); the spectral parameter stored on each trajectory
    is added, so l[u] = u.lam*u + fu.

    Raises:
        QuadratureError: the integral does not converge.
    """
    for traj in (u, v):
        if min(a, b) < traj.lo - 1e-12 or max(a, b) > traj.hi + 1e-12:
            raise SpanError("[a, b] is not inside both trajectories")

    def integrand(t):
        lu = l_values(u, fu, t)
        lv = l_values(v, fv, t)
        return lu * np.conj(v.u(t)) - u.u(t) * np.conj(lv)

    pts = set(c.breakpoints(min(a, b), max(a, b)))
    for f in (fu, fv):
        if f is not None and (isinstance(f, (PiecewiseFn, Expr)) or not callable(f)):
            pts |= set(_as_forcing(f).breakpoints)
    ba, bb = bracket_at(u, v, a).value, bracket_at(u, v, b).value
    # the integrand cancels exactly for equal real lam; rounding sets the floor
    floor = 1e-13 * (1.0 + abs(ba) + abs(bb))
    res = integrate(integrand, a, b, sorted(pts), rel=rel, abs_tol=floor)
    if not res.converged:
        raise QuadratureError(f"Lagrange integral did not converge (error {res.error:.3g})")
    jump = bb - ba
    return float(abs(res.value - jump))


def bracket_tail_limit(u, v, direction: str, windows):
    """Estimate lim [u, v](t) as t -> +inf or -inf from a list of window points.

    The bracket is evaluated at the windows ordered by increasing |t|. The
    estimate is flagged converged when successive differences do not grow
    (up to the threshold) and the last one is below 1e-6 * (1 + |estimate|).
    This is evidence about the tail, never proof.
    """
    if direction not in ("+", "-"):
        raise ValueError("direction must be '+' or '-'")
    ts = sorted((float(t) for t in windows), key=abs)
    if direction == "+" and any(t < 0 for t in ts) or direction == "-" and any(t > 0 for t in ts):
        raise ValueError("window points must lie on the requested side")
    vals = np.array([bracket_at(u, v, t).value for t in ts])
    estimate = complex(vals[-1])
    if vals.size < 2:
        return estimate, False
    thr = 1e-6 * (1.0 + abs(estimate))
    diffs = np.abs(np.diff(vals))
    monotone = bool(np.all(diffs[1:] <= diffs[:-1] + thr))
    return estimate, bool(monotone and diffs[-1] <= thr)
