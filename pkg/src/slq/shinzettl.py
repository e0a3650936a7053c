"""Shin-Zettl matrix and quasi-derivatives.

For real coefficients the system (u, u[1])' = A(x) (u, u[1]) with

    A = [[ (Q + i r)/p,              1/p          ],
         [ -(Q^2 + r^2)/p + s - lam, -(Q - i r)/p ]]

encodes l[u] = lam*u, where u[1] = p u' - (Q + i r) u is the quasi-derivative.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coeffs import CoefficientSet, Piece
from .errors import DegeneratePointError, DomainError
from .expr import Expr


def _entries(p, Q, s, r, lam):
    p = np.asarray(p, dtype=float)
    bad = (p == 0) | ~np.isfinite(p)
    if np.any(bad):
        raise DegeneratePointError(None)
    inv = 1.0 / p
    a11 = (Q + 1j * r) * inv
    a12 = inv + 0j
    a21 = -(Q * Q + r * r) * inv + s - lam + 0j
    a22 = -(Q - 1j * r) * inv
    return a11, a12, a21, a22


def piece_entries(piece: Piece, xs, lam=0.0):
    """Matrix entries on one breakpoint-free piece, evaluated at the array `xs`.

    The piece's own expressions are used even at its end points, which gives
    the one-sided values there.
    """
    xs = np.asarray(xs, dtype=float)
    p = piece.p(xs)
    Q = piece.q_ac(xs) + piece.q_jump
    s = piece.s(xs)
    r = piece.r(xs)
    for name, val in (("p", p), ("Q", Q), ("s", s), ("r", r)):
        if not np.all(np.isfinite(val)):
            i = int(np.flatnonzero(~np.isfinite(np.atleast_1d(val)))[0])
            x_bad = float(np.atleast_1d(xs)[i])
            raise DomainError(f"coefficient {name} is not finite at x = {x_bad!r}", x=x_bad)
    try:
        return _entries(p, Q, s, r, lam)
    except DegeneratePointError:
        x_bad = float(np.atleast_1d(xs)[np.flatnonzero(np.atleast_1d(p) == 0)[0]])
        raise DegeneratePointError(x_bad) from None


@dataclass(frozen=True)
class ShinZettlMatrix:
    coeffs: CoefficientSet
    lam: float = 0.0

    def at(self, x: float, side="right") -> np.ndarray:
        """Matrix at `x`; at a breakpoint or jump, the one-sided limit from `side`."""
        c = self.coeffs
        p = c.p(x, side)
        if p == 0:
            raise DegeneratePointError(x)
        Q = c.Q(x, side)
        a11, a12, a21, a22 = _entries(p, Q, c.s(x, side), c.r(x, side), self.lam)
        return np.array([[a11, a12], [a21, a22]], dtype=complex)


def matrix_at(A: ShinZettlMatrix, x: float, side="right") -> np.ndarray:
    """2x2 complex Shin-Zettl matrix at `x`.

    Raises:
        DegeneratePointError: p(x) = 0.
    """
    return A.at(x, side)


def quasi_derivative_1(c: CoefficientSet, u, du, x):
    """u[1] = p u' - (Q + i r) u at `x`."""
    return c.p(x) * du - (c.Q(x) + 1j * c.r(x)) * u


def fd_step(x):
    return np.maximum(1e-5, 1e-5 * np.abs(x))


def apply_l_smooth(c: CoefficientSet, u: Expr, x, h=None):
    """l[u](x) = -u[2](x) by central differences along the quasi-derivative chain.

    Only meaningful where the coefficients are smooth; a cross-check for the
    distributional definition, not a replacement for it. Works on scalars and
    arrays of `x`.

    Raises:
        ValueError: a breakpoint or jump lies within two steps of `x`.
    """
    xa = np.asarray(x, dtype=float)
    h = fd_step(xa) if h is None else np.asarray(h, dtype=float)
    bps = np.array(c.breakpoints())
    if bps.size:
        dist = np.min(np.abs(xa[..., None] - bps), axis=-1)
        if np.any(dist <= 2 * h):
            raise ValueError("x is within the finite-difference stencil of a breakpoint")

    def quasi1(t):
        du = (u(t + h) - u(t - h)) / (2 * h)
        return c.p(t) * du - (c.Q(t) + 1j * c.r(t)) * u(t)

    du1 = (quasi1(xa + h) - quasi1(xa - h)) / (2 * h)
    p, Q, s, r = c.p(xa), c.Q(xa), c.s(xa), c.r(xa)
    u1 = quasi1(xa)
    u2 = du1 + (Q - 1j * r) / p * u1 + ((Q * Q + r * r) / p - s) * u(xa)
    out = -u2
    return complex(out) if np.ndim(out) == 0 else out
