"""Adaptive integration of the quasi-derivative system

    (u, u[1])' = A(x) (u, u[1]) + (0, -f(x))

between breakpoints. Every breakpoint of a coefficient (and every jump of Q)
ends a step exactly and the state (u, u[1]) is carried across it unchanged,
which is what makes delta-type potentials harmless here.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .coeffs import CoefficientSet, Piece, PiecewiseFn
from .errors import DegeneratePointError, MaxStepsExceeded, SpanError, StepSizeUnderflow
from .expr import Expr, evaluate_checked
from .shinzettl import piece_entries

_SAFE = 0.9
_BETA = 0.04
_EXPO1 = 0.2 - 0.75 * _BETA
_FAC_MIN = 0.1  # h may grow by at most 10x
_FAC_MAX = 5.0  # and shrink by at most 5x per step


@dataclass(frozen=True)
class Tolerances:
    rel: float = 1e-10
    abs: float = 1e-12
    max_steps: int = 1_000_000

    def __post_init__(self):
        if not (self.rel > 0 and self.abs > 0):
            raise ValueError("tolerances must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")

    def scaled(self, factor: float) -> "Tolerances":
        return Tolerances(self.rel * factor, self.abs * factor, self.max_steps)


@dataclass(frozen=True)
class QuasiState:
    x: float
    u: complex
    u1: complex


class QuasiTrajectory:
    """Solution path (x, u, u[1]) with Dormand-Prince dense output.

    Samples are stored in integration order; ``direction`` is "forward" when
    the path runs toward larger x.
    """

    def __init__(self, xs, ys, hs, rcont, lam, coeffs, forcing=None):
        self.xs = np.asarray(xs, dtype=float)
        self.ys = np.asarray(ys, dtype=complex)
        self.hs = np.asarray(hs, dtype=float)
        self.rcont = np.asarray(rcont, dtype=complex)
        self.lam = float(lam)
        self.coeffs = coeffs
        self.forcing = forcing
        self.direction = "forward" if self.xs[-1] >= self.xs[0] else "backward"
        if self.direction == "forward":
            self._asc = self.xs
        else:
            self._asc = self.xs[::-1]

    @property
    def span(self):
        return float(self.xs[0]), float(self.xs[-1])

    @property
    def lo(self):
        return float(self._asc[0])

    @property
    def hi(self):
        return float(self._asc[-1])

    @property
    def n_steps(self):
        return self.hs.size

    @cached_property
    def states(self):
        return [QuasiState(float(x), complex(y[0]), complex(y[1])) for x, y in zip(self.xs, self.ys)]

    def _check(self, xa):
        slack = 1e-12 * (1.0 + abs(self.lo) + abs(self.hi))
        if np.any(xa < self.lo - slack) or np.any(xa > self.hi + slack):
            raise SpanError(f"evaluation point outside trajectory span [{self.lo}, {self.hi}]")

    def evaluate(self, x, side="right"):
        """Return (u, u1) at `x` from the dense output.

        At a step boundary ``side`` selects the step to the right or left of
        `x`; both agree up to rounding since the state is continuous.
        """
        xa = np.asarray(x, dtype=float)
        self._check(xa)
        n = self.hs.size
        if n == 0:
            u = np.full(xa.shape, self.ys[0, 0])
            v = np.full(xa.shape, self.ys[0, 1])
            return (complex(u), complex(v)) if xa.ndim == 0 else (u, v)
        j = np.searchsorted(self._asc, xa, side="right" if side == "right" else "left") - 1
        j = np.clip(j, 0, n - 1)
        i = j if self.direction == "forward" else n - 1 - j
        theta = (xa - self.xs[i]) / self.hs[i]
        t1 = 1.0 - theta
        rc = self.rcont[i]
        th = theta[..., None]
        t1 = t1[..., None]
        y = rc[..., 0, :] + th * (rc[..., 1, :] + t1 * (rc[..., 2, :] + th * (rc[..., 3, :] + t1 * rc[..., 4, :])))
        if xa.ndim == 0:
            return complex(y[0]), complex(y[1])
        return y[..., 0], y[..., 1]

    def __call__(self, x, side="right"):
        return self.evaluate(x, side)

    def u(self, x, side="right"):
        return self.evaluate(x, side)[0]

    def u1(self, x, side="right"):
        return self.evaluate(x, side)[1]

    def slope(self, x, side="right"):
        """Classical derivative u' = (u[1] + (Q + i r) u) / p, one-sided at jumps."""
        u, u1 = self.evaluate(x, side)
        c = self.coeffs
        return (u1 + (c.Q(x, side) + 1j * c.r(x, side)) * u) / c.p(x, side)

    def to_csv(self, out=None, fmt="{:.12g}"):
        """Write ``x,re_u,im_u,re_u1,im_u1`` rows; returns the text when `out` is None."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "re_u", "im_u", "re_u1", "im_u1"])
        for x, (u, u1) in zip(self.xs, self.ys):
            w.writerow([fmt.format(v) for v in (x, u.real, u.imag, u1.real, u1.imag)])
        text = buf.getvalue()
        if out is None:
            return text
        if hasattr(out, "write"):
            out.write(text)
        else:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(text)
        return text


def _as_forcing(f):
    if f is None:
        return None
    if isinstance(f, PiecewiseFn):
        return f
    if isinstance(f, Expr):
        return PiecewiseFn((), (f,))
    if isinstance(f, str):
        return PiecewiseFn.from_expr(f)
    return PiecewiseFn.constant(float(f))


class _PieceSystem:
    """Stage-matrix assembly for one breakpoint-free piece."""

    def __init__(self, piece: Piece, lam: float, forcing: Expr | None):
        self.piece = piece
        self.lam = lam
        self.forcing = forcing
        self.constant = all(e.is_constant for e in (piece.p, piece.q_ac, piece.s, piece.r)) and (
            forcing is None or forcing.is_constant
        )
        self._const = None
        if self.constant:
            mid = np.array([0.5 * (piece.lo + piece.hi)])
            self._const = self._assemble(mid)

    def _assemble(self, nodes):
        a11, a12, a21, a22 = piece_entries(self.piece, nodes, self.lam)
        a = np.empty((nodes.size, 2, 2), dtype=np.complex128)
        a[:, 0, 0], a[:, 0, 1], a[:, 1, 0], a[:, 1, 1] = a11, a12, a21, a22
        g = np.zeros((nodes.size, 2), dtype=np.complex128)
        if self.forcing is not None:
            g[:, 1] = -evaluate_checked(self.forcing, nodes)
        return a, g

    def stages(self, nodes):
        if self._const is not None:
            a, g = self._const
            n = nodes.size
            return np.broadcast_to(a, (n, 2, 2)), np.broadcast_to(g, (n, 2))
        try:
            return self._assemble(nodes)
        except DegeneratePointError as exc:
            # p may vanish at a declared breakpoint; step off it by a hair
            lo, hi = self.piece.lo, self.piece.hi
            if exc.x not in (lo, hi):
                raise
            eps = 1e-12 * max(1.0, abs(lo), abs(hi))
            nudged = np.clip(nodes, lo + eps, hi - eps)
            return self._assemble(nudged)

    def rhs(self, x, y):
        a, g = self.stages(np.array([x]))
        return a[0] @ y + g[0]


def _norm(v, sk):
    return math.sqrt(float(np.mean((np.abs(v) / sk) ** 2)))


def _initial_step(system, x0, y0, span_len, direction, tol):
    sk = tol.abs + tol.rel * np.abs(y0)
    f0 = system.rhs(x0, y0)
    dnf = _norm(f0, sk) ** 2
    dny = _norm(y0, sk) ** 2
    h = 1e-6 if (dnf <= 1e-10 or dny <= 1e-10) else 0.01 * math.sqrt(dny / dnf)
    h = min(h, span_len)
    f1 = system.rhs(x0 + direction * h, y0 + direction * h * f0)
    der2 = _norm(f1 - f0, sk) / h
    der12 = max(der2, math.sqrt(dnf))
    h1 = max(1e-6, 1e-3 * h) if der12 <= 1e-15 else (0.01 / der12) ** 0.2
    return min(100 * h, h1, span_len)


def solve_system(c: CoefficientSet, lam: float, span, y0: QuasiState, f=None, tol: Tolerances = Tolerances()):
    """Integrate l[u] = lam*u + f as a first-order system over `span`.

    `span` = (start, end) may run backward. Steps stop exactly at every
    breakpoint of the coefficients and of `f`.

    Raises:
        StepSizeUnderflow: near a non-integrable singularity of 1/p.
        MaxStepsExceeded: more than ``tol.max_steps`` steps.
        DegeneratePointError: p vanishes at a stage node.
    """
    x_start, x_end = float(span[0]), float(span[1])
    if not (math.isfinite(x_start) and math.isfinite(x_end)):
        raise ValueError("span must be finite")
    if y0.x != x_start:
        raise ValueError(f"initial state at x = {y0.x} but span starts at {x_start}")
    forcing = _as_forcing(f)
    y = np.array([y0.u, y0.u1], dtype=np.complex128)
    xs, ys, hs, rcs = [x_start], [y.copy()], [], []
    if x_start == x_end:
        return QuasiTrajectory(xs, ys, np.zeros(0), np.zeros((0, 5, 2)), lam, c, forcing)

    direction = 1.0 if x_end > x_start else -1.0
    extra = forcing.breakpoints if forcing is not None else ()
    pieces = c.pieces(x_start, x_end, extra)
    if direction < 0:
        pieces = pieces[::-1]

    steps = 0
    h = None
    facold = 1e-4
    for piece in pieces:
        seg_f = forcing.segment_at(0.5 * (piece.lo + piece.hi)) if forcing is not None else None
        if seg_f is not None and seg_f.is_constant and seg_f.compiled.constant == 0.0:
            seg_f = None
        system = _PieceSystem(piece, lam, seg_f)
        start, end = (piece.lo, piece.hi) if direction > 0 else (piece.hi, piece.lo)
        seg_len = abs(end - start)
        if h is None:
            h = _initial_step(system, start, y, seg_len, direction, tol)
        h = min(h, seg_len)
        x = start
        rejected = False
        while True:
            remaining = abs(end - x)
            if remaining <= 0.0:
                break
            last = False
            if h >= 0.999 * remaining:
                h, last = remaining, True
            hmin = 1e-14 * max(1.0, abs(x))
            if h < hmin:
                raise StepSizeUnderflow(f"step size underflow at x = {x!r}", x=x)
            if steps >= tol.max_steps:
                raise MaxStepsExceeded(f"more than {tol.max_steps} steps (reached x = {x!r})", x=x)
            hd = direction * h
            nodes = x + kernels.C * hd
            if last:
                nodes[5] = nodes[6] = end
            a, g = system.stages(nodes)
            y_new, err, rc = kernels.dopri_step(a, g, y, hd, tol.rel, tol.abs)
            steps += 1
            if not np.isfinite(err):
                h *= 0.2
                rejected = True
                continue
            fac11 = err ** _EXPO1
            if err <= 1.0:
                fac = fac11 / facold ** _BETA
                fac = max(_FAC_MIN, min(_FAC_MAX, fac / _SAFE))
                facold = max(err, 1e-4)
                x = end if last else x + hd
                y = y_new
                xs.append(x)
                ys.append(y.copy())
                hs.append(hd)
                rcs.append(rc)
                h_next = h / fac
                if rejected:
                    h_next = min(h_next, h)
                rejected = False
                if last:
                    h = h_next
                    break
                h = h_next
            else:
                h = h / min(_FAC_MAX, fac11 / _SAFE)
                rejected = True
    return QuasiTrajectory(xs, np.array(ys), np.array(hs), np.array(rcs), lam, c, forcing)


def fundamental_pair(c: CoefficientSet, lam: float, span, tol: Tolerances = Tolerances()):
    """Solutions theta, phi with quasi-initial data (1, 0) and (0, 1) at span[0]."""
    a = float(span[0])
    theta = solve_system(c, lam, span, QuasiState(a, 1.0, 0.0), None, tol)
    phi = solve_system(c, lam, span, QuasiState(a, 0.0, 1.0), None, tol)
    return theta, phi

