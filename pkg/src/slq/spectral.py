"""Dirichlet eigenvalues u(alpha) = u(beta) = 0 on a finite interval by shooting.

A coarse fixed-mesh RK4 pass evaluates u(beta; lam) on the whole scan grid at
once (one vectorised/compiled sweep), sign changes give brackets, and each
bracket is refined with the adaptive integrator.
"""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .coeffs import CoefficientSet
from .errors import EigenSearchError
from .integrator import QuasiState, Tolerances, solve_system
from .shinzettl import piece_entries

_GOLD = (math.sqrt(5.0) - 1.0) / 2.0
_MAX_SCAN_STEPS = 200_000


class ComplexShootWarning(UserWarning):
    """u(beta; lam) is complex (r != 0); only its real part was returned."""


@dataclass
class EigenResult:
    lams: list
    residuals: list
    brackets: list
    k_range: list
    experimental: bool = False
    notes: list = field(default_factory=list)

    def __len__(self):
        return len(self.lams)

    def to_csv(self, fmt="{:.12g}"):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "lambda", "residual", "bracket_lo", "bracket_hi"])
        for k, lam, res, (lo, hi) in zip(self.k_range, self.lams, self.residuals, self.brackets):
            w.writerow([str(k), *(fmt.format(v) for v in (lam, res, lo, hi))])
        return buf.getvalue()

    def to_text(self, fmt="{:.12g}"):
        lines = [f"k={k} lambda={fmt.format(lam)} residual={fmt.format(res)}"
                 for k, lam, res in zip(self.k_range, self.lams, self.residuals)]
        if self.experimental:
            lines.append("note: complex shooting function, minima of |u(beta)|^2 (experimental)")
        return "\n".join(lines) + "\n"


def _shoot_complex(c, lam, span, tol):
    a, b = map(float, span)
    traj = solve_system(c, lam, (a, b), QuasiState(a, 0.0, 1.0), None, tol)
    return complex(traj.ys[-1, 0])


def dirichlet_shoot(c: CoefficientSet, lam: float, span, tol: Tolerances = Tolerances()) -> float:
    """u(beta; lam) for the solution with (u, u[1]) = (0, 1) at alpha.

    For r != 0 the value is complex; its real part is returned and a
    :class:`ComplexShootWarning` is emitted.
    """
    val = _shoot_complex(c, lam, span, tol)
    if not c.real_r_zero:
        warnings.warn("r != 0: returning the real part of u(beta)", ComplexShootWarning, stacklevel=2)
    return float(val.real)


# ---------------------------------------------------------------- coarse scan

def _scan_mesh(c, span, lam_abs_max):
    """RK4 mesh with h * omega <= 0.1 per piece, omega a local frequency bound."""
    a, b = map(float, span)
    nodes_all, hs_all = [], []
    pieces = c.pieces(a, b)
    for pc in pieces:
        probe = np.linspace(pc.lo, pc.hi, 65)[1:-1]
        a11, a12, a21, a22 = piece_entries(pc, probe, 0.0)
        inv_p = np.abs(a12)
        omega = np.sqrt(np.max(inv_p * (lam_abs_max + np.abs(a21)))) + np.max(np.abs(a11) + np.abs(a22))
        n = max(64, int(math.ceil((pc.hi - pc.lo) * omega / 0.1)))
        n = min(n, _MAX_SCAN_STEPS)
        edges = np.linspace(pc.lo, pc.hi, n + 1)
        nodes_all.append(edges[:-1])
        hs_all.append(np.diff(edges))
    x0 = np.concatenate(nodes_all)
    hs = np.concatenate(hs_all)
    # stage nodes: left end, midpoint, right end; a step never straddles a breakpoint
    stage = np.empty((x0.size, 3, 2, 2), dtype=np.complex128)
    offset = 0
    for pc, h in zip(pieces, hs_all):
        xl = x0[offset:offset + h.size]
        for k, t in enumerate((xl, xl + 0.5 * h, xl + h)):
            tt = np.clip(t, pc.lo, pc.hi)
            eps = 1e-12 * max(1.0, abs(pc.lo), abs(pc.hi))
            tt = np.clip(tt, pc.lo + eps, pc.hi - eps)  # p may vanish at a breakpoint
            a11, a12, a21, a22 = piece_entries(pc, tt, 0.0)
            stage[offset:offset + h.size, k, 0, 0] = a11
            stage[offset:offset + h.size, k, 0, 1] = a12
            stage[offset:offset + h.size, k, 1, 0] = a21
            stage[offset:offset + h.size, k, 1, 1] = a22
        offset += h.size
    return stage, hs


def scan_shoot(c: CoefficientSet, span, lams) -> np.ndarray:
    """u(beta; lam) on a grid of lam by one fixed-mesh RK4 sweep (complex)."""
    lams = np.ascontiguousarray(lams, dtype=float)
    stage, hs = _scan_mesh(c, span, float(np.max(np.abs(lams))))
    y0 = np.array([0.0, 1.0], dtype=np.complex128)
    return kernels.propagate_batch(stage, hs, lams, y0)[:, 0]


def default_scan(span, count):
    """(lam_min, lam_max, step): [-50, 50 count^2 / L^2] with 400 count steps."""
    length = float(span[1]) - float(span[0])
    hi = 50.0 * count * count / (length * length)
    return -50.0, hi, (hi + 50.0) / (400 * count)


# ---------------------------------------------------------------- refinement

def _refine_bracket(f, lo, hi, flo, fhi, tol):
    """Illinois false position, falling back to bisection, then one secant step."""
    side = 0
    for _ in range(200):
        if hi - lo <= tol.rel * (1.0 + max(abs(lo), abs(hi))):
            break
        x = (lo * fhi - hi * flo) / (fhi - flo)
        if not lo < x < hi:
            x = 0.5 * (lo + hi)
        fx = f(x)
        if fx == 0.0:
            return x, x, x
        if (fx > 0) == (fhi > 0):
            hi, fhi = x, fx
            if side == 1:
                flo *= 0.5
            side = 1
        else:
            lo, flo = x, fx
            if side == -1:
                fhi *= 0.5
            side = -1
    f_lo, f_hi = f(lo), f(hi)
    lam = lo if abs(f_lo) <= abs(f_hi) else hi
    if f_hi != f_lo:
        sec = hi - f_hi * (hi - lo) / (f_hi - f_lo)
        if lo <= sec <= hi:
            lam = sec
    return lam, lo, hi


def _validated_bracket(f, lo, hi, step, scan_lo, scan_hi):
    flo, fhi = f(lo), f(hi)
    for _ in range(4):
        if flo == 0 or fhi == 0 or (flo > 0) != (fhi > 0):
            return lo, hi, flo, fhi
        # the coarse mesh misplaced the sign change slightly; widen
        lo, hi = max(scan_lo, lo - step), min(scan_hi, hi + step)
        flo, fhi = f(lo), f(hi)
    return None


def _golden_min(g, lo, hi, tol):
    x1 = hi - _GOLD * (hi - lo)
    x2 = lo + _GOLD * (hi - lo)
    g1, g2 = g(x1), g(x2)
    while hi - lo > tol.rel * (1.0 + abs(lo) + abs(hi)):
        if g1 <= g2:
            hi, x2, g2 = x2, x1, g1
            x1 = hi - _GOLD * (hi - lo)
            g1 = g(x1)
        else:
            lo, x1, g1 = x1, x2, g2
            x2 = lo + _GOLD * (hi - lo)
            g2 = g(x2)
    return 0.5 * (lo + hi), lo, hi


def eigenvalues_on_interval(c: CoefficientSet, span, count: int, scan=None,
                            tol: Tolerances = Tolerances()) -> EigenResult:
    """The first `count` Dirichlet eigenvalues inside the scan range.

    Args:
        scan: (lam_min, lam_max, step); see :func:`default_scan` for the default.

    Raises:
        EigenSearchError: fewer than `count` roots in the scan range
            (``found`` holds how many were located).
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    a, b = map(float, span)
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise ValueError("span must be finite with alpha < beta")
    lam_min, lam_max, step = default_scan((a, b), count) if scan is None else map(float, scan)
    if not (lam_min < lam_max and step > 0):
        raise ValueError("scan must satisfy lam_min < lam_max and step > 0")
    n = int(math.floor((lam_max - lam_min) / step + 1e-9)) + 1
    grid = lam_min + step * np.arange(n)
    if grid[-1] < lam_max:
        grid = np.append(grid, lam_max)
    vals = scan_shoot(c, (a, b), grid)

    if not c.real_r_zero:
        return _complex_eigen(c, (a, b), count, grid, vals, tol)

    f = lambda lam: float(_shoot_complex(c, lam, (a, b), tol).real)  # noqa: E731
    re = vals.real
    idx = np.nonzero(np.sign(re[:-1]) * np.sign(re[1:]) <= 0)[0]
    lams, res, brs = [], [], []
    last_hi = -math.inf
    for i in idx:
        if len(lams) == count:
            break
        lo, hi = grid[i], grid[i + 1]
        if lo < last_hi:
            continue
        br = _validated_bracket(f, lo, hi, step, lam_min, lam_max)
        if br is None:
            continue
        lo, hi, flo, fhi = br
        if flo == 0.0 or fhi == 0.0:
            lam = lo if flo == 0.0 else hi
        else:
            lam, lo, hi = _refine_bracket(f, lo, hi, flo, fhi, tol)
        if lams and lam <= lams[-1] + tol.rel * (1.0 + abs(lam)):
            continue
        lams.append(float(lam))
        res.append(abs(f(lam)))
        brs.append((float(lo), float(hi)))
        last_hi = hi
    if len(lams) < count:
        raise EigenSearchError(
            f"found {len(lams)} of {count} eigenvalues in [{lam_min}, {lam_max}]", found=len(lams)
        )
    return EigenResult(lams, res, brs, list(range(1, count + 1)))


def _complex_eigen(c, span, count, grid, vals, tol):
    mag = np.abs(vals) ** 2
    cand = [i for i in range(1, grid.size - 1) if mag[i] <= mag[i - 1] and mag[i] <= mag[i + 1]]
    g = lambda lam: abs(_shoot_complex(c, lam, span, tol)) ** 2  # noqa: E731
    lams, res, brs = [], [], []
    for i in cand:
        if len(lams) == count:
            break
        lam, lo, hi = _golden_min(g, grid[i - 1], grid[i + 1], tol)
        lams.append(float(lam))
        res.append(math.sqrt(g(lam)))
        brs.append((float(lo), float(hi)))
    if len(lams) < count:
        raise EigenSearchError(f"found {len(lams)} of {count} minima of |u(beta)|^2", found=len(lams))
    return EigenResult(lams, res, brs, list(range(1, count + 1)), experimental=True,
                       notes=["r != 0: eigenvalues located as minima of |u(beta)|^2 (experimental)"])


def dependence_defect(c: CoefficientSet, lam: float, span, tol: Tolerances = Tolerances()) -> float:
    """Relative bracket at the midpoint of the forward and backward Dirichlet solutions.

    Zero when lam is an eigenvalue (the two solutions are linearly dependent).
    """
    a, b = map(float, span)
    mid = 0.5 * (a + b)
    u = solve_system(c, lam, (a, mid), QuasiState(a, 0.0, 1.0), None, tol)
    v = solve_system(c, lam, (b, mid), QuasiState(b, 0.0, 1.0), None, tol)
    (u0, u1), (v0, v1) = u.ys[-1], v.ys[-1]
    br = u0 * np.conj(v1) - u1 * np.conj(v0)
    scale = abs(u0 * v1) + abs(u1 * v0)
    return float(abs(br) / scale) if scale > 0 else 0.0
