"""Audits of the self-adjointness hypotheses and the kernel probe.

Every checker returns a :class:`ConditionReport`. Conditions that quantify
over all of the real line can only be supported by finite evidence; the
decision rules below are fixed constants and are echoed in each report.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coeffs import OVERFLOW, CoefficientSet, _probe_singularity, classify_partials
from .errors import HypothesisViolation, MalformedSequence
from .integrator import QuasiState, Tolerances, solve_system
from .quadform import TestFunction, rayleigh_lower_bound_probe
from .quadrature import integrate
from .report import ConditionReport, Verdict, combine
from .shinzettl import fd_step

HR_GROWTH_PER_DOUBLING = 0.05
CLARK_SATISFIED_EXPONENT = 2.05
CLARK_VIOLATED_EXPONENT = 2.5
PROBE_RATIO_THRESHOLD = 0.5
PROBE_DIRECTIONS = 32
PROBE_MARGIN = 1.5
CONTINUITY_REL = 1e-8

DEFAULT_HR_WINDOWS = tuple(2.0 ** k for k in range(13))
DEFAULT_CLARK_GRID = tuple(2.0 ** k for k in range(2, 12))
DEFAULT_PROBE_WINDOWS = (1.0, 2.0, 3.0, 4.0)

_INV_P_NOTE = "1/p != 0 almost everywhere is checked only at sample points."


def _sample_points(c, a, b, n=2001):
    return np.unique(np.concatenate([np.linspace(a, b, n), c.breakpoints(a, b)]))


def _p_raw(c, x, side="right"):
    """p without the finiteness check, so overflow shows up as inf."""
    xa = np.asarray(x, dtype=float)
    idx = np.asarray(c.p.segment_index(xa, side))
    out = np.empty(xa.shape)
    with np.errstate(all="ignore"):
        for k in np.unique(idx):
            m = idx == k
            out[m] = c.p.segments[int(k)].compiled(xa[m])
    return float(out) if out.ndim == 0 else out


def _inv_sqrt_p(c):
    def f(x):
        with np.errstate(all="ignore"):
            return 1.0 / np.sqrt(_p_raw(c, x))
    return f


def _p_both_sides(c, xs):
    return np.concatenate([_p_raw(c, xs, "left"), _p_raw(c, xs, "right")])


def _require_positive(c, a, b, n=2001):
    vals = _p_both_sides(c, _sample_points(c, a, b, n))
    bad = vals[~(vals > 0)]  # also catches nan
    if bad.size:
        raise HypothesisViolation(f"p <= 0 (or undefined) at a sample in [{a}, {b}]")


# ---------------------------------------------------------------------- rho map

class RhoMap:
    """rho(x) = int_0^x p^(-1/2) on a window containing 0, with inverse lookup."""

    def __init__(self, c: CoefficientSet, xs, rhos, rel):
        self.coeffs = c
        self.xs = np.asarray(xs, dtype=float)
        self.rhos = np.asarray(rhos, dtype=float)
        self._rel = rel

    @property
    def window(self):
        return float(self.xs[0]), float(self.xs[-1])

    @property
    def rho_range(self):
        return float(self.rhos[0]), float(self.rhos[-1])

    def _density(self, x):
        return 1.0 / np.sqrt(self.coeffs.p(x))

    def _one(self, x):
        lo, hi = self.window
        if not lo - 1e-12 * (1 + abs(lo)) <= x <= hi + 1e-12 * (1 + abs(hi)):
            raise ValueError(f"x = {x} outside the rho window [{lo}, {hi}]")
        j = int(np.clip(np.searchsorted(self.xs, x) - 1, 0, self.xs.size - 2))
        x0 = self.xs[j] if abs(x - self.xs[j]) <= abs(x - self.xs[j + 1]) else self.xs[j + 1]
        r0 = self.rhos[j] if x0 == self.xs[j] else self.rhos[j + 1]
        if x == x0:
            return float(r0)
        res = integrate(self._density, x0, x, rel=self._rel, abs_tol=1e-15)
        return float(r0 + res.value)

    def __call__(self, x):
        xa = np.asarray(x, dtype=float)
        if xa.ndim == 0:
            return self._one(float(xa))
        return np.array([self._one(float(t)) for t in xa.ravel()]).reshape(xa.shape)

    def _inv_one(self, rho):
        r0, r1 = self.rho_range
        if not r0 - 1e-12 <= rho <= r1 + 1e-12:
            raise ValueError(f"rho = {rho} outside [{r0}, {r1}]")
        j = int(np.clip(np.searchsorted(self.rhos, rho) - 1, 0, self.xs.size - 2))
        lo, hi = self.xs[j], self.xs[j + 1]
        flo, fhi = self.rhos[j] - rho, self.rhos[j + 1] - rho
        if flo == 0.0:
            return float(lo)
        if fhi == 0.0:
            return float(hi)
        x = lo + (hi - lo) * (-flo) / (fhi - flo)
        for _ in range(60):
            f = self._one(x) - rho
            if abs(f) <= 1e-14 * (1.0 + abs(rho)):
                break
            if f < 0:
                lo = x
            else:
                hi = x
            step = f * math.sqrt(float(self.coeffs.p(x)))
            x_new = x - step
            x = x_new if lo < x_new < hi else 0.5 * (lo + hi)
            if hi - lo <= 1e-15 * (1.0 + abs(x)):
                break
        return float(x)

    def inverse(self, rho):
        ra = np.asarray(rho, dtype=float)
        if ra.ndim == 0:
            return self._inv_one(float(ra))
        return np.array([self._inv_one(float(t)) for t in ra.ravel()]).reshape(ra.shape)


def rho_transform(c: CoefficientSet, window, tol: Tolerances = Tolerances(), n_nodes=1001) -> RhoMap:
    """Build the rho map on `window` (widened to contain 0 so that rho(0) = 0).

    Raises:
        HypothesisViolation: p <= 0 at a sample point.
    """
    a, b = map(float, window)
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise ValueError("window must be finite with a < b")
    a, b = min(a, 0.0), max(b, 0.0)
    _require_positive(c, a, b)
    nodes = np.unique(np.concatenate([np.linspace(a, b, max(n_nodes, 1000)), c.breakpoints(a, b), [0.0]]))
    rel = min(tol.rel, 1e-11)
    dens = lambda x: 1.0 / np.sqrt(c.p(x))  # noqa: E731
    incr = np.array([integrate(dens, x0, x1, rel=rel, abs_tol=1e-15).value for x0, x1 in zip(nodes, nodes[1:])])
    rhos = np.concatenate([[0.0], np.cumsum(incr)])
    rhos -= rhos[np.searchsorted(nodes, 0.0)]
    return RhoMap(c, nodes, rhos, rel)


# ------------------------------------------------------------- Hartman-Rellich

def _hr_partials(c, windows, sign):
    dens = _inv_sqrt_p(c)
    out, prev, acc = [], 0.0, 0.0
    for R in windows:
        lo, hi = (prev, R) if sign > 0 else (-R, -prev)
        res = integrate(dens, lo, hi, c.breakpoints(lo, hi), rel=1e-11, abs_tol=1e-14)
        acc += float(res.value)
        out.append(acc)
        prev = R
    return out


def _tag_verdict(tag):
    if tag.kind == "power":
        return Verdict.SATISFIED if tag.param <= 2.0 else Verdict.VIOLATED
    if tag.kind == "exponential":
        return Verdict.VIOLATED if tag.param > 0.0 else Verdict.SATISFIED
    if tag.kind == "bounded":
        return Verdict.SATISFIED
    return None


def check_hartman_rellich(c: CoefficientSet, windows=DEFAULT_HR_WINDOWS) -> ConditionReport:
    """Divergence of int p^(-1/2) on both half-lines.

    Decided symbolically from the growth tags: power(e) with e <= 2, bounded,
    or non-positive exponential rate give ``satisfied``; power(e) with e > 2
    or a positive exponential rate give ``violated``. An unspecified side is
    ``inconclusive``; its partial integrals on the doubling windows are still
    reported, with a flag telling whether they grew by at least 5% per doubling.

    Raises:
        HypothesisViolation: p <= 0 at a sample point.
    """
    windows = sorted(float(w) for w in windows)
    if not windows or windows[0] <= 0:
        raise ValueError("windows must be positive radii")
    R = windows[-1]
    for lo, hi in ((-R, 0.0), (0.0, R)):
        _require_positive(c, lo, hi, 4001)
    evidence, verdicts, notes = [], [], []
    totals = {}
    for sign, name in ((1, "plus"), (-1, "minus")):
        partials = _hr_partials(c, windows, sign)
        totals[name] = partials[-1]
        for w, val in zip(windows, partials):
            evidence.append((f"partial_{name}_R{w:g}", val))
        growth = np.diff(partials) / np.maximum(np.abs(partials[:-1]), 1e-300)
        grows = bool(growth.size and np.all(growth >= HR_GROWTH_PER_DOUBLING))
        evidence.append((f"numeric_divergence_evidence_{name}", grows))
        tag = next((t for t in c.p_growth if t.direction == name), None)
        v = _tag_verdict(tag) if tag is not None else None
        if v is None:
            v = Verdict.INCONCLUSIVE
            notes.append(f"{name}: growth tag unspecified, numeric evidence only")
        else:
            notes.append(f"{name}: decided by growth tag {tag.to_text()}")
        verdicts.append(v)
    evidence.append(("two_sided_total", totals["plus"] + totals["minus"]))
    notes.append(f"rule: power exponent <= 2 satisfied, > 2 violated; "
                 f"numeric evidence threshold {HR_GROWTH_PER_DOUBLING:g} growth per doubling")
    return ConditionReport("hartman-rellich", combine(verdicts), evidence, "; ".join(notes))


# ------------------------------------------------------------------------ Clark

def _sup_p(c, lo, hi, n=2001):
    return float(np.max(_p_both_sides(c, _sample_points(c, lo, hi, n))))


def check_clark(c: CoefficientSet, rho_grid=DEFAULT_CLARK_GRID) -> ConditionReport:
    """sup p on [rho/2, rho] and [-rho, -rho/2] is O(rho^2).

    The exponent is the least-squares slope of log sup p against log rho.
    ``satisfied`` needs exponents <= 2.05 on both sides and sup/rho^2
    non-increasing over the three largest rho; ``violated`` needs an exponent
    >= 2.5 on some side (or sup p overflowing); otherwise ``inconclusive``.
    """
    grid = np.asarray(sorted(float(r) for r in rho_grid))
    if grid.size < 6 or grid[0] <= 0 or not np.allclose(grid[1:] / grid[:-1], 2.0, rtol=1e-12):
        raise ValueError("rho grid must be geometric with ratio 2 and have at least 6 points")
    evidence, verdicts = [], []
    for sign, name in ((1, "plus"), (-1, "minus")):
        sups = np.array([_sup_p(c, *sorted((sign * r / 2, sign * r))) for r in grid])
        for r, sp in zip(grid, sups):
            evidence.append((f"sup_{name}_rho{r:g}", float(sp)))
        finite = np.isfinite(sups) & (sups > 0) & (sups < OVERFLOW ** 2)
        overflow = not np.all(finite)
        if np.count_nonzero(finite) >= 3:
            slope = float(np.polyfit(np.log(grid[finite]), np.log(sups[finite]), 1)[0])
        else:
            slope = math.inf
        evidence.append((f"exponent_{name}", slope))
        ratios = sups[-3:] / grid[-3:] ** 2
        monotone = bool(np.all(np.isfinite(ratios)) and np.all(ratios[1:] <= ratios[:-1] * (1 + 1e-12)))
        evidence.append((f"ratio_nonincreasing_{name}", monotone))
        if overflow or slope >= CLARK_VIOLATED_EXPONENT:
            verdicts.append(Verdict.VIOLATED)
        elif slope <= CLARK_SATISFIED_EXPONENT and monotone:
            verdicts.append(Verdict.SATISFIED)
        else:
            verdicts.append(Verdict.INCONCLUSIVE)
    notes = (f"rule: exponent <= {CLARK_SATISFIED_EXPONENT} with non-increasing sup/rho^2 satisfied, "
             f">= {CLARK_VIOLATED_EXPONENT} violated")
    return ConditionReport("clark", combine(verdicts), evidence, notes)


# ------------------------------------------------------- local regularity of p

def _p_prime(c, x, shrink=1.0):
    """Central difference of p inside its own segment (never across a breakpoint)."""
    x = np.asarray(x, dtype=float)
    h = fd_step(x) * shrink
    out = np.empty(x.shape)
    idx = c.p.segment_index(x)
    for k in np.unique(idx):
        m = idx == k
        seg = c.p.segments[k]
        out[m] = (seg(x[m] + h[m]) - seg(x[m] - h[m])) / (2 * h[m])
    return out


def _int_dp2(c, a, b, pts, shrink):
    f = lambda x: _p_prime(c, x, shrink) ** 2  # noqa: E731
    return f, integrate(f, a, b, pts, rel=1e-8, abs_tol=1e-12)


def _local_regularity(c, a, b, tag=""):
    """Positivity, continuity at breakpoints and finiteness of int (p')^2 on [a, b].

    A finite-difference derivative is bounded even where p' is not square
    integrable, so the integral is computed with two difference steps; a
    relative change above 1e-3 marks (p')^2 as suspect (``inconclusive``).
    """
    ev, verdicts = [], []
    vals = _p_both_sides(c, _sample_points(c, a, b))
    pmin = float(np.nanmin(vals)) if np.any(np.isfinite(vals)) else math.nan
    ev.append((f"p_min{tag}", pmin))
    positive = bool(np.all(vals > 0))
    verdicts.append(Verdict.SATISFIED if positive else Verdict.VIOLATED)
    jump = 0.0
    for t in c.p.breakpoints:
        if a <= t <= b:
            pl, pr = c.p(t, "left"), c.p(t, "right")
            jump = max(jump, abs(pl - pr) / (1.0 + max(abs(pl), abs(pr))))
    ev.append((f"p_max_rel_jump{tag}", jump))
    verdicts.append(Verdict.VIOLATED if jump > CONTINUITY_REL else Verdict.SATISFIED)
    if positive and jump <= CONTINUITY_REL:
        pts = [t for t in c.p.breakpoints if a < t < b]
        f, res = _int_dp2(c, a, b, pts, 1.0)
        if res.converged and np.isfinite(res.value) and abs(res.value) < OVERFLOW:
            _, fine = _int_dp2(c, a, b, pts, 1e-2)
            change = abs(fine.value - res.value) / max(abs(res.value), 1e-300) if res.value else abs(fine.value)
            ev.append((f"int_dp2{tag}", float(fine.value)))
            ev.append((f"int_dp2_step_sensitivity{tag}", float(change)))
            verdicts.append(Verdict.SATISFIED if change <= 1e-3 else Verdict.INCONCLUSIVE)
        else:
            x_star = 0.5 * (res.worst[0] + res.worst[1])
            kind = classify_partials(_probe_singularity(f, a, b, x_star, pts))
            ev.append((f"int_dp2{tag}", math.inf if kind == "divergent" else float(res.value)))
            verdicts.append(Verdict.VIOLATED if kind == "divergent" else Verdict.INCONCLUSIVE)
    return ev, combine(verdicts)


def check_theorem_b(c: CoefficientSet, window=(-10.0, 10.0), hr_windows=DEFAULT_HR_WINDOWS) -> ConditionReport:
    """Items (i) p in W^1_2,loc with p > 0 (sampled on `window`) and (ii) Hartman-Rellich.

    The window is widened to cover every declared breakpoint of p. The
    verdict is the conjunction, with ``violated`` dominating ``inconclusive``.
    """
    a, b = map(float, window)
    bps = c.p.breakpoints
    if bps:
        a, b = min(a, bps[0] - 1.0), max(b, bps[-1] + 1.0)
    ev, v1 = _local_regularity(c, a, b)
    evidence = [("window_lo", a), ("window_hi", b), *ev, ("item_i", str(v1))]
    if v1 is Verdict.VIOLATED:
        v2 = Verdict.INCONCLUSIVE
        evidence.append(("item_ii", "not evaluated"))
        note = "item (i) fails; item (ii) skipped"
    else:
        try:
            hr = check_hartman_rellich(c, hr_windows)
            v2 = hr.verdict
            evidence += hr.evidence
            note = hr.notes
        except HypothesisViolation as exc:
            v2 = Verdict.VIOLATED
            note = str(exc)
        evidence.append(("item_ii", str(v2)))
    return ConditionReport("theorem-b", combine([v1, v2]), evidence, f"{note}; {_INV_P_NOTE}")


# ------------------------------------------------------- interval sequences

@dataclass(frozen=True)
class IntervalSequence:
    """Intervals Delta_n = [a_n, b_n] over a finite index set symmetric about 0.

    Index 0 may be omitted. For negative n the right ends must not increase
    as n decreases and for positive n the left ends must not decrease, with a
    strict overall trend on each side that has two or more intervals.
    """

    intervals: tuple

    def __post_init__(self):
        rows = sorted((int(n), float(a), float(b)) for n, a, b in self.intervals)
        if not rows:
            raise MalformedSequence("empty interval sequence")
        ns = [n for n, _, _ in rows]
        if len(set(ns)) != len(ns):
            raise MalformedSequence("duplicate index")
        if {n for n in ns if n} != {-n for n in ns if n}:
            raise MalformedSequence("index range is not symmetric")
        for n, a, b in rows:
            if not (math.isfinite(a) and math.isfinite(b) and a < b):
                raise MalformedSequence(f"interval {n} must be finite with a < b")
        neg = [b for n, _, b in rows if n < 0]
        pos = [a for n, a, _ in rows if n > 0]
        if any(x > y for x, y in zip(neg, neg[1:])) or (len(neg) > 1 and neg[0] >= neg[-1]):
            raise MalformedSequence("right ends do not trend to -inf as n -> -inf")
        if any(x > y for x, y in zip(pos, pos[1:])) or (len(pos) > 1 and pos[0] >= pos[-1]):
            raise MalformedSequence("left ends do not trend to +inf as n -> +inf")
        object.__setattr__(self, "intervals", tuple(rows))

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    @classmethod
    def from_function(cls, f, n_max: int, skip_zero=False):
        """Delta_n = f(n) for |n| <= n_max."""
        return cls(tuple((n, *f(n)) for n in range(-n_max, n_max + 1) if not (skip_zero and n == 0)))

    @classmethod
    def from_csv(cls, text: str):
        """Rows ``n,a,b``; an optional header line is skipped."""
        rows = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [t.strip() for t in line.split(",")]
            if len(parts) != 3:
                raise MalformedSequence(f"line {lineno}: expected n,a,b")
            try:
                rows.append((int(parts[0]), float(parts[1]), float(parts[2])))
            except ValueError:
                if rows or lineno > 1:
                    raise MalformedSequence(f"line {lineno}: malformed numbers") from None
        return cls(tuple(rows))


def check_theorem_c(c: CoefficientSet, seq: IntervalSequence) -> ConditionReport:
    """Interval-sequence conditions on each Delta_n and the exhibited constant C*.

    C* = max_n sup_{Delta_n} p / |Delta_n|^2, so sup p <= C* |Delta_n|^2 holds on
    every supplied interval by construction.
    """
    evidence, verdicts = [], []
    c_star = 0.0
    for n, a, b in seq:
        ev, v = _local_regularity(c, a, b, tag=f"_n{n}")
        verdicts.append(v)
        evidence += ev
        sup = _sup_p(c, a, b)
        ratio = sup / (b - a) ** 2
        evidence.append((f"sup_p_n{n}", sup))
        evidence.append((f"ratio_n{n}", ratio))
        c_star = max(c_star, ratio)
    evidence.insert(0, ("C_star", c_star))
    notes = ("C* is computed over the supplied finite index range only; the uniform bound over all n "
             f"rests on the sequence extending indefinitely. {_INV_P_NOTE}")
    return ConditionReport("theorem-c", combine(verdicts), evidence, notes)


# ----------------------------------------------------------------- kernel probe

def _rho_window(c, radius, tol):
    """Smallest doubling x-window whose rho range covers [-radius, radius]."""
    half = max(1.0, radius)
    for _ in range(40):
        rm = rho_transform(c, (-half, half), tol)
        r0, r1 = rm.rho_range
        if r0 <= -radius and r1 >= radius:
            return rm
        half *= 2.0
    return None


def _default_lambda0(c, lo, hi):
    fam = []
    for a, b in ((lo, hi), (lo, 0.5 * (lo + hi)), (0.5 * (lo + hi), hi)):
        fam += [TestFunction.sine(k, a, b) for k in (1, 2, 3)]
    est, _ = rayleigh_lower_bound_probe(c, fam)
    return est - PROBE_MARGIN, est


def _gram(c, th, ph, lo, hi):
    pts = sorted({float(t) for t in np.concatenate([th.xs, ph.xs]) if lo < t < hi} | set(c.breakpoints(lo, hi)))
    g = np.empty(3)
    fns = (lambda x: np.abs(th.u(x)) ** 2,
           lambda x: np.real(th.u(x) * np.conj(ph.u(x))),
           lambda x: np.abs(ph.u(x)) ** 2)
    for k, f in enumerate(fns):
        g[k] = float(np.real(integrate(f, lo, hi, pts, rel=1e-9, abs_tol=1e-300).value))
    return g


def kernel_probe(c: CoefficientSet, windows=DEFAULT_PROBE_WINDOWS, tol: Tolerances = Tolerances(),
                 lam0=None, n_directions=PROBE_DIRECTIONS) -> ConditionReport:
    """Look for square-integrable solutions of l[v] = lam0 v.

    Windows are radii n in rho units: the ball is |rho| <= n and annulus n is
    n_prev < |rho| <= n. For each of `n_directions` initial directions
    (cos t, sin t) of (v, v[1]) at x = 0, t in [0, pi), the ratio
    mass(annulus n)/mass(ball n) is recorded. If every direction keeps a
    ratio >= 0.5 at the last window, no candidate looks square-integrable and
    the verdict is ``consistent-with-self-adjoint``; otherwise, or with a
    single window, ``inconclusive``.

    `lam0` defaults to a Rayleigh quotient estimate minus 1.5. That estimate
    comes from a finite family, so it is an upper bound for the bottom of the
    form; the margin is a heuristic.
    """
    radii = sorted(float(w) for w in windows)
    if not radii or radii[0] <= 0:
        raise ValueError("windows must be positive radii")
    rm = _rho_window(c, radii[-1], tol)
    if rm is None:
        return ConditionReport("kernel-probe", Verdict.INCONCLUSIVE, [("rho_max", float("nan"))],
                               "rho range is bounded; the probe windows cannot be reached")
    xr = [float(rm.inverse(-r)) for r in radii], [float(rm.inverse(r)) for r in radii]
    x_lo, x_hi = xr[0][-1], xr[1][-1]
    evidence = [("x_lo", x_lo), ("x_hi", x_hi)]
    if lam0 is None:
        lam0, est = _default_lambda0(c, x_lo, x_hi)
        evidence.append(("rayleigh_estimate", est))
    evidence.append(("lambda0", float(lam0)))

    trajs = {}
    for side, end in (("plus", x_hi), ("minus", x_lo)):
        trajs[side] = [solve_system(c, lam0, (0.0, end), QuasiState(0.0, *y0), None, tol) for y0 in ((1, 0), (0, 1))]
    # Gram entries per annulus, both sides summed
    edges_plus = [0.0, *xr[1]]
    edges_minus = [0.0, *xr[0]]
    annuli = []
    for k in range(len(radii)):
        g = _gram(c, *trajs["plus"], edges_plus[k], edges_plus[k + 1])
        g += _gram(c, *trajs["minus"], edges_minus[k + 1], edges_minus[k])
        annuli.append(g)
    annuli = np.array(annuli)
    balls = np.cumsum(annuli, axis=0)

    angles = np.pi * np.arange(n_directions) / n_directions
    cs, sn = np.cos(angles), np.sin(angles)

    def mass(g):
        return cs * cs * g[..., 0:1] + 2 * cs * sn * g[..., 1:2] + sn * sn * g[..., 2:3]

    ratios = mass(annuli) / mass(balls)  # (windows, directions)
    for r, row in zip(radii, ratios):
        evidence.append((f"min_ratio_R{r:g}", float(np.min(row))))
    last = ratios[-1]
    evidence.append(("argmin_angle_last", float(angles[int(np.argmin(last))])))
    if len(radii) < 2:
        verdict = Verdict.INCONCLUSIVE
        note = "a single window cannot show growth"
    elif np.all(last >= PROBE_RATIO_THRESHOLD):
        verdict = Verdict.CONSISTENT
        note = f"every direction keeps outer-annulus ratio >= {PROBE_RATIO_THRESHOLD:g}"
    else:
        verdict = Verdict.INCONCLUSIVE
        note = "some direction has small outer mass and may be square-integrable"
    return ConditionReport("kernel-probe", verdict, evidence, f"{note}; evidence only, not a proof")
