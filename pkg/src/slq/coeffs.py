"""Coefficient data (p, Q, s, r) of the expression

    l[u] = -(p u')' + q u + i((r u)' + r u'),   q = Q' + s,

stored as piecewise expressions plus the jump part of Q, and the problem-file
format that carries them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ProblemFormatError
from .expr import ZERO, Expr, Num, evaluate_checked, parse_expression
from .quadrature import NonFiniteIntegrand, integrate
from .report import ConditionReport, Verdict

OVERFLOW = 1e12


@dataclass(frozen=True)
class PiecewiseFn:
    """Expression-valued function with finitely many breakpoints.

    ``segments[k]`` governs the open interval between ``breakpoints[k-1]`` and
    ``breakpoints[k]``; the first and last segments are unbounded. At a
    breakpoint the right segment is used unless ``side="left"`` is requested.
    """

    breakpoints: tuple = ()
    segments: tuple = (ZERO,)

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "segments", tuple(self.segments))
        if len(self.segments) != len(bp) + 1:
            raise ValueError(f"{len(bp)} breakpoints need {len(bp) + 1} segments, got {len(self.segments)}")
        if any(not math.isfinite(b) for b in bp):
            raise ValueError("breakpoints must be finite")
        if any(b2 <= b1 for b1, b2 in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing")

    @classmethod
    def constant(cls, value: float) -> "PiecewiseFn":
        return cls((), (Num(float(value)),))

    @classmethod
    def from_expr(cls, expr) -> "PiecewiseFn":
        if isinstance(expr, str):
            expr = parse_expression(expr)
        return cls((), (expr,))

    @property
    def is_zero(self) -> bool:
        return all(seg.is_constant and seg.compiled.constant == 0.0 for seg in self.segments)

    def segment_index(self, x, side="right"):
        if side == "right":
            return np.searchsorted(self.breakpoints, x, side="right")
        return np.searchsorted(self.breakpoints, x, side="left")

    def segment_at(self, x: float, side="right") -> Expr:
        return self.segments[int(self.segment_index(x, side))]

    def __call__(self, x, side="right"):
        return self.evaluate(x, side)

    def evaluate(self, x, side="right"):
        """Value at `x` (scalar or array); raises DomainError on non-finite values."""
        if not self.breakpoints:
            return evaluate_checked(self.segments[0], x, segment=0)
        xa = np.asarray(x, dtype=float)
        idx = self.segment_index(xa, side)
        if xa.ndim == 0:
            k = int(idx)
            return evaluate_checked(self.segments[k], float(xa), segment=k)
        out = np.empty(xa.shape)
        for k in np.unique(idx):
            mask = idx == k
            out[mask] = evaluate_checked(self.segments[k], xa[mask], segment=int(k))
        return out

    def to_text(self) -> str:
        bps = " ".join(repr(b) for b in self.breakpoints)
        segs = " ; ".join(str(s) for s in self.segments)
        return f"{bps} | {segs}" if bps else f"| {segs}"


@dataclass(frozen=True)
class StepFn:
    """Left-continuous step function: value at x is the sum of heights with location < x."""

    jumps: tuple = ()

    def __post_init__(self):
        jumps = tuple((float(a), float(h)) for a, h in self.jumps)
        object.__setattr__(self, "jumps", jumps)
        locs = [a for a, _ in jumps]
        if any(b <= a for a, b in zip(locs, locs[1:])):
            raise ValueError("jump locations must be strictly increasing")
        object.__setattr__(self, "_locs", np.array(locs))
        object.__setattr__(self, "_cum", np.concatenate([[0.0], np.cumsum([h for _, h in jumps])]))

    @property
    def locations(self):
        return tuple(a for a, _ in self.jumps)

    def __call__(self, x, side="left"):
        return self.evaluate(x, side)

    def evaluate(self, x, side="left"):
        """``side="left"`` is the function value (left limit); ``"right"`` adds a jump sitting at x."""
        if not self.jumps:
            return 0.0 if np.ndim(x) == 0 else np.zeros(np.shape(x))
        idx = np.searchsorted(self._locs, x, side="left" if side == "left" else "right")
        out = self._cum[idx]
        return float(out) if np.ndim(out) == 0 else out


GROWTH_CLASSES = ("power", "exponential", "bounded", "unspecified")


@dataclass(frozen=True)
class GrowthTag:
    """User-declared asymptotic class of p toward +inf ("plus") or -inf ("minus")."""

    direction: str = "plus"
    kind: str = "unspecified"
    param: float = 0.0

    def __post_init__(self):
        if self.direction not in ("plus", "minus"):
            raise ValueError(f"direction must be 'plus' or 'minus', not {self.direction!r}")
        if self.kind not in GROWTH_CLASSES:
            raise ValueError(f"unknown growth class {self.kind!r}")
        if not math.isfinite(self.param):
            raise ValueError("growth parameter must be finite")

    def to_text(self):
        if self.kind in ("power", "exponential"):
            return f"{self.kind} {self.param!r}"
        return self.kind


@dataclass(frozen=True)
class Piece:
    """Coefficients restricted to one open interval free of breakpoints and jumps."""

    lo: float
    hi: float
    p: Expr
    q_ac: Expr
    q_jump: float
    s: Expr
    r: Expr


@dataclass(frozen=True)
class CoefficientSet:
    p: PiecewiseFn = field(default_factory=lambda: PiecewiseFn.constant(1.0))
    q_ac: PiecewiseFn = field(default_factory=lambda: PiecewiseFn.constant(0.0))
    q_jump: StepFn = field(default_factory=StepFn)
    s: PiecewiseFn = field(default_factory=lambda: PiecewiseFn.constant(0.0))
    r: PiecewiseFn = field(default_factory=lambda: PiecewiseFn.constant(0.0))
    p_growth: tuple = (GrowthTag("plus"), GrowthTag("minus"))

    @classmethod
    def from_strings(cls, p="1", q_ac="0", s="0", r="0", jumps=(), growth=None):
        """Convenience constructor for smooth (single-segment) coefficients."""
        kw = dict(
            p=PiecewiseFn.from_expr(p),
            q_ac=PiecewiseFn.from_expr(q_ac),
            q_jump=StepFn(tuple(jumps)),
            s=PiecewiseFn.from_expr(s),
            r=PiecewiseFn.from_expr(r),
        )
        if growth is not None:
            kw["p_growth"] = tuple(growth)
        return cls(**kw)

    def with_(self, **changes) -> "CoefficientSet":
        return replace(self, **changes)

    def Q(self, x, side=None):
        """Q = Q_ac + Q_jump. ``side=None`` uses each part's own convention."""
        if side is None:
            return self.q_ac(x) + self.q_jump(x)
        return self.q_ac(x, side) + self.q_jump(x, side)

    @property
    def real_r_zero(self) -> bool:
        return self.r.is_zero

    def breakpoints(self, lo=-math.inf, hi=math.inf):
        pts = set(self.p.breakpoints) | set(self.q_ac.breakpoints) | set(self.s.breakpoints)
        pts |= set(self.r.breakpoints) | set(self.q_jump.locations)
        return sorted(t for t in pts if lo < t < hi)

    def pieces(self, a: float, b: float, extra=()):
        """Split [a, b] at every breakpoint/jump (and `extra` points); one :class:`Piece` each."""
        lo, hi = min(a, b), max(a, b)
        inner = set(self.breakpoints(lo, hi)) | {float(t) for t in extra if lo < t < hi}
        edges = [lo, *sorted(inner), hi]
        out = []
        for x0, x1 in zip(edges, edges[1:]):
            mid = 0.5 * (x0 + x1)
            out.append(
                Piece(
                    x0, x1,
                    self.p.segment_at(mid), self.q_ac.segment_at(mid),
                    float(self.q_jump(mid)),
                    self.s.segment_at(mid), self.r.segment_at(mid),
                )
            )
        return out


@dataclass(frozen=True)
class Problem:
    coeffs: CoefficientSet
    domain: tuple


# --------------------------------------------------------------------- file format

def _parse_real(tok, lineno):
    try:
        val = float(tok)
    except ValueError:
        raise ProblemFormatError(f"malformed number {tok!r}", lineno) from None
    if not math.isfinite(val):
        raise ProblemFormatError(f"number {tok!r} is not finite", lineno)
    return val


def _parse_piecewise(rest, lineno):
    rest = rest.strip()
    if rest.startswith("piecewise"):
        rest = rest[len("piecewise"):]
        if "|" not in rest:
            raise ProblemFormatError("piecewise definition needs '|'", lineno)
        head, tail = rest.split("|", 1)
    else:
        head, tail = "", rest
    bps = [_parse_real(t, lineno) for t in head.split()]
    try:
        segs = [parse_expression(e.strip()) for e in tail.split(";")]
    except Exception as exc:  # syntax errors carry their own offset
        raise ProblemFormatError(str(exc), lineno) from exc
    if any(b2 <= b1 for b1, b2 in zip(bps, bps[1:])):
        raise ProblemFormatError("breakpoints not increasing", lineno)
    if len(segs) != len(bps) + 1:
        raise ProblemFormatError(f"{len(bps)} breakpoints need {len(bps) + 1} expressions, got {len(segs)}", lineno)
    return PiecewiseFn(tuple(bps), tuple(segs))


def _parse_growth(direction, toks, lineno):
    if not toks:
        raise ProblemFormatError("missing growth class", lineno)
    kind = toks[0]
    if kind in ("power", "exponential"):
        if len(toks) != 2:
            raise ProblemFormatError(f"{kind} needs exactly one parameter", lineno)
        return GrowthTag(direction, kind, _parse_real(toks[1], lineno))
    if kind in ("bounded", "unspecified") and len(toks) == 1:
        return GrowthTag(direction, kind)
    raise ProblemFormatError(f"bad growth specification {' '.join(toks)!r}", lineno)


def _parse_jumps(rest, lineno):
    jumps = []
    for chunk in rest.split(";"):
        toks = chunk.split()
        if not toks:
            continue
        if len(toks) != 2:
            raise ProblemFormatError(f"jump needs 'location height', got {chunk.strip()!r}", lineno)
        jumps.append((_parse_real(toks[0], lineno), _parse_real(toks[1], lineno)))
    locs = [a for a, _ in jumps]
    if any(b <= a for a, b in zip(locs, locs[1:])):
        raise ProblemFormatError("jump locations not increasing", lineno)
    return StepFn(tuple(jumps))


def parse_problem(text: str) -> Problem:
    fields = {}
    growth = {"plus": GrowthTag("plus"), "minus": GrowthTag("minus")}
    domain = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key == "domain":
            toks = rest.split()
            if len(toks) != 2:
                raise ProblemFormatError("domain needs two numbers", lineno)
            a, b = (_parse_real(t, lineno) for t in toks)
            if not a < b:
                raise ProblemFormatError("domain must satisfy a < b", lineno)
            domain = (a, b)
        elif key in ("p", "Q.ac", "s", "r"):
            if key in fields:
                raise ProblemFormatError(f"{key} defined twice", lineno)
            fields[key] = _parse_piecewise(rest, lineno)
        elif key == "Q.jump":
            fields[key] = _parse_jumps(rest, lineno)
        elif key == "p.growth":
            toks = rest.split()
            if not toks or toks[0] not in ("plus", "minus"):
                raise ProblemFormatError("p.growth needs 'plus' or 'minus'", lineno)
            growth[toks[0]] = _parse_growth(toks[0], toks[1:], lineno)
        else:
            raise ProblemFormatError(f"unknown key {key!r}", lineno)
    if domain is None:
        raise ProblemFormatError("missing 'domain' line")
    if "p" not in fields:
        raise ProblemFormatError("missing 'p' line")
    coeffs = CoefficientSet(
        p=fields["p"],
        q_ac=fields.get("Q.ac", PiecewiseFn.constant(0.0)),
        q_jump=fields.get("Q.jump", StepFn()),
        s=fields.get("s", PiecewiseFn.constant(0.0)),
        r=fields.get("r", PiecewiseFn.constant(0.0)),
        p_growth=(growth["plus"], growth["minus"]),
    )
    return Problem(coeffs, domain)


def load_problem(path) -> Problem:
    """Read a problem file; see README for the format."""
    return parse_problem(Path(path).read_text(encoding="utf-8"))


def dump_problem(problem: Problem) -> str:
    c = problem.coeffs
    lines = [
        f"domain {problem.domain[0]!r} {problem.domain[1]!r}",
        f"p piecewise {c.p.to_text()}",
    ]
    for tag in c.p_growth:
        lines.append(f"p.growth {tag.direction} {tag.to_text()}")
    lines.append(f"Q.ac piecewise {c.q_ac.to_text()}")
    if c.q_jump.jumps:
        lines.append("Q.jump " + " ; ".join(f"{a!r} {h!r}" for a, h in c.q_jump.jumps))
    lines.append(f"s piecewise {c.s.to_text()}")
    lines.append(f"r piecewise {c.r.to_text()}")
    return "\n".join(lines) + "\n"


def save_problem(problem: Problem, path):
    Path(path).write_text(dump_problem(problem), encoding="utf-8")


# ------------------------------------------------------------ local integrability

def _probe_singularity(f, lo, hi, x_star, points, n_doublings=16):
    """Nested-exclusion partial integrals of f over [lo, hi] minus (x*-eps, x*+eps).

    eps halves at every step. Returns the list of partial integrals.
    """
    width = max(x_star - lo, hi - x_star)
    partials = []
    for k in range(1, n_doublings + 1):
        eps = width * 2.0 ** -k
        total = 0.0
        for a, b in ((lo, x_star - eps), (x_star + eps, hi)):
            if b > a:
                res = integrate(f, a, b, points, rel=1e-9, abs_tol=1e-12, max_intervals=2000)
                total += float(np.real(res.value))
        partials.append(total)
        if total > OVERFLOW:
            break
    return partials


def classify_partials(partials):
    """'divergent', 'convergent' or 'unclear' from nested-exclusion partial sums.

    Increments of a convergent |x|^-a singularity (a < 1) shrink by 2^(a-1) per
    halving of the excluded radius; a logarithmic or stronger divergence keeps
    them from shrinking.
    """
    if partials and partials[-1] > OVERFLOW:
        return "divergent"
    inc = np.diff(partials)
    if inc.size < 4:
        return "unclear"
    last = inc[-4:]
    scale = max(abs(partials[-1]), 1e-300)
    if np.all(np.abs(last) <= 1e-10 * scale):
        return "convergent"
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = last[1:] / last[:-1]
    if np.all(ratios >= 0.97):
        return "divergent"
    if np.all(np.abs(ratios) <= 0.9):
        return "convergent"
    return "unclear"


def validate_local_integrability(c: CoefficientSet, window, n_samples=2001) -> ConditionReport:
    """Estimate the local integrals behind the standing assumptions on a window.

    Checks finiteness of int 1/|p|, int Q^2/|p|, int r^2/|p| and int |s|
    by adaptive quadrature split at every declared breakpoint. An integral that
    fails to converge is probed by excluding a shrinking neighbourhood of the
    offending point: a clear divergence gives ``violated``, anything else
    ``inconclusive``.
    """
    a, b = map(float, window)
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise ValueError("window must be finite with a < b")
    pts = c.breakpoints(a, b)

    def inv_p(x):
        with np.errstate(divide="ignore", invalid="ignore"):
            return 1.0 / np.abs(c.p(x))

    def q2_p(x):
        with np.errstate(divide="ignore", invalid="ignore"):
            return c.Q(x) ** 2 / np.abs(c.p(x))

    def r2_p(x):
        with np.errstate(divide="ignore", invalid="ignore"):
            return c.r(x) ** 2 / np.abs(c.p(x))

    def abs_s(x):
        return np.abs(c.s(x))

    evidence = []
    verdicts = []
    notes = []
    for label, f in (("int_inv_abs_p", inv_p), ("int_Q2_over_abs_p", q2_p),
                     ("int_r2_over_abs_p", r2_p), ("int_abs_s", abs_s)):
        x_star = None
        try:
            res = integrate(f, a, b, pts, rel=1e-10, abs_tol=1e-13)
            if res.converged and abs(res.value) < OVERFLOW:
                evidence.append((label, float(np.real(res.value))))
                verdicts.append(Verdict.SATISFIED)
                continue
            lo_w, hi_w = res.worst
            edges = [a, *pts, b]
            if lo_w in edges:
                x_star = lo_w
            elif hi_w in edges:
                x_star = hi_w
            else:
                x_star = 0.5 * (lo_w + hi_w)
        except NonFiniteIntegrand as exc:
            x_star = exc.x
        partials = _probe_singularity(f, a, b, x_star, pts)
        kind = classify_partials(partials)
        evidence.append((label, float(partials[-1])))
        evidence.append((f"{label}_singular_point", float(x_star)))
        for k, val in enumerate(partials[-4:], start=len(partials) - min(4, len(partials)) + 1):
            evidence.append((f"{label}_partial_{k}", float(val)))
        if kind == "divergent":
            verdicts.append(Verdict.VIOLATED)
            notes.append(f"{label} diverges near x = {x_star:.12g}")
        elif kind == "convergent":
            verdicts.append(Verdict.SATISFIED)
            notes.append(f"{label} has an integrable singularity near x = {x_star:.12g}")
        else:
            verdicts.append(Verdict.INCONCLUSIVE)
            notes.append(f"{label}: quadrature failed near x = {x_star:.12g}")

    xs = np.unique(np.concatenate([np.linspace(a, b, n_samples), pts]))
    pv = c.p(xs)
    signs = np.sign(pv)
    nz = signs[signs != 0]
    evidence.append(("p_min_abs_sample", float(np.min(np.abs(pv)))))
    evidence.append(("p_sign_changes", float(np.count_nonzero(np.diff(nz) != 0))))
    evidence.append(("inv_p_nonzero_at_samples", bool(np.all(np.isfinite(pv)))))
    notes.append("1/p != 0 a.e. is only checked at sample points")

    if Verdict.VIOLATED in verdicts:
        verdict = Verdict.VIOLATED
    elif Verdict.INCONCLUSIVE in verdicts:
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.SATISFIED
    return ConditionReport("gmm", verdict, evidence, "; ".join(notes))

