"""Shared oracles and helpers for the test suite."""
import math
from pathlib import Path

from slq.coeffs import GrowthTag

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"


def tags(kind="power", param=0.0):
    return (GrowthTag("plus", kind, param), GrowthTag("minus", kind, param))


def delta_oracle(height=10.0, x0=0.5):
    """First Dirichlet eigenvalue of -u'' + height*delta(x - x0) u on [0, 1].

    For lam = k^2 with u = sin(kx) left of x0 and B sin(k(1 - x)) right of it,
    matching u and the slope jump gives k cos(k x0) sin(k(1-x0))
    + k sin(k x0) cos(k(1-x0)) + height sin(k x0) sin(k(1-x0)) = 0.
    The first root lies in (pi, 2 pi) for x0 = 0.5; plain bisection.
    """
    def g(k):
        a, b = k * x0, k * (1 - x0)
        return k * math.sin(a + b) + height * math.sin(a) * math.sin(b)

    lo, hi = math.pi + 1e-9, 2 * math.pi - 1e-9
    assert g(lo) * g(hi) < 0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if (g(lo) > 0) == (g(mid) > 0):
            lo = mid
        else:
            hi = mid
    return (0.5 * (lo + hi)) ** 2
