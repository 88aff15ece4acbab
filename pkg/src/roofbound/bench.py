"""Bound curves for the benchmark families and where they stop vanishing."""

from __future__ import annotations

import numpy as np

from .measures import TAU3, MeasureSpec
from .numerics import lower_convex_envelope
from .peeling import PeelConfig, peel
from .states import ghz_werner_ensemble, w_like_ensemble

FAMILIES = {
    "wlike": (w_like_ensemble, ("ghz", "product")),
    "ghzwerner": (ghz_werner_ensemble, ("w_phase", "product")),
}


def family_bound(state: str, basis: str, p: float, measure: MeasureSpec = TAU3, config: PeelConfig = PeelConfig()) -> float:
    make, bases = FAMILIES[state]
    if basis not in bases:
        raise ValueError(f"basis {basis!r} not available for {state!r}")
    return peel(make(float(p), basis), measure, config).value


def curve(f, ps) -> list[tuple[float, float, float]]:
    """(p, raw, convexified) rows for a scalar bound function f on the grid ps."""
    ps = np.asarray(ps, float)
    raw = np.array([f(float(p)) for p in ps])
    env = lower_convex_envelope(list(zip(ps, raw)))
    return [(float(p), float(r), float(c)) for p, r, (_, c) in zip(ps, raw, env)]


def vanishing_threshold(f, rows, tol: float = 1e-10, xtol: float = 1e-10) -> float:
    """End of the zero region of the convexified curve.

    The envelope vanishes up to the largest zero of the raw curve; that grid
    bracket is then refined by bisection on f itself.
    """
    ps = np.array([r[0] for r in rows])
    raw = np.array([r[1] for r in rows])
    zeros = np.nonzero(raw <= tol)[0]
    if len(zeros) == 0:
        return float(ps[0])
    k = int(zeros[-1])
    if k == len(ps) - 1:
        return float(ps[-1])
    lo, hi = float(ps[k]), float(ps[k + 1])
    while hi - lo > xtol:
        mid = (lo + hi) / 2
        if f(mid) <= tol:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def affine_residual(rows, p0: float, end_value: float) -> float:
    """Largest deviation of the convexified curve from the line (p0, 0) -> (1, end_value) on p >= p0."""
    worst = 0.0
    for p, _, c in rows:
        line = 0.0 if p <= p0 else end_value * (p - p0) / (1 - p0)
        worst = max(worst, abs(c - line))
    return worst
