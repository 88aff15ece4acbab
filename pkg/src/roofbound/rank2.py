"""Rank-two convex roofs from the zero simplex.

The mixture rho(p) = p |psi_i><psi_i| + (1-p) |psi_f><psi_f| sits on the
Bloch axis at r_z = 2p - 1.  If the hull of the zero states meets the axis in
[p_min, p_max], every rho(p) inside is a zero-measure mixture and outside it
the measure interpolates linearly towards the pole state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measures import MeasureSpec, eval_E
from .numerics import AxisInterval, axis_interval, lower_convex_envelope
from .zero_simplex import BothOrderingsZero, ZeroSimplex, solve

ENDPOINT_TOL = 1e-12

SURVIVOR_I = "survivor_i"
SURVIVOR_F = "survivor_f"
BOTH_REMOVED = "both_removed"
NO_INTERSECTION = "no_intersection"


RoofInterval = AxisInterval


@dataclass(frozen=True)
class SurvivorOutcome:
    kind: str
    surviving_state: np.ndarray | None
    reduced_weight: float  # fraction of the normalized rank-two block
    bound_value: float
    interval: RoofInterval | None = None
    simplex: ZeroSimplex | None = None


def interval(zs: ZeroSimplex) -> RoofInterval | None:
    return axis_interval(zs.axis_points)


def survivor_weights(p_i: float, iv: RoofInterval) -> tuple[str, float]:
    """Which pole survives and with what share of the normalized block."""
    if p_i > iv.p_max + ENDPOINT_TOL:
        return SURVIVOR_I, (p_i - iv.p_max) / (1 - iv.p_max)
    if p_i < iv.p_min - ENDPOINT_TOL:
        return SURVIVOR_F, 1 - p_i / iv.p_min
    return BOTH_REMOVED, 0.0


def reduced_weight_unnormalized(lam_i: float, lam_f: float, iv: RoofInterval) -> tuple[str, float]:
    """Survivor weight written directly in the ensemble weights lam_i, lam_f."""
    p_i = lam_i / (lam_i + lam_f)
    kind, _ = survivor_weights(p_i, iv)
    if kind == SURVIVOR_F:
        return kind, lam_f - lam_i * (1 - iv.p_min) / iv.p_min
    if kind == SURVIVOR_I:
        return kind, lam_i - lam_f * iv.p_max / (1 - iv.p_max)
    return kind, 0.0


def bound_rank2(
    psi_i, psi_f, p_i: float, measure: MeasureSpec, zs: ZeroSimplex | None = None
) -> SurvivorOutcome:
    """Convex-roof value of p_i |psi_i><psi_i| + (1 - p_i) |psi_f><psi_f|.

    ``no_intersection`` leaves bound_value as NaN; the off-axis construction
    in :mod:`roofbound.peeling` resolves it.
    """
    if not 0 <= p_i <= 1:
        raise ValueError("p_i must lie in [0, 1]")
    if zs is None:
        try:
            zs = solve(psi_i, psi_f, measure)
        except BothOrderingsZero:
            return SurvivorOutcome(BOTH_REMOVED, None, 0.0, 0.0)
    iv = interval(zs)
    if iv is None:
        return SurvivorOutcome(NO_INTERSECTION, None, float("nan"), float("nan"), None, zs)
    kind, w = survivor_weights(p_i, iv)
    if kind == SURVIVOR_I:
        return SurvivorOutcome(kind, zs.psi_i, w, w * eval_E(measure, zs.psi_i), iv, zs)
    if kind == SURVIVOR_F:
        return SurvivorOutcome(kind, zs.psi_f, w, w * eval_E(measure, zs.psi_f), iv, zs)
    return SurvivorOutcome(BOTH_REMOVED, None, 0.0, 0.0, iv, zs)


def characteristic_curve(psi_i, psi_f, steps: int, measure: MeasureSpec):
    """Rank-two bound on a uniform grid of p, plus its lower convex envelope.

    Grid points without an axis intersection are reported as NaN and left out
    of the envelope.
    """
    if steps < 2:
        raise ValueError("steps must be at least 2")
    ps = np.linspace(0.0, 1.0, steps)
    try:
        zs = solve(psi_i, psi_f, measure)
    except BothOrderingsZero:
        zs = None
    raw = []
    for p in ps:
        if zs is None:
            raw.append(0.0)
        else:
            raw.append(bound_rank2(psi_i, psi_f, float(p), measure, zs).bound_value)
    raw = np.array(raw)
    ok = np.isfinite(raw)
    conv = np.full_like(raw, np.nan)
    if ok.sum() >= 2:
        env = lower_convex_envelope(list(zip(ps[ok], raw[ok])))
        conv[ok] = [v for _, v in env]
    return list(zip(ps.tolist(), raw.tolist(), conv.tolist()))
