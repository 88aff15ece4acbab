"""Upper bounds on convex-roof entanglement measures built from SL-invariant polynomials."""

from .measures import CONCURRENCE, MEASURES, TAU3, MeasureSpec, eval_E, wootters_concurrence
from .peeling import BoundResult, Ensemble, PeelConfig, decompose, peel, upper_bound
from .rank2 import bound_rank2, characteristic_curve
from .zero_simplex import ZeroSimplex, solve

__all__ = [
    "CONCURRENCE",
    "MEASURES",
    "TAU3",
    "MeasureSpec",
    "eval_E",
    "wootters_concurrence",
    "BoundResult",
    "Ensemble",
    "PeelConfig",
    "decompose",
    "peel",
    "upper_bound",
    "bound_rank2",
    "characteristic_curve",
    "ZeroSimplex",
    "solve",
]
