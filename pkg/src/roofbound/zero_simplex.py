"""Zeros of a measure along the superposition line of two orthogonal states.

For a pair (psi_i, psi_f) the states psi_i + z psi_f on which the invariant
vanishes are the roots of a degree-D polynomial in z.  Each root is mapped to
a point of the Bloch sphere spanned by the pair, with psi_i at the north pole.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measures import MeasureSpec, eval_E
from .numerics import AxisPoint, CPoly, IdenticallyZero, RootSet, poly_from_samples, poly_roots

INF = complex("inf")


class BothOrderingsZero(ValueError):
    """The invariant vanishes on every superposition of the pair."""


class NotOrthogonal(ValueError):
    pass


@dataclass(frozen=True)
class BlochPoint:
    theta: float
    phi: float

    @classmethod
    def from_p(cls, p: float, phi: float = 0.0) -> "BlochPoint":
        return cls(math.acos(min(1.0, max(-1.0, 2 * p - 1))), phi % (2 * math.pi))

    @property
    def p(self) -> float:
        return (1 + math.cos(self.theta)) / 2

    @property
    def r(self) -> np.ndarray:
        s = 2 * math.sqrt(max(self.p * (1 - self.p), 0.0))
        return np.array([s * math.cos(self.phi), s * math.sin(self.phi), 2 * self.p - 1])


@dataclass(frozen=True)
class ZeroSimplex:
    psi_i: np.ndarray
    psi_f: np.ndarray
    poly: CPoly
    roots: RootSet
    axis_points: tuple[AxisPoint, ...]
    zero_states: tuple[np.ndarray, ...]
    both_deficient: bool = False  # roots at 0 and at infinity at the same time

    @property
    def all_roots(self) -> list[complex]:
        return list(self.roots.finite_roots) + [INF] * self.roots.infinite_count

    @property
    def bloch_vectors(self) -> np.ndarray:
        return np.array([axis_bloch_vector(a) for a in self.axis_points])


def axis_point(z0: complex) -> AxisPoint:
    if z0 == INF or not np.isfinite(z0):
        return AxisPoint(0j, 0.0)
    p = 1 / (1 + abs(z0) ** 2)
    return AxisPoint(complex(p * z0), float(p))


def axis_bloch_vector(a: AxisPoint) -> np.ndarray:
    return np.array([2 * a.Z.real, 2 * a.Z.imag, 2 * a.p - 1])


def zero_state(psi_i, psi_f, z0: complex) -> np.ndarray:
    psi_i = np.asarray(psi_i, dtype=complex)
    psi_f = np.asarray(psi_f, dtype=complex)
    if z0 == INF or not np.isfinite(z0):
        return psi_f.copy()
    return (psi_i + z0 * psi_f) / math.sqrt(1 + abs(z0) ** 2)


def bloch_state(psi_i, psi_f, b: BlochPoint) -> np.ndarray:
    p = b.p
    return math.sqrt(p) * np.asarray(psi_i, complex) + math.sqrt(1 - p) * np.exp(
        1j * b.phi
    ) * np.asarray(psi_f, complex)


def line_polynomial(psi_i, psi_f, measure: MeasureSpec) -> CPoly:
    """The invariant of psi_i + z psi_f as a polynomial in z."""
    psi_i = np.asarray(psi_i, dtype=complex)
    psi_f = np.asarray(psi_f, dtype=complex)
    return poly_from_samples(lambda z: measure.invariant(psi_i + z * psi_f), measure.degree)


def _reciprocal_refine(roots: RootSet, c: np.ndarray) -> RootSet:
    # large roots are better conditioned as small roots of the swapped ordering
    if not any(abs(z) > 1 for z in roots.finite_roots):
        return roots
    try:
        swapped = poly_roots(CPoly(c[::-1].copy()))
    except IdenticallyZero:
        return roots
    small = [z for z in roots.finite_roots if abs(z) <= 1]
    big = [w for w in swapped.finite_roots if abs(w) < 1 - 1e-9 and w != 0]
    if len(small) + len(big) + roots.infinite_count != len(c) - 1:
        return roots
    merged = small + [1 / w for w in big]
    merged.sort(key=lambda v: (round(v.real, 12), round(v.imag, 12)))
    return RootSet(tuple(merged), roots.infinite_count)


def solve(psi_i, psi_f, measure: MeasureSpec, ortho_tol: float = 1e-6) -> ZeroSimplex:
    """All D zeros of the measure on the line psi_i + z psi_f.

    Degree deficits are recorded as roots at infinity, i.e. the state psi_f
    itself.  Raises ``BothOrderingsZero`` when the whole line is a zero line.
    """
    psi_i = np.asarray(psi_i, dtype=complex)
    psi_f = np.asarray(psi_f, dtype=complex)
    if abs(np.vdot(psi_i, psi_f)) > ortho_tol:
        raise NotOrthogonal("zero-simplex pair must be orthogonal")
    poly = line_polynomial(psi_i, psi_f, measure)
    c = np.asarray(poly.coefficients)
    # the invariant is O(1) on normalized states; below this the line is a zero line
    if np.abs(c).max() < 1e-13:
        raise BothOrderingsZero("invariant vanishes on the whole line")
    roots = _reciprocal_refine(poly_roots(poly), c)
    has_zero = any(z == 0 for z in roots.finite_roots)
    axis = tuple(axis_point(z) for z in list(roots.finite_roots) + [INF] * roots.infinite_count)
    states = tuple(
        zero_state(psi_i, psi_f, z)
        for z in list(roots.finite_roots) + [INF] * roots.infinite_count
    )
    return ZeroSimplex(
        psi_i, psi_f, poly, roots, axis, states, both_deficient=has_zero and roots.infinite_count > 0
    )


def max_zero_state_E(zs: ZeroSimplex, measure: MeasureSpec) -> float:
    return max(eval_E(measure, s) for s in zs.zero_states)
