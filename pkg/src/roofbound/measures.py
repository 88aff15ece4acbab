"""Polynomial SL-invariant entanglement measures on pure qubit states.

States are plain complex numpy vectors of length 2**n, indexed
most-significant-qubit first (|abc> -> 4a + 2b + c).  Every measure is used
at effective homogeneous degree two, E = (c |P|)^(2/D), so that it scales
with the squared norm of the state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .numerics import eig_hermitian


class WrongQubitCount(ValueError):
    pass


class InvalidDensityMatrix(ValueError):
    pass


def n_qubits(psi) -> int:
    dim = np.shape(psi)[-1]
    n = int(round(np.log2(dim)))
    if dim < 2 or 2**n != dim:
        raise WrongQubitCount(f"length {dim} is not a power of two")
    return n


@dataclass(frozen=True)
class MeasureSpec:
    name: str
    n_qubits: int
    degree: int
    invariant: Callable[[np.ndarray], complex]
    prefactor: float

    def __post_init__(self):
        if self.degree <= 0 or self.degree % 2:
            raise ValueError("degree must be a positive even integer")
        if self.prefactor <= 0:
            raise ValueError("prefactor must be positive")


def tau3_invariant(psi) -> complex:
    """Cayley hyperdeterminant of the 2x2x2 amplitude tensor.

    Accepts a batch with the amplitude index last.
    """
    a = np.asarray(psi, dtype=complex)
    if a.shape[-1] != 8:
        raise WrongQubitCount("three-tangle needs three qubits")
    a = np.moveaxis(a, -1, 0)
    d1 = a[0] ** 2 * a[7] ** 2 + a[1] ** 2 * a[6] ** 2 + a[2] ** 2 * a[5] ** 2 + a[4] ** 2 * a[3] ** 2
    d2 = (
        a[0] * a[7] * (a[3] * a[4] + a[5] * a[2] + a[6] * a[1])
        + a[3] * a[4] * a[5] * a[2]
        + a[3] * a[4] * a[6] * a[1]
        + a[5] * a[2] * a[6] * a[1]
    )
    d3 = a[0] * a[6] * a[5] * a[3] + a[7] * a[1] * a[2] * a[4]
    return d1 - 2 * d2 + 4 * d3


def concurrence_invariant(psi) -> complex:
    a = np.asarray(psi, dtype=complex)
    if a.shape[-1] != 4:
        raise WrongQubitCount("concurrence needs two qubits")
    a = np.moveaxis(a, -1, 0)
    return a[0] * a[3] - a[1] * a[2]


TAU3 = MeasureSpec("tau3", 3, 4, tau3_invariant, 4.0)
CONCURRENCE = MeasureSpec("concurrence", 2, 2, concurrence_invariant, 2.0)

MEASURES = {m.name: m for m in (TAU3, CONCURRENCE)}


def eval_E(measure: MeasureSpec, psi) -> float:
    """Effective-degree-two value (c |P(psi)|)^(2/D); sqrt(tau3) for the three-tangle."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape[-1] != 2**measure.n_qubits:
        raise WrongQubitCount(f"{measure.name} needs {measure.n_qubits} qubits")
    value = measure.prefactor * np.abs(measure.invariant(psi))
    return value ** (2 / measure.degree)


def check_density_matrix(rho, tol: float = 1e-9) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidDensityMatrix("density matrix must be square")
    try:
        n_qubits(rho)
    except WrongQubitCount as exc:
        raise InvalidDensityMatrix(str(exc)) from None
    if not np.all(np.isfinite(rho)):
        raise InvalidDensityMatrix("non-finite entries")
    if np.abs(rho - rho.conj().T).max() > tol:
        raise InvalidDensityMatrix("not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise InvalidDensityMatrix("trace is not one")
    if eig_hermitian(rho).values[0] < -1e-8:
        raise InvalidDensityMatrix("not positive semidefinite")
    return rho


_FLIP = np.fliplr(np.diag([-1.0, 1.0, 1.0, -1.0]))  # sigma_y (x) sigma_y


def wootters_concurrence(rho) -> float:
    """Exact mixed-state concurrence of two qubits.

    The decreasing square roots s_i of the spectrum of rho * flip(rho) are the
    singular values of sqrt(rho) F conj(sqrt(rho)) with F = sigma_y (x) sigma_y,
    which avoids square roots of round-off sized eigenvalues.
    """
    rho = check_density_matrix(rho)
    if rho.shape != (4, 4):
        raise InvalidDensityMatrix("Wootters concurrence needs two qubits")
    eig = eig_hermitian(rho)
    sqrt_rho = (eig.vectors * np.sqrt(np.clip(eig.values, 0, None))) @ eig.vectors.conj().T
    s = np.linalg.svd(sqrt_rho @ _FLIP @ sqrt_rho.conj(), compute_uv=False)
    return float(max(0.0, s[0] - s[1] - s[2] - s[3]))
