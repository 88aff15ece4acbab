"""Transverse-field Ising chain H = sum_i (2 lam S^x_i S^x_{i+1} + S^z_i).

Ground-state correlations in the thermodynamic limit come from the
free-fermion solution: with Hermitian Majoranas a_{2j} = (string) sigma^x_j,
a_{2j+1} = (string) sigma^y_j, the only non-trivial contraction is

    <a_{2j+1} a_{2l}> = i (-1)^(l-j) G(l-j),

and any Pauli string on three adjacent sites is a Majorana monomial whose
expectation is a Pfaffian of contractions.  The alternating sign reflects the
antiferromagnetic sign of the coupling; it is pinned by the exact
diagonalization oracle in the test suite.
"""

from __future__ import annotations

import functools
import itertools
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .measures import TAU3, MeasureSpec
from .numerics import eig_hermitian, pfaffian, quad_0_pi
from .peeling import PeelConfig, decompose, peel

logger = logging.getLogger(__name__)

WINDOW = 3
LABELS = "Ixyz"
PAULI = {
    "I": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class BadLabel(ValueError):
    pass


class NotPositive(ValueError):
    pass


class TooLarge(ValueError):
    pass


@dataclass(frozen=True)
class IsingParams:
    lam: float

    def __post_init__(self):
        if not (self.lam >= 0 and math.isfinite(self.lam)):
            raise ValueError(f"lambda must be a finite non-negative number, got {self.lam}")


@dataclass(frozen=True)
class CorrelatorTable:
    lam: float
    g: dict[int, float]


@dataclass(frozen=True)
class PauliTriple:
    labels: tuple[str, str, str]
    value: float


def _lam(params) -> float:
    return IsingParams(float(getattr(params, "lam", params))).lam


def g_function(params, r: int, tol: float = 1e-10) -> float:
    """G(R) = (1/pi) int_0^pi [cos kR (1 + lam cos k) + lam sin k sin kR] / Lambda(k) dk."""
    lam = _lam(params)
    if lam == 0:
        return 1.0 if r == 0 else 0.0

    # 1 + lam cos k and Lambda^2 both cancel near k = pi, lam = 1; the
    # half-angle forms below do not
    def integrand(k):
        c2 = math.cos(k / 2) ** 2
        num = math.cos(k * r) * ((1 - lam) + 2 * lam * c2) + lam * math.sin(k) * math.sin(k * r)
        lam2 = (1 - lam) ** 2 + 4 * lam * c2
        if lam2 == 0:
            return 0.0  # k = pi at lam = 1, where the integrand tends to cos(pi (r - 1/2)) = 0
        return num / math.sqrt(lam2)

    return quad_0_pi(integrand, tol) / math.pi


@functools.lru_cache(maxsize=512)
def _table(lam: float) -> CorrelatorTable:
    return CorrelatorTable(lam, {r: g_function(lam, r) for r in range(-(WINDOW + 1), WINDOW + 2)})


def correlator_table(params) -> CorrelatorTable:
    return _table(_lam(params))


def contraction(lam: float, m: int, n: int) -> complex:
    """<a_m a_n> for distinct Majorana indices."""
    if m % 2 == n % 2:
        return 0j
    if m % 2 == 1:  # <a_{2j+1} a_{2l}>
        j, l = m // 2, n // 2
        return 1j * (-1) ** (l - j) * _table(lam).g[l - j]
    return -contraction(lam, n, m)


# ---------------------------------------------------------------------------
# Pauli -> Majorana rewriting


def _canonical(coef: complex, ops: list[int]) -> tuple[complex, tuple[int, ...]]:
    """Sort a Majorana product, tracking anticommutation signs and a_m^2 = 1."""
    ops = list(ops)
    changed = True
    while changed:
        changed = False
        for i in range(len(ops) - 1):
            if ops[i] > ops[i + 1]:
                ops[i], ops[i + 1] = ops[i + 1], ops[i]
                coef = -coef
                changed = True
            elif ops[i] == ops[i + 1]:
                del ops[i : i + 2]
                changed = True
                break
    return coef, tuple(ops)


def _site_monomial(label: str, j: int) -> tuple[complex, list[int]]:
    string_coef, string_ops = 1 + 0j, []
    for l in range(j):  # sigma^z_l = -i a_{2l} a_{2l+1}
        string_coef *= -1j
        string_ops += [2 * l, 2 * l + 1]
    if label == "I":
        return 1 + 0j, []
    if label == "z":
        return -1j, [2 * j, 2 * j + 1]
    if label == "x":
        return string_coef, string_ops + [2 * j]
    if label == "y":
        return string_coef, string_ops + [2 * j + 1]
    raise BadLabel(label)


@functools.lru_cache(maxsize=None)
def majorana_form(labels: tuple[str, ...]) -> tuple[complex, tuple[int, ...]]:
    """Pauli string on consecutive window sites as coefficient times sorted Majoranas.

    Strings extending to the left of the window cancel pairwise when the
    number of x/y labels is even; odd strings have zero expectation anyway.
    """
    coef, ops = 1 + 0j, []
    for j, lab in enumerate(labels):
        if lab not in LABELS:
            raise BadLabel(lab)
        c, o = _site_monomial(lab, j)
        coef *= c
        ops += o
    return _canonical(coef, ops)


def pauli_triple(params, a: str, b: str, c: str) -> PauliTriple:
    lam = _lam(params)
    labels = (a, b, c)
    for lab in labels:
        if lab not in LABELS:
            raise BadLabel(lab)
    if sum(lab in "xy" for lab in labels) % 2:
        return PauliTriple(labels, 0.0)
    coef, ops = majorana_form(labels)
    if not ops:
        return PauliTriple(labels, float(coef.real))
    if len(ops) % 2:
        return PauliTriple(labels, 0.0)
    n = len(ops)
    m = np.zeros((n, n), complex)
    for i in range(n):
        for k in range(i + 1, n):
            m[i, k] = contraction(lam, ops[i], ops[k])
            m[k, i] = -m[i, k]
    value = coef * pfaffian(m)
    if abs(value.imag) > 1e-9:
        raise RuntimeError(f"non-real expectation for {labels}: {value}")
    return PauliTriple(labels, float(value.real))


def rdm3(params) -> np.ndarray:
    """Reduced density matrix of three adjacent sites from the 64 Pauli expectations."""
    lam = _lam(params)
    rho = np.zeros((8, 8), complex)
    for a, b, c in itertools.product(LABELS, repeat=3):
        v = pauli_triple(lam, a, b, c).value
        if v != 0:
            rho += v * np.kron(np.kron(PAULI[a], PAULI[b]), PAULI[c])
    rho /= 8
    rho = (rho + rho.conj().T) / 2
    eig = eig_hermitian(rho)
    low = eig.values[0]
    if low < -1e-6:
        raise NotPositive(f"rdm eigenvalue {low:.3g} at lambda={lam}")
    if low < 0:
        logger.debug("clipping rdm eigenvalue %.3g at lambda=%g", low, lam)
        vals = np.clip(eig.values, 0, None)
        rho = (eig.vectors * vals) @ eig.vectors.conj().T
        rho /= np.trace(rho).real
    return rho


def expectation(rho, labels) -> float:
    op = PAULI[labels[0]]
    for lab in labels[1:]:
        op = np.kron(op, PAULI[lab])
    return float(np.trace(rho @ op).real)


# ---------------------------------------------------------------------------
# exact diagonalization oracle


def ed_oracle(n_sites: int, params, max_sites: int = 12) -> np.ndarray:
    """Three-site RDM of the periodic N-site chain, even parity sector ground state."""
    import scipy.sparse as sp
    import scipy.sparse.linalg as sla

    lam = _lam(params)
    if n_sites > max_sites:
        raise TooLarge(f"N={n_sites} exceeds {max_sites}")
    if n_sites < 4 or n_sites % 2:
        raise ValueError("N must be even and at least 4")
    n = n_sites
    dim = 2**n
    idx = np.arange(dim)
    bits = (idx[:, None] >> (n - 1 - np.arange(n))) & 1  # site 0 is the most significant bit
    sz = 1 - 2 * bits
    even = np.nonzero(np.prod(sz, axis=1) == 1)[0]
    pos = np.full(dim, -1)
    pos[even] = np.arange(len(even))
    rows, cols, vals = [], [], []
    for j in range(n):
        k = (j + 1) % n
        flip = (1 << (n - 1 - j)) | (1 << (n - 1 - k))
        rows.append(np.arange(len(even)))
        cols.append(pos[even ^ flip])
        vals.append(np.full(len(even), lam / 2))
    h = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(len(even),) * 2
    ).tocsr() + sp.diags(0.5 * sz[even].sum(axis=1).astype(float))
    if len(even) <= 64:
        w, v = np.linalg.eigh(h.toarray())
        gs = v[:, 0]
    else:
        w, v = sla.eigsh(h, k=1, which="SA", v0=np.ones(len(even)), tol=1e-13)
        gs = v[:, 0]
    psi = np.zeros(dim)
    psi[even] = gs
    t = psi.reshape(8, -1)
    rho = t @ t.conj().T
    return rho / np.trace(rho)


# ---------------------------------------------------------------------------
# sweep


@dataclass(frozen=True)
class SweepRecord:
    lam: float
    upper_bound: float
    six_smallest_sum: float
    five_smallest_sum: float
    eigenvalues: tuple[float, ...]
    hint_more_states: bool


def _sweep_point(args) -> SweepRecord:
    lam, measure, config = args
    rho = rdm3(lam)
    ev = eig_hermitian(rho).values
    res = peel(decompose(rho), measure, config)
    return SweepRecord(
        float(lam), res.value, float(ev[:6].sum()), float(ev[:5].sum()), tuple(float(v) for v in ev), res.hint_more_states
    )


def default_workers() -> int:
    env = os.environ.get("ROOFBOUND_THREADS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("ROOFBOUND_THREADS must be a positive integer")
        return n
    return os.cpu_count() or 1


def sweep(lambda_grid, measure: MeasureSpec = TAU3, config: PeelConfig = PeelConfig(), workers: int | None = None) -> list[SweepRecord]:
    grid = [float(x) for x in lambda_grid]
    if not grid:
        raise ValueError("empty lambda grid")
    workers = default_workers() if workers is None else workers
    jobs = [(lam, measure, config) for lam in grid]
    if workers <= 1 or len(grid) == 1:
        return [_sweep_point(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_point, jobs))


def default_grid(start: float = 0.05, end: float = 3.0, steps: int = 60) -> np.ndarray:
    return np.linspace(start, end, steps)
