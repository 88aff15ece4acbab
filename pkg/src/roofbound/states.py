"""Three-qubit benchmark states and their ensembles."""

from __future__ import annotations

import math

import numpy as np

from .peeling import Ensemble

OMEGA = np.exp(2j * np.pi / 3)


class UnknownName(ValueError):
    pass


class BadProbability(ValueError):
    pass


def ket(bits: str) -> np.ndarray:
    v = np.zeros(2 ** len(bits), complex)
    v[int(bits, 2)] = 1
    return v


def _normalized(v) -> np.ndarray:
    v = np.asarray(v, complex)
    return v / np.linalg.norm(v)


def w_phase(k: int) -> np.ndarray:
    """(|001> + w^k |010> + w^2k |100>)/sqrt(3) with w a primitive cube root of unity."""
    return _normalized(ket("001") + OMEGA**k * ket("010") + OMEGA ** (2 * k) * ket("100"))


def w_bar_phase(k: int) -> np.ndarray:
    """Bit-flipped analogue of :func:`w_phase` in the two-excitation sector."""
    return _normalized(ket("110") + OMEGA**k * ket("101") + OMEGA ** (2 * k) * ket("011"))


def make_pure(name: str, k: int = 0, bits: str | None = None) -> np.ndarray:
    if name == "ghz_plus" or name == "ghz":
        return _normalized(ket("000") + ket("111"))
    if name == "ghz_minus":
        return _normalized(ket("000") - ket("111"))
    if name == "w":
        return w_phase(0)
    if name == "w_phase":
        return w_phase(k)
    if name == "w_bar_phase":
        return w_bar_phase(k)
    if name == "phi":
        return _normalized(sum(ket(b) for b in ("001", "010", "011", "100", "101", "110")))
    if name == "basis":
        if bits is None or set(bits) - {"0", "1"}:
            raise UnknownName("basis state needs a bit string")
        return ket(bits)
    raise UnknownName(f"unknown state {name!r}")


def _check_p(p: float):
    if not 0 <= p <= 1:
        raise BadProbability(f"p={p} outside [0, 1]")


def w_like_ensemble(p: float, basis: str = "ghz") -> Ensemble:
    """p |phi><phi| + (1-p)/2 (|000><000| + |111><111|), in either eigenbasis of the pair."""
    _check_p(p)
    if basis == "product":
        pair = [ket("000"), ket("111")]
    elif basis == "ghz":
        pair = [make_pure("ghz_plus"), make_pure("ghz_minus")]
    else:
        raise UnknownName(f"unknown W-like basis {basis!r}")
    q = (1 - p) / 2
    return Ensemble.from_unsorted([q, q, p], pair + [make_pure("phi")], f"wlike/{basis}")


def ghz_werner_ensemble(p: float, basis: str = "w_phase") -> Ensemble:
    """p |GHZ><GHZ| + (1-p)/8 * identity.

    The seven-fold degenerate complement of GHZ+ is spanned either by GHZ-
    and the six computational kets with mixed bits (``product``), or by GHZ-
    and the cube-root phased W states of both excitation sectors
    (``w_phase``).
    """
    _check_p(p)
    if basis == "product":
        cluster = [make_pure("ghz_minus")] + [
            ket(b) for b in ("001", "010", "100", "110", "101", "011")
        ]
    elif basis == "w_phase":
        cluster = (
            [make_pure("ghz_minus")]
            + [w_phase(k) for k in range(3)]
            + [w_bar_phase(k) for k in range(3)]
        )
    else:
        raise UnknownName(f"unknown GHZ-Werner basis {basis!r}")
    q = (1 - p) / 8
    return Ensemble.from_unsorted([q] * 7 + [p + q], cluster + [make_pure("ghz_plus")], f"ghzwerner/{basis}")


def ghz_werner_matrix(p: float) -> np.ndarray:
    g = make_pure("ghz_plus")
    return p * np.outer(g, g.conj()) + (1 - p) / 8 * np.eye(8)


def w_like_matrix(p: float) -> np.ndarray:
    phi = make_pure("phi")
    rho = p * np.outer(phi, phi.conj())
    rho[0, 0] += (1 - p) / 2
    rho[7, 7] += (1 - p) / 2
    return rho
