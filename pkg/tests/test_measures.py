import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from roofbound.measures import (
    CONCURRENCE,
    TAU3,
    InvalidDensityMatrix,
    MeasureSpec,
    WrongQubitCount,
    check_density_matrix,
    concurrence_invariant,
    eval_E,
    tau3_invariant,
    wootters_concurrence,
)
from roofbound.states import ket, make_pure

from _util import projector, random_state, random_unitary

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_tau3_values():
    assert eval_E(TAU3, make_pure("ghz")) == pytest.approx(1, abs=1e-12)
    assert eval_E(TAU3, make_pure("w")) == 0
    assert eval_E(TAU3, make_pure("phi")) == pytest.approx(1 / math.sqrt(3), abs=1e-12)
    assert eval_E(TAU3, ket("000")) == 0


def test_concurrence_values():
    bell = (ket("00") + ket("11")) / math.sqrt(2)
    assert eval_E(CONCURRENCE, bell) == pytest.approx(1)
    assert eval_E(CONCURRENCE, ket("01")) == 0
    assert eval_E(CONCURRENCE, np.full(4, 0.5)) == pytest.approx(0, abs=1e-16)


def test_eval_E_examples():
    assert eval_E(TAU3, np.zeros(8)) == 0
    assert eval_E(CONCURRENCE, np.zeros(4)) == 0
    assert eval_E(TAU3, 0.7 * make_pure("ghz")) == pytest.approx(0.49, abs=1e-12)


def test_wrong_qubit_count():
    with pytest.raises(WrongQubitCount):
        tau3_invariant(np.ones(4))
    with pytest.raises(WrongQubitCount):
        concurrence_invariant(np.ones(8))
    with pytest.raises(WrongQubitCount):
        eval_E(TAU3, np.ones(5))


def test_measure_spec_rejects_odd_degree():
    with pytest.raises(ValueError):
        MeasureSpec("odd", 2, 3, concurrence_invariant, 1.0)


@given(seeds, st.sampled_from([TAU3, CONCURRENCE]))
def test_homogeneity(seed, measure):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=2**measure.n_qubits) + 1j * rng.normal(size=2**measure.n_qubits)
    a = complex(rng.normal(), rng.normal())
    lhs = measure.invariant(a * psi)
    rhs = a**measure.degree * measure.invariant(psi)
    assert abs(lhs - rhs) <= 1e-10 * max(1, abs(rhs))
    assert eval_E(measure, a * psi) == pytest.approx(abs(a) ** 2 * eval_E(measure, psi), rel=1e-10, abs=1e-14)


@given(seeds, st.sampled_from([TAU3, CONCURRENCE]))
def test_local_unitary_invariance_and_range(seed, measure):
    rng = np.random.default_rng(seed)
    n = measure.n_qubits
    psi = random_state(rng, 2**n)
    u = random_unitary(rng, 2)
    for _ in range(n - 1):
        u = np.kron(u, random_unitary(rng, 2))
    e = eval_E(measure, psi)
    assert 0 <= e <= 1 + 1e-12
    assert eval_E(measure, u @ psi) == pytest.approx(e, abs=1e-10)


def test_wootters_examples():
    bell = (ket("00") + ket("11")) / math.sqrt(2)
    assert wootters_concurrence(projector(bell)) == pytest.approx(1, abs=1e-10)
    assert wootters_concurrence(np.eye(4) / 4) == pytest.approx(0, abs=1e-12)
    rho = 0.8 * projector(bell) + 0.2 * np.eye(4) / 4
    assert wootters_concurrence(rho) == pytest.approx(0.7, abs=1e-10)


@given(seeds)
def test_wootters_pure_matches_invariant(seed):
    psi = random_state(np.random.default_rng(seed), 4)
    assert wootters_concurrence(projector(psi)) == pytest.approx(eval_E(CONCURRENCE, psi), abs=1e-10)


def test_check_density_matrix():
    with pytest.raises(InvalidDensityMatrix):
        check_density_matrix(np.eye(4))  # trace 4
    with pytest.raises(InvalidDensityMatrix):
        check_density_matrix(np.diag([1.5, -0.5]))
    with pytest.raises(InvalidDensityMatrix):
        check_density_matrix(np.array([[0.5, 0.5], [0, 0.5]]))
    with pytest.raises(InvalidDensityMatrix):
        wootters_concurrence(np.eye(4))
