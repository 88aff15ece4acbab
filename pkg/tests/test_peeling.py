import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roofbound.measures import CONCURRENCE, TAU3, eval_E, wootters_concurrence
from roofbound.peeling import (
    EmptyEnsemble,
    Ensemble,
    PeelConfig,
    _w_of_hull_points,
    basis_candidates,
    decompose,
    degenerate_clusters,
    hull_membership_residual,
    off_axis,
    peel,
    robust_bound,
    robustify,
    upper_bound,
)
from roofbound.rank2 import interval
from roofbound.states import OMEGA, ghz_werner_ensemble, ghz_werner_matrix, make_pure, w_like_ensemble, w_phase
from roofbound.zero_simplex import solve

from _util import projector, random_density, random_orthogonal_pair, random_state

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def _contains_ray(states, psi, tol=1e-9):
    return any(abs(abs(np.vdot(s, psi)) - 1) < tol for s in states)


# ---------------------------------------------------------------- decompose


def test_decompose_examples():
    ens = decompose(projector(make_pure("ghz")))
    assert np.allclose(ens.weights, [1])
    ens = decompose(ghz_werner_matrix(0.5))
    assert np.allclose(ens.weights, [1 / 16] * 7 + [9 / 16], atol=1e-12)
    ens = decompose(np.eye(8) / 8)
    assert np.allclose(ens.weights, [1 / 8] * 8)


@given(seeds, st.integers(min_value=1, max_value=8))
def test_decompose_reconstructs(seed, rank):
    rho = random_density(np.random.default_rng(seed), 8, rank)
    ens = decompose(rho)
    assert len(ens) == rank
    assert np.all(np.diff(ens.weights) >= 0)
    assert abs(ens.weights.sum() - 1) < 1e-10
    assert np.abs(ens.density_matrix() - rho).max() < 1e-10


# ---------------------------------------------------------------- peel


def test_peel_pure_ghz():
    assert peel(decompose(projector(make_pure("ghz"))), TAU3).value == pytest.approx(1, abs=1e-10)


@given(seeds, st.sampled_from([TAU3, CONCURRENCE]))
def test_peel_pure_identity(seed, measure):
    psi = random_state(np.random.default_rng(seed), 2**measure.n_qubits)
    assert upper_bound(projector(psi), measure).value == pytest.approx(eval_E(measure, psi), abs=1e-10)


def test_peel_wlike_three_quarters_vanishes():
    assert peel(w_like_ensemble(0.75, "ghz"), TAU3).value <= 1e-9


def test_peel_empty():
    with pytest.raises(EmptyEnsemble):
        peel(Ensemble(np.zeros(0), np.zeros((0, 8))), TAU3)


@given(seeds)
def test_peel_rank2_concurrence_matches_wootters(seed):
    rho = random_density(np.random.default_rng(seed), 4, 2)
    assert upper_bound(rho, CONCURRENCE).value == pytest.approx(wootters_concurrence(rho), abs=1e-6)


@given(seeds)
def test_peel_full_rank_concurrence_is_upper_bound(seed):
    rho = random_density(np.random.default_rng(seed), 4, 4)
    assert upper_bound(rho, CONCURRENCE).value >= wootters_concurrence(rho) - 1e-8


@given(seeds, st.integers(min_value=2, max_value=8))
def test_factor_bookkeeping(seed, rank):
    # absorbed weight plus the surviving final mass accounts for the whole ensemble
    ens = decompose(random_density(np.random.default_rng(seed), 8, rank))
    res = peel(ens, TAU3, PeelConfig(tie_orderings=False))
    if res.additive:
        return
    *body, last = res.steps
    absorbed = sum(s.absorbed for s in res.steps)
    survivor = res.factor_product * last.reduced_weight
    assert absorbed + survivor == pytest.approx(1, abs=1e-9)
    assert all(0 < s.f_k <= 1 + 1e-12 for s in body)
    assert all(s.p_i <= 0.5 + 1e-12 for s in res.steps if s.pair != (0, 0))


@given(seeds)
def test_peel_deterministic(seed):
    ens = decompose(random_density(np.random.default_rng(seed), 8, 5))
    a, b = peel(ens, TAU3), peel(ens, TAU3)
    assert a.value == b.value and a.trace() == b.trace()


@settings(max_examples=6)
@given(seeds)
def test_pair_search_all_never_worse(seed):
    ens = decompose(random_density(np.random.default_rng(seed), 4, 4))
    base = peel(ens, CONCURRENCE, PeelConfig(tie_orderings=False)).value
    full = peel(ens, CONCURRENCE, PeelConfig(tie_orderings=False, pair_search="all")).value
    assert full <= base + 1e-12


def test_value_original_degree():
    res = peel(w_like_ensemble(0.9, "ghz"), TAU3)
    assert res.value_original_degree(TAU3) == pytest.approx(res.value**2)


def test_trace_lines():
    res = peel(ghz_werner_ensemble(0.7, "w_phase"), TAU3)
    lines = res.trace().splitlines()
    assert len(lines) == len(res.steps)
    assert lines[-1].startswith("final")


# ---------------------------------------------------------------- off axis


def test_off_axis_on_balanced_pair_reproduces_survivor():
    # zero states at Bloch +-x, axis point z = 0.4.  Every feasible sphere
    # point r lies in the xz plane with r_z > 0.4 and gives w = (r_z - 0.4)/r_z,
    # so the optimum is the pole psi_i with w = 0.6.
    gp, gm = make_pure("ghz_plus"), make_pure("ghz_minus")
    zs = solve(gp, gm, TAU3)
    out = off_axis(gp, gm, 0.7, zs, TAU3)
    theta = np.linspace(0, np.pi, 20001)
    rz = np.cos(theta)
    feasible = rz > 0.4
    w_brute = ((rz[feasible] - 0.4) / rz[feasible]).max()
    assert out.w_zero == pytest.approx(w_brute, abs=1e-6)
    assert out.residual_weight == pytest.approx(0.4, abs=1e-6)
    assert abs(np.vdot(gp, out.psi_off)) == pytest.approx(1, abs=1e-6)


def _empty_interval_pair(seed):
    rng = np.random.default_rng(seed)
    for _ in range(200):
        psi_i, psi_f = random_orthogonal_pair(rng, 8)
        zs = solve(psi_i, psi_f, TAU3)
        if interval(zs) is None:
            return psi_i, psi_f, zs, float(rng.uniform(0.05, 0.5))
    pytest.skip("no empty interval found")


@given(seeds)
def test_off_axis_hull_membership(seed):
    psi_i, psi_f, zs, p_i = _empty_interval_pair(seed)
    out = off_axis(psi_i, psi_f, p_i, zs, TAU3)
    assert 0 < out.w_zero < 1
    assert hull_membership_residual(out.hull_point, zs.bloch_vectors) <= 1e-8
    x = np.array([0, 0, 2 * p_i - 1])
    r = np.array(
        [math.sin(out.theta) * math.cos(out.phi), math.sin(out.theta) * math.sin(out.phi), math.cos(out.theta)]
    )
    assert np.allclose(out.w_zero * out.hull_point + (1 - out.w_zero) * r, x, atol=1e-9)


@given(seeds)
def test_off_axis_not_beaten_by_vertices(seed):
    # the search must do at least as well as aiming at any single zero state
    psi_i, psi_f, zs, p_i = _empty_interval_pair(seed)
    out = off_axis(psi_i, psi_f, p_i, zs, TAU3)
    x = np.array([0, 0, 2 * p_i - 1])
    w, _ = _w_of_hull_points(np.asarray(zs.bloch_vectors), x)
    assert out.w_zero >= w.max() - 1e-12


# ---------------------------------------------------------------- basis candidates


def test_degenerate_clusters():
    assert degenerate_clusters(np.array([0.1, 0.1, 0.2, 0.3, 0.3])) == [[0, 1], [3, 4]]
    assert degenerate_clusters(np.array([0.1, 0.2, 0.7])) == []


def test_candidates_contain_w_phase_basis():
    ens = ghz_werner_ensemble(0.4, "product")
    cands = basis_candidates(ens, PeelConfig(basis_presets=True))
    rho = ens.density_matrix()
    for c in cands:
        assert np.abs(c.density_matrix() - rho).max() < 1e-10
    wanted = [w_phase(k) for k in range(3)]
    assert any(all(_contains_ray(c.states, psi) for psi in wanted) for c in cands)
    assert abs(OMEGA**3 - 1) < 1e-15


def test_candidates_nondegenerate_is_input_only():
    ens = decompose(random_density(np.random.default_rng(3), 8, 8))
    cands = basis_candidates(ens, PeelConfig(basis_presets=True, n_random=3))
    assert len(cands) == 1 and np.array_equal(cands[0].states, ens.states)


def test_candidates_random_rotations_are_seeded():
    ens = ghz_werner_ensemble(0.4, "product")
    a = basis_candidates(ens, PeelConfig(n_random=2, rng_seed=7))
    b = basis_candidates(ens, PeelConfig(n_random=2, rng_seed=7))
    c = basis_candidates(ens, PeelConfig(n_random=2, rng_seed=8))
    assert all(np.array_equal(x.states, y.states) for x, y in zip(a, b))
    assert not all(np.array_equal(x.states, y.states) for x, y in zip(a, c))
    for x in a:
        assert np.abs(x.density_matrix() - ens.density_matrix()).max() < 1e-10


def test_raw_ghz_werner_matrix_with_presets():
    cfg = PeelConfig(basis_presets=True)
    assert upper_bound(ghz_werner_matrix(0.3), TAU3, cfg).value <= 1e-9
    assert upper_bound(ghz_werner_matrix(0.6), TAU3, cfg).value > 0.05


# ---------------------------------------------------------------- disorder


def test_robustify_equal_cluster_is_noop():
    ens = ghz_werner_ensemble(0.6, "w_phase")
    rob = robustify(ens, range(7))
    assert rob.factor == pytest.approx(1, abs=1e-12)
    assert rob.omega_min == pytest.approx(1, abs=1e-12)
    assert rob.discarded_weight == pytest.approx(0, abs=1e-15)


def test_robustify_formula():
    w = np.array([0.12, 0.29, 0.29, 0.30])
    states = np.eye(4, dtype=complex)
    rob = robustify(Ensemble(w, states), [1, 2, 3])
    assert rob.omega_min == pytest.approx(3 * 0.29 / 0.88)
    assert rob.factor == pytest.approx(0.12 + 3 * 0.29)
    assert rob.factor < 1
    assert rob.discarded_weight == pytest.approx(0.01)
    assert rob.ensemble.weights.sum() == pytest.approx(1)


def _jittered(ens, amplitude, relative, seed):
    j = np.random.default_rng(seed).uniform(-amplitude, amplitude, size=7)
    if relative:
        j = j * ens.weights[:7]
    j -= j.mean()
    w = ens.weights.copy()
    w[:7] += j
    return Ensemble(w, ens.states, "jittered")


@pytest.mark.parametrize("seed", range(5))
def test_robust_bound_under_relative_jitter(seed):
    ens = ghz_werner_ensemble(0.7, "w_phase")
    clean = peel(ens, TAU3).value
    value, rob, _ = robust_bound(_jittered(ens, 1e-3, True, seed), range(7), TAU3)
    assert abs(value - clean) <= 5e-3
    assert rob.factor <= 1


@pytest.mark.parametrize("seed", range(5))
def test_robust_bound_sensitivity_to_absolute_jitter(seed):
    # above threshold the clean bound is affine in p with slope 1/(1 - p0);
    # moving mass m out of the flattened part changes it by at most
    # m (1 + slope) since the split-off states carry E <= 1
    ens = ghz_werner_ensemble(0.7, "w_phase")
    clean = peel(ens, TAU3).value
    value, rob, _ = robust_bound(_jittered(ens, 1e-3, False, seed), range(7), TAU3)
    slope = 1 / (1 - 0.5575)
    assert abs(value - clean) <= rob.discarded_weight * (1 + slope)
