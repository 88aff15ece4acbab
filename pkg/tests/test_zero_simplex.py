import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from roofbound.measures import CONCURRENCE, TAU3, eval_E
from roofbound.numerics import CPoly, poly_roots
from roofbound.states import ket, make_pure
from roofbound.zero_simplex import (
    INF,
    BlochPoint,
    BothOrderingsZero,
    NotOrthogonal,
    bloch_state,
    line_polynomial,
    solve,
    zero_state,
)

from _util import random_orthogonal_pair

seeds = st.integers(min_value=0, max_value=2**32 - 1)
GP, GM = make_pure("ghz_plus"), make_pure("ghz_minus")


def _same_ray(a, b, tol=1e-10):
    return abs(abs(np.vdot(a, b)) - np.linalg.norm(a) * np.linalg.norm(b)) < tol


def test_ghz_pair_double_roots():
    zs = solve(GP, GM, TAU3)
    assert sorted(z.real for z in zs.roots.finite_roots) == pytest.approx([-1, -1, 1, 1], abs=1e-10)
    assert zs.roots.infinite_count == 0


def test_ghz_w_pair_has_root_at_infinity():
    zs = solve(make_pure("ghz"), make_pure("w"), TAU3)
    assert zs.roots.infinite_count == 1
    assert len(zs.roots.finite_roots) == 3
    c = np.asarray(zs.poly.coefficients)
    for z in zs.roots.finite_roots:
        assert abs(TAU3.invariant(make_pure("ghz") + z * make_pure("w"))) <= 1e-8 * np.abs(c).max()
    # the three finite roots share a modulus and differ by cube roots of unity
    mods = [abs(z) for z in zs.roots.finite_roots]
    assert max(mods) - min(mods) < 1e-10


def test_product_pair_zeros():
    zs = solve(ket("000"), ket("111"), TAU3)
    assert zs.roots.finite_roots == (0j, 0j)
    assert zs.roots.infinite_count == 2
    assert zs.both_deficient


def test_zero_line_raises():
    with pytest.raises(BothOrderingsZero):
        solve(ket("00"), ket("01"), CONCURRENCE)


def test_orthogonality_enforced():
    with pytest.raises(NotOrthogonal):
        solve(GP, (GP + GM) / math.sqrt(2), TAU3)


def test_zero_state_examples():
    assert _same_ray(zero_state(GP, GM, 0), GP)
    assert _same_ray(zero_state(GP, GM, INF), GM)
    assert _same_ray(zero_state(GP, GM, 1), ket("000"))


def test_bloch_state_examples():
    assert np.allclose(bloch_state(GP, GM, BlochPoint.from_p(1, 0.3)), GP)
    phi = 0.7
    assert np.allclose(bloch_state(GP, GM, BlochPoint.from_p(0, phi)), np.exp(1j * phi) * GM)
    assert np.allclose(bloch_state(GP, GM, BlochPoint.from_p(0.5, 0)), (GP + GM) / math.sqrt(2))


@given(st.floats(min_value=0, max_value=1), st.floats(min_value=0, max_value=2 * math.pi, exclude_max=True))
def test_bloch_point_unit_vector(p, phi):
    b = BlochPoint.from_p(p, phi)
    assert np.linalg.norm(b.r) == pytest.approx(1, abs=1e-12)
    assert b.r[2] == pytest.approx(2 * p - 1, abs=1e-12)
    assert b.p == pytest.approx(p, abs=1e-12)


@given(seeds, st.sampled_from([TAU3, CONCURRENCE]))
def test_random_pair_properties(seed, measure):
    rng = np.random.default_rng(seed)
    psi_i, psi_f = random_orthogonal_pair(rng, 2**measure.n_qubits)
    zs = solve(psi_i, psi_f, measure)
    assert len(zs.roots.finite_roots) + zs.roots.infinite_count == measure.degree
    assert len(zs.axis_points) == measure.degree
    ts = np.exp(2j * np.pi * np.arange(16) / 16)
    scale = max(abs(measure.invariant(psi_i + t * psi_f)) for t in ts)
    for z in zs.roots.finite_roots:
        assert abs(measure.invariant(psi_i + z * psi_f)) <= 1e-8 * scale * max(1, abs(z)) ** measure.degree
    for s in zs.zero_states:
        assert np.linalg.norm(s) == pytest.approx(1, abs=1e-12)
        assert eval_E(measure, s) <= 1e-7
    for a, z in zip(zs.axis_points, zs.all_roots):
        assert abs(a.Z) == pytest.approx(math.sqrt(a.p * (1 - a.p)), abs=1e-12)


@given(seeds)
def test_swapped_ordering_gives_reciprocals(seed):
    rng = np.random.default_rng(seed)
    psi_i, psi_f = random_orthogonal_pair(rng, 8)
    first = solve(psi_i, psi_f, TAU3).roots.finite_roots
    swapped = solve(psi_f, psi_i, TAU3).roots.finite_roots
    inv = [1 / w for w in swapped if w != 0]
    for z in first:
        if z == 0:
            continue
        assert min(abs(z - v) / abs(z) for v in inv) <= 1e-7


def test_line_polynomial_degree():
    p = line_polynomial(GP, GM, TAU3)
    assert isinstance(p, CPoly) and p.degree == 4
    r = poly_roots(p)
    assert r.infinite_count == 0
