"""Iterative upper bound for a full-rank density matrix.

The spectral ensemble is reduced two states at a time: the two largest
weights form a rank-two block, the zero simplex of that block absorbs as much
weight as it can, and at most one state (an eigenstate, or a superposition of
the two for the off-axis case) survives with reduced weight.  The remaining
ensemble is renormalized and the renormalization factors multiply the final
rank-two value.
"""

from __future__ import annotations

import functools
import itertools
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize, nnls

from .measures import MEASURES, MeasureSpec, check_density_matrix, eval_E, n_qubits
from .numerics import eig_hermitian
from .rank2 import (
    BOTH_REMOVED,
    NO_INTERSECTION,
    SURVIVOR_F,
    SURVIVOR_I,
    RoofInterval,
    SurvivorOutcome,
    interval,
    survivor_weights,
)
from .zero_simplex import BlochPoint, BothOrderingsZero, ZeroSimplex, bloch_state, solve

logger = logging.getLogger(__name__)

OFF_AXIS = "off_axis"
TRIVIAL = "trivial"


class EmptyEnsemble(ValueError):
    pass


class NoFeasibleRay(RuntimeError):
    pass


@dataclass(frozen=True)
class PeelConfig:
    pair_search: str = "largest"  # or "all" (exhaustive for rank <= 4)
    off_axis_objective: str = "weight_only"  # or "weighted_E"
    off_axis_grid: int = 64
    off_axis_refine: int = 100
    off_axis_starts: int = 1  # best grid points handed to the local refinement
    basis_presets: bool = False
    tie_orderings: bool = True
    n_random: int = 0
    rng_seed: int = 0
    cluster_gap: float = 1e-9
    weight_tol: float = 1e-13

    def __post_init__(self):
        if self.pair_search not in ("largest", "all"):
            raise ValueError(f"unknown pair_search {self.pair_search!r}")
        if self.off_axis_objective not in ("weight_only", "weighted_E"):
            raise ValueError(f"unknown off_axis_objective {self.off_axis_objective!r}")


@dataclass(frozen=True)
class Ensemble:
    """Weights in ascending order with orthonormal states as rows."""

    weights: np.ndarray
    states: np.ndarray
    label: str = "input"

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        s = np.atleast_2d(np.asarray(self.states, dtype=complex))
        if len(w) != len(s):
            raise ValueError("weights and states differ in length")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", s)

    @classmethod
    def from_unsorted(cls, weights, states, label: str = "input") -> "Ensemble":
        w = np.asarray(weights, dtype=float)
        order = np.argsort(w, kind="stable")
        return cls(w[order], np.asarray(states, dtype=complex)[order], label)

    def __len__(self):
        return len(self.weights)

    def density_matrix(self) -> np.ndarray:
        return (self.states.T * self.weights) @ self.states.conj()


@dataclass(frozen=True)
class OffAxisOutcome:
    psi_off: np.ndarray
    theta: float
    phi: float
    w_zero: float
    residual_weight: float
    hull_point: np.ndarray
    objective: float


@dataclass(frozen=True)
class PeelStep:
    pair: tuple[int, int]
    weights: tuple[float, float]
    p_i: float
    interval: RoofInterval | None
    kind: str
    reduced_weight: float  # unnormalized survivor weight lambda~_s
    f_k: float
    absorbed: float  # weight removed into zero states, relative to the input ensemble
    off_axis: OffAxisOutcome | None = None
    final: bool = False
    value: float | None = None  # bound of the closing block

    def describe(self) -> str:
        iv = "none" if self.interval is None else f"[{self.interval.p_min:.9g},{self.interval.p_max:.9g}]"
        parts = [
            "final" if self.final else "step",
            f"pair={self.pair[0]},{self.pair[1]}",
            f"weights={self.weights[0]:.9g},{self.weights[1]:.9g}",
            f"p_i={self.p_i:.9g}",
            f"interval={iv}",
            f"kind={self.kind}",
            f"survivor_weight={self.reduced_weight:.9g}",
            f"f_k={self.f_k:.9g}",
            f"absorbed={self.absorbed:.9g}",
        ]
        if self.off_axis is not None:
            o = self.off_axis
            parts.append(
                f"off_axis(theta={o.theta:.9g},phi={o.phi:.9g},w_zero={o.w_zero:.9g}; three eigenstates effective)"
            )
        if self.value is not None:
            parts.append(f"value={self.value:.9g}")
        return " ".join(parts)


@dataclass(frozen=True)
class BoundResult:
    value: float
    steps: tuple[PeelStep, ...]
    candidate_values: tuple[float, ...]
    hint_more_states: bool
    best_candidate: int = 0
    candidate_labels: tuple[str, ...] = ()
    additive: float = 0.0  # contributions from steps that fell back to the trivial bound

    @property
    def factor_product(self) -> float:
        return float(np.prod([s.f_k for s in self.steps if not s.final])) if self.steps else 1.0

    def value_original_degree(self, measure: MeasureSpec) -> float:
        """Experimental: the bound expressed in the measure's native degree D."""
        return self.value ** (measure.degree / 2)

    def trace(self) -> str:
        return "\n".join(s.describe() for s in self.steps)


# ---------------------------------------------------------------------------
# spectral decomposition


def decompose(rho, rank_tol: float = 1e-10) -> Ensemble:
    rho = check_density_matrix(rho)
    eig = eig_hermitian(rho)
    keep = eig.values > rank_tol
    w = eig.values[keep]
    w = w / w.sum()
    return Ensemble(w, eig.vectors[:, keep].T.copy(), "eigenbasis")


# ---------------------------------------------------------------------------
# off-axis survivor


def _w_of_hull_points(h: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Weight on the hull point h when x = w h + (1 - w) r with r on the unit sphere."""
    d = x - h
    dist = np.linalg.norm(d, axis=-1)
    e = d / np.where(dist > 0, dist, 1)[..., None]
    xe = e @ x
    s = -xe + np.sqrt(np.maximum(xe * xe - x @ x + 1, 0))
    r = x + s[..., None] * e
    w = np.where(dist > 1e-15, s / (s + dist), 1.0)
    return w, r


def _simplex_grid(m: int, n: int) -> np.ndarray:
    pts = [c for c in itertools.product(range(n + 1), repeat=m - 1) if sum(c) <= n]
    g = np.array([[*c, n - sum(c)] for c in pts], dtype=float) / n
    return g


def _grid_resolution(m: int, total: int) -> int:
    # largest n whose simplex grid over m vertices has at most `total` points
    n = 1
    while math.comb(n + 1 + m - 1, m - 1) <= total:
        n += 1
    return n


def _project_simplex(y: np.ndarray) -> np.ndarray:
    u = np.sort(y)[::-1]
    css = np.cumsum(u)
    k = np.nonzero(u * np.arange(1, len(y) + 1) > css - 1)[0][-1]
    tau = (css[k] - 1) / (k + 1)
    return np.maximum(y - tau, 0)


def hull_membership_residual(h, vertices) -> float:
    v = np.asarray(vertices, float)
    a = np.vstack([v.T, np.ones(len(v))])
    b = np.concatenate([np.asarray(h, float), [1.0]])
    _, res = nnls(a, b)
    return float(res)


def off_axis(
    psi_i, psi_f, p_i: float, zs: ZeroSimplex, measure: MeasureSpec, config: PeelConfig = PeelConfig()
) -> OffAxisOutcome:
    """Best pure state psi_off whose line through rho(p_i) ends in the zero hull.

    The search runs over hull points h: each h fixes the ray from h through
    the axis point x and hence the sphere point r of psi_off, with
    x = w h + (1 - w) r in closed form.
    """
    verts = np.unique(np.round(zs.bloch_vectors, 13), axis=0)
    if len(verts) == 0:
        raise NoFeasibleRay("empty zero simplex")
    x = np.array([0.0, 0.0, 2 * p_i - 1])

    def state_of(r):
        b = BlochPoint.from_p((1 + r[2]) / 2, math.atan2(r[1], r[0]))
        return b, bloch_state(psi_i, psi_f, b)

    def objective(mu_batch):
        h = mu_batch @ verts
        w, r = _w_of_hull_points(h, x)
        if config.off_axis_objective == "weight_only":
            return 1 - w
        vals = []
        for wi, ri in zip(np.atleast_1d(w), np.atleast_2d(r)):
            vals.append((1 - wi) * eval_E(measure, state_of(ri)[1]))
        return np.array(vals)

    m = len(verts)
    grid = _simplex_grid(m, _grid_resolution(m, config.off_axis_grid**2)) if m > 1 else np.ones((1, 1))
    vals = objective(grid)
    order = np.argsort(vals, kind="stable")[: config.off_axis_starts]
    best_mu, best_val = grid[order[0]], float(vals[order[0]])
    if m > 1:
        for start in grid[order]:
            res = minimize(
                lambda y: float(objective(_project_simplex(y)[None, :])[0]),
                start,
                method="Nelder-Mead",
                options=dict(maxiter=config.off_axis_refine * m, xatol=1e-12, fatol=1e-14),
            )
            mu = _project_simplex(res.x)
            val = float(objective(mu[None, :])[0])
            if val < best_val:
                best_mu, best_val = mu, val
    h = best_mu @ verts
    w, r = _w_of_hull_points(h[None, :], x)
    w, r = float(w[0]), r[0]
    if not np.isfinite(w) or w <= 0:
        raise NoFeasibleRay("no ray from the sphere reaches the zero hull")
    b, psi_off = state_of(r)
    return OffAxisOutcome(psi_off, b.theta, b.phi, w, 1 - w, h, best_val)


# ---------------------------------------------------------------------------
# rank-two step with caching of the zero simplex


@functools.lru_cache(maxsize=8192)
def _cached_simplex(name: str, bi: bytes, bf: bytes):
    measure = MEASURES[name]
    psi_i = np.frombuffer(bi, dtype=complex)
    psi_f = np.frombuffer(bf, dtype=complex)
    try:
        zs = solve(psi_i, psi_f, measure)
    except BothOrderingsZero:
        return None, None
    return zs, interval(zs)


def _simplex(psi_i, psi_f, measure):
    if MEASURES.get(measure.name) is measure:
        return _cached_simplex(
            measure.name,
            np.ascontiguousarray(psi_i, complex).tobytes(),
            np.ascontiguousarray(psi_f, complex).tobytes(),
        )
    try:
        zs = solve(psi_i, psi_f, measure)
    except BothOrderingsZero:
        return None, None
    return zs, interval(zs)


@dataclass
class _BlockResult:
    kind: str
    state: np.ndarray | None
    share: float  # surviving fraction of the normalized block
    interval: RoofInterval | None
    off: OffAxisOutcome | None = None


def _reduce_block(psi_i, psi_f, p_i, measure, config) -> _BlockResult:
    zs, iv = _simplex(psi_i, psi_f, measure)
    if zs is None:
        return _BlockResult(BOTH_REMOVED, None, 0.0, None)
    if iv is None:
        try:
            off = off_axis(psi_i, psi_f, p_i, zs, measure, config)
        except NoFeasibleRay:
            return _BlockResult(TRIVIAL, None, 1.0, None)
        return _BlockResult(OFF_AXIS, off.psi_off, off.residual_weight, None, off)
    kind, share = survivor_weights(p_i, iv)
    state = {SURVIVOR_I: zs.psi_i, SURVIVOR_F: zs.psi_f}.get(kind)
    return _BlockResult(kind, state, share, iv)


# ---------------------------------------------------------------------------
# peeling


def _sort(ws, ss):
    order = sorted(range(len(ws)), key=lambda j: ws[j])
    return [ws[j] for j in order], [ss[j] for j in order]


def _close(ws, ss, measure, config, scale, absorbed_so_far):
    """Value of the last one or two states, already multiplied by ``scale``."""
    if len(ws) == 1:
        v = scale * eval_E(measure, ss[0])
        step = PeelStep((0, 0), (ws[0], 0.0), 1.0, None, SURVIVOR_I, ws[0], 1.0, 0.0, final=True, value=v)
        return v, step
    (li, lf), (psi_i, psi_f) = _sort(ws, ss)
    p_i = li / (li + lf)
    blk = _reduce_block(psi_i, psi_f, p_i, measure, config)
    if blk.kind == TRIVIAL:
        v = scale * (li * eval_E(measure, psi_i) + lf * eval_E(measure, psi_f))
    elif blk.state is None:
        v = 0.0
    else:
        v = scale * blk.share * eval_E(measure, blk.state)
    absorbed = scale * (1 - blk.share) if blk.kind != TRIVIAL else 0.0
    step = PeelStep(
        (0, 1), (li, lf), p_i, blk.interval, blk.kind, blk.share, 1.0, absorbed, blk.off, final=True, value=v
    )
    return v, step


def _peel_largest(ws, ss, measure, config):
    ws, ss = list(ws), list(ss)
    scale = 1.0
    additive = 0.0
    steps: list[PeelStep] = []
    hint = False
    while len(ws) > 2:
        ws, ss = _sort(ws, ss)
        li, lf = ws[-2], ws[-1]
        tot = li + lf
        p_i = li / tot
        blk = _reduce_block(ss[-2], ss[-1], p_i, measure, config)
        rest_w, rest_s = ws[:-2], ss[:-2]
        if blk.kind == TRIVIAL:
            additive += scale * (li * eval_E(measure, ss[-2]) + lf * eval_E(measure, ss[-1]))
            lam_s, absorbed = 0.0, 0.0
        else:
            lam_s = blk.share * tot
            absorbed = scale * (tot - lam_s)
        if blk.kind == BOTH_REMOVED and blk.interval is not None:
            hint = True
        new_w = list(rest_w)
        new_s = list(rest_s)
        if blk.state is not None and lam_s > config.weight_tol:
            new_w.append(lam_s)
            new_s.append(blk.state)
        f_k = float(sum(new_w))
        steps.append(
            PeelStep(
                (len(ws) - 2, len(ws) - 1), (li, lf), p_i, blk.interval, blk.kind, lam_s, f_k, absorbed, blk.off
            )
        )
        if f_k <= config.weight_tol:
            return additive, steps, hint, additive
        ws = [w / f_k for w in new_w]
        ss = new_s
        scale *= f_k
    v, last = _close(ws, ss, measure, config, scale, None)
    steps.append(last)
    if last.kind == BOTH_REMOVED and last.interval is not None:
        hint = True
    return v + additive, steps, hint, additive


def _peel_all_pairs(ws, ss, measure, config, scale=1.0):
    """Exhaustive pair choice at every step; only used for small ranks."""
    if len(ws) <= 2:
        v, last = _close(ws, ss, measure, config, scale, None)
        return v, [last], last.kind == BOTH_REMOVED and last.interval is not None, 0.0
    best = None
    for a, b in itertools.combinations(range(len(ws)), 2):
        (li, lf), (psi_i, psi_f) = _sort([ws[a], ws[b]], [ss[a], ss[b]])
        tot = li + lf
        p_i = li / tot
        blk = _reduce_block(psi_i, psi_f, p_i, measure, config)
        rest = [j for j in range(len(ws)) if j not in (a, b)]
        new_w = [ws[j] for j in rest]
        new_s = [ss[j] for j in rest]
        additive = 0.0
        if blk.kind == TRIVIAL:
            additive = scale * (li * eval_E(measure, psi_i) + lf * eval_E(measure, psi_f))
            lam_s, absorbed = 0.0, 0.0
        else:
            lam_s = blk.share * tot
            absorbed = scale * (tot - lam_s)
        if blk.state is not None and lam_s > config.weight_tol:
            new_w.append(lam_s)
            new_s.append(blk.state)
        f_k = float(sum(new_w))
        step = PeelStep((a, b), (li, lf), p_i, blk.interval, blk.kind, lam_s, f_k, absorbed, blk.off)
        if f_k <= config.weight_tol:
            cand = (additive, [step], blk.kind == BOTH_REMOVED, additive)
        else:
            v, sub, h, add = _peel_all_pairs([w / f_k for w in new_w], new_s, measure, config, scale * f_k)
            cand = (v + additive, [step] + sub, h or (blk.kind == BOTH_REMOVED and blk.interval is not None), add + additive)
        if best is None or cand[0] < best[0] - 1e-15:
            best = cand
    return best


def peel_single(ens: Ensemble, measure: MeasureSpec, config: PeelConfig = PeelConfig()):
    """One run of the algorithm on a fixed ensemble: (value, steps, hint, additive)."""
    keep = ens.weights > config.weight_tol
    if not keep.any():
        raise EmptyEnsemble("ensemble has no weight")
    ws = list(ens.weights[keep] / ens.weights[keep].sum())
    ss = list(ens.states[keep])
    if config.pair_search == "all" and len(ws) <= 4:
        v1 = _peel_largest(ws, ss, measure, config)
        v2 = _peel_all_pairs(ws, ss, measure, config)
        return v2 if v2[0] < v1[0] else v1
    return _peel_largest(ws, ss, measure, config)


def peel(ens: Ensemble, measure: MeasureSpec, config: PeelConfig = PeelConfig(), candidates=None) -> BoundResult:
    """Upper bound of the convex roof: the minimum over all basis candidates."""
    if len(ens) == 0:
        raise EmptyEnsemble("empty ensemble")
    if candidates is None:
        candidates = basis_candidates(ens, config, config.rng_seed)
    runs = [peel_single(c, measure, config) for c in candidates]
    values = tuple(float(r[0]) for r in runs)
    best = int(np.argmin(values))
    v, steps, hint, additive = runs[best]
    return BoundResult(
        float(max(v, 0.0)),
        tuple(steps),
        values,
        bool(hint),
        best,
        tuple(c.label for c in candidates),
        float(additive),
    )


def upper_bound(rho, measure: MeasureSpec, config: PeelConfig = PeelConfig()) -> BoundResult:
    return peel(decompose(rho), measure, config)


# ---------------------------------------------------------------------------
# basis candidates


def degenerate_clusters(weights, rel_gap: float = 1e-9) -> list[list[int]]:
    w = np.asarray(weights, float)
    order = np.argsort(w, kind="stable")
    clusters, cur = [], [int(order[0])]
    for a, b in zip(order[:-1], order[1:]):
        if abs(w[b] - w[a]) <= rel_gap * max(abs(w[a]), abs(w[b]), 1e-300):
            cur.append(int(b))
        else:
            clusters.append(cur)
            cur = [int(b)]
    clusters.append(cur)
    return [c for c in clusters if len(c) > 1]


def preset_family(name: str, nq: int) -> np.ndarray:
    """Orthonormal reference bases that the clusters are rotated towards.

    ``product``: computational kets.  ``ghz``: computational kets with
    |0..0>, |1..1> replaced by GHZ+-.  ``w_phase``: GHZ+- and, in every
    Hamming-weight sector, the discrete-Fourier (root-of-unity phased)
    superpositions of its kets.
    """
    dim = 2**nq
    eye = np.eye(dim, dtype=complex)
    if name == "product":
        return eye
    ghz_p = (eye[0] + eye[-1]) / math.sqrt(2)
    ghz_m = (eye[0] - eye[-1]) / math.sqrt(2)
    if name == "ghz":
        return np.vstack([ghz_p, ghz_m, eye[1:-1]])
    if name == "w_phase":
        rows = [ghz_p, ghz_m]
        for k in range(1, nq):
            # sector kets ordered by the position of the odd-one-out bit, least significant first
            sector = sorted(
                (i for i in range(dim) if bin(i).count("1") == k),
                key=lambda i: (i if k <= nq // 2 else (dim - 1) ^ i),
            )
            m = len(sector)
            omega = np.exp(2j * np.pi / m)
            for j in range(m):
                v = np.zeros(dim, complex)
                for pos, idx in enumerate(sector):
                    v[idx] = omega ** (j * pos)
                rows.append(v / math.sqrt(m))
        return np.vstack(rows)
    raise ValueError(f"unknown preset {name!r}")


def _rotate_cluster(states: np.ndarray, idx: list[int], family: np.ndarray) -> np.ndarray | None:
    sub = states[idx]
    proj = sub.T @ sub.conj()  # projector onto the cluster span
    inside = [v for v in family if np.linalg.norm(proj @ v) ** 2 > 1 - 1e-9]
    if not inside:
        return None
    basis = list(inside[: len(idx)])
    for v in sub:  # complete by Gram-Schmidt from the original cluster vectors
        if len(basis) == len(idx):
            break
        u = v - sum(np.vdot(b, v) * b for b in basis)
        if np.linalg.norm(u) > 1e-6:
            basis.append(u / np.linalg.norm(u))
    if len(basis) != len(idx):
        return None
    out = states.copy()
    out[idx] = np.array(basis)
    return out


def _haar_unitary(m: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _orderings(ens: Ensemble, clusters: list[list[int]]) -> list[Ensemble]:
    if not clusters:
        return [ens]
    size = max(len(c) for c in clusters)
    out = []
    for reverse in (False, True):
        for shift in range(size):
            perm = np.arange(len(ens))
            for c in clusters:
                members = sorted(c)
                moved = members[::-1] if reverse else members
                k = shift % len(members)
                moved = moved[k:] + moved[:k]
                perm[members] = moved
            tag = f"{ens.label}/order{'r' if reverse else ''}{shift}"
            out.append(Ensemble(ens.weights[perm], ens.states[perm], tag))
    return out


def basis_candidates(ens: Ensemble, config: PeelConfig = PeelConfig(), rng_seed: int | None = None) -> list[Ensemble]:
    """Alternative ensembles for the same density matrix.

    Only degenerate weight clusters can be rotated without changing rho; the
    candidates are the input basis, preset rotations of every cluster, seeded
    Haar-random rotations, and (optionally) the cyclic orderings of tied
    states, which decide the pairing order of the peel.
    """
    seed = config.rng_seed if rng_seed is None else rng_seed
    clusters = degenerate_clusters(ens.weights, config.cluster_gap) if len(ens) > 1 else []
    if clusters:
        # round-off splits inside a cluster would otherwise decide the pairing order
        w = ens.weights.copy()
        for c in clusters:
            w[c] = w[c].mean()
        ens = Ensemble(w, ens.states, ens.label)
    bases = [ens]
    if clusters and config.basis_presets:
        nq = n_qubits(ens.states)
        for name in ("product", "ghz", "w_phase"):
            fam = preset_family(name, nq)
            states = ens.states
            for c in clusters:
                rotated = _rotate_cluster(states, c, fam)
                if rotated is not None:
                    states = rotated
            if not np.array_equal(states, ens.states):
                bases.append(Ensemble(ens.weights, states, f"{ens.label}+{name}"))
    if clusters and config.n_random > 0:
        for k in range(config.n_random):
            rng = np.random.default_rng([seed, k])
            states = ens.states.copy()
            for c in clusters:
                u = _haar_unitary(len(c), rng)
                states[c] = u @ ens.states[c]
            bases.append(Ensemble(ens.weights, states, f"{ens.label}+haar{k}"))
    # drop exact duplicates
    unique = []
    for b in bases:
        if not any(np.array_equal(b.states, u.states) for u in unique):
            unique.append(b)
    if not config.tie_orderings:
        return unique
    out = []
    for b in unique:
        out.extend(_orderings(b, clusters))
    return out


# ---------------------------------------------------------------------------
# disorder


@dataclass(frozen=True)
class RobustEnsemble:
    ensemble: Ensemble
    omega_min: float
    factor: float  # p + omega_min (1 - p)
    discarded_weight: float  # 2 tr(delta rho_0)
    discarded_states: np.ndarray
    discarded_weights: np.ndarray


def robustify(ens: Ensemble, target_cluster) -> RobustEnsemble:
    """Flatten a nearly degenerate cluster to its smallest weight.

    With cluster mass 1 - p and m members the flattened part is
    omega_min (1 - p) rho_0, omega_min = m * min(w) / (1 - p); the excess
    above the minimum is split off as an explicit remainder.
    """
    idx = sorted(int(i) for i in target_cluster)
    w = ens.weights.copy()
    cl = w[idx]
    mass = cl.sum()
    p = 1 - mass
    wmin = cl.min()
    omega = len(idx) * wmin / mass
    excess = cl - wmin
    w[idx] = wmin
    factor = p + omega * mass
    rho1 = Ensemble.from_unsorted(w / factor, ens.states, ens.label + "+flattened")
    return RobustEnsemble(rho1, float(omega), float(factor), float(excess.sum()), ens.states[idx], excess)


def robust_bound(ens: Ensemble, target_cluster, measure: MeasureSpec, config: PeelConfig = PeelConfig()):
    """factor * bound(rho_1) plus the (usually zero) value of the split-off remainder."""
    rob = robustify(ens, target_cluster)
    res = peel(rob.ensemble, measure, config)
    remainder = float(sum(x * eval_E(measure, s) for x, s in zip(rob.discarded_weights, rob.discarded_states)))
    return rob.factor * res.value + remainder, rob, res
