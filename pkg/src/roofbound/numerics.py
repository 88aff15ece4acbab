"""Small dense numerical kernels used throughout the package.

Everything here works on tiny problems (matrices up to a few dozen rows,
polynomials of degree <= 8), so the implementations favour determinism and
transparency over speed.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field

import numpy as np

INFINITY_THRESHOLD = 1e-12


class NotHermitian(ValueError):
    pass


class NotAntisymmetric(ValueError):
    pass


class OddDimension(ValueError):
    pass


class IdenticallyZero(ValueError):
    """All polynomial coefficients vanish below the infinity threshold."""


class UnsortedInput(ValueError):
    pass


class NoConvergence(RuntimeError):
    def __init__(self, message: str, estimate: float):
        super().__init__(message)
        self.estimate = estimate


# ---------------------------------------------------------------------------
# Hermitian eigendecomposition (cyclic Jacobi)


@dataclass(frozen=True)
class HermEig:
    values: np.ndarray
    vectors: np.ndarray  # columns are eigenvectors


def _fix_phase(vectors: np.ndarray) -> np.ndarray:
    # make the first component of largest modulus real and positive
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        k = int(np.argmax(np.abs(col) > np.abs(col).max() * (1 - 1e-8)))
        if abs(col[k]) > 0:
            out[:, j] = col * (abs(col[k]) / col[k])
    return out


def eig_hermitian(m, tol: float = 1e-9, max_sweeps: int = 60) -> HermEig:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Eigenvalues come back ascending; ties keep the order in which the sweep
    produced them, which is deterministic for a fixed input.
    """
    a = np.array(m, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    scale = max(np.abs(a).max(), 1e-300)
    if np.abs(a - a.conj().T).max() > tol * scale:
        raise NotHermitian("matrix is not Hermitian within tolerance")
    a = (a + a.conj().T) / 2
    v = np.eye(n, dtype=complex)
    for _ in range(max_sweeps):
        off = np.abs(a - np.diag(np.diag(a))).max()
        if off <= 1e-16 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-18 * scale:
                    continue
                app, aqq = a[p, p].real, a[q, q].real
                # reduce to a real symmetric 2x2 via the phase of apq
                phase = apq / abs(apq)
                theta = (aqq - app) / (2 * abs(apq))
                if abs(theta) > 1e150:
                    t = 1 / (2 * theta)
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1)) if theta != 0 else 1.0
                c = 1 / np.sqrt(t * t + 1)
                s = t * c
                # rotation J acting on columns p, q
                jp = np.array([c, -s * phase.conjugate()])
                jq = np.array([s * phase, c])
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = colp * jp[0] + colq * jp[1]
                a[:, q] = colp * jq[0] + colq * jq[1]
                rowp = a[p, :].copy()
                rowq = a[q, :].copy()
                a[p, :] = rowp * jp[0].conjugate() + rowq * jp[1].conjugate()
                a[q, :] = rowp * jq[0].conjugate() + rowq * jq[1].conjugate()
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = vp * jp[0] + vq * jp[1]
                v[:, q] = vp * jq[0] + vq * jq[1]
    else:
        raise NoConvergence("Jacobi sweeps did not converge", float("nan"))
    values = np.diag(a).real.copy()
    order = np.argsort(values, kind="stable")
    return HermEig(values[order], _fix_phase(v[:, order]))


# ---------------------------------------------------------------------------
# Polynomials


@dataclass(frozen=True)
class CPoly:
    """Coefficients c_0..c_D, lowest order first."""

    coefficients: np.ndarray
    residual: float = 0.0

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def effective_degree(self) -> int:
        c = np.abs(self.coefficients)
        big = np.nonzero(c >= INFINITY_THRESHOLD * c.max())[0]
        return int(big[-1]) if len(big) else -1

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coefficients)


@dataclass(frozen=True)
class RootSet:
    finite_roots: tuple[complex, ...]
    infinite_count: int

    @property
    def degree(self) -> int:
        return len(self.finite_roots) + self.infinite_count


def poly_from_samples(f, degree: int) -> CPoly:
    """Recover a polynomial of known maximal degree from samples on the unit circle.

    The residual is measured at the half-step rotated nodes, so a function of
    higher degree than declared shows up as a large ``residual``.
    """
    n = degree + 1
    nodes = np.exp(2j * np.pi * np.arange(n) / n)
    samples = np.array([f(z) for z in nodes], dtype=complex)
    dft = np.exp(-2j * np.pi * np.outer(np.arange(n), np.arange(n)) / n)
    coeffs = dft @ samples / n
    check = nodes * np.exp(1j * np.pi / n)
    fcheck = np.array([f(z) for z in check], dtype=complex)
    scale = max(np.abs(samples).max(), np.abs(fcheck).max(), 1e-300)
    resid = np.abs(np.polynomial.polynomial.polyval(check, coeffs) - fcheck).max() / scale
    return CPoly(coeffs, float(resid))


def _aberth(c: np.ndarray, max_iter: int = 200) -> np.ndarray:
    """All roots of the monic-normalized polynomial with coefficients c (low first)."""
    d = len(c) - 1
    c = c / c[-1]
    dc = c[1:] * np.arange(1, d + 1)
    # Fujiwara-type radius bound for the starting circle
    radius = 2 * max(abs(c[d - k]) ** (1 / k) for k in range(1, d + 1))
    radius = max(radius, 1e-3)
    z = radius * 0.5 * np.exp(1j * (2 * np.pi * np.arange(d) / d + 0.4))
    for _ in range(max_iter):
        pz = np.polynomial.polynomial.polyval(z, c)
        dpz = np.polynomial.polynomial.polyval(z, dc)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(pz == 0, 0, pz / dpz)
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1)
            s = (1 / diff).sum(axis=1) - 1  # remove the filled diagonal
            w = np.where(pz == 0, 0, ratio / (1 - ratio * s))
        w = np.nan_to_num(w)
        z = z - w
        if np.all(np.abs(w) <= 1e-15 * np.maximum(1, np.abs(z))):
            break
    return z


def _merge_clusters(z: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Collapse near-coincident roots and polish each cluster as one multiple root.

    An m-fold root of p is a simple root of the (m-1)-th derivative, where
    Newton's method converges quadratically again.
    """
    d = len(z)
    out = z.copy()
    seen = np.zeros(d, bool)
    P = np.polynomial.polynomial
    for i in range(d):
        if seen[i]:
            continue
        # tolerance relative to the root itself, so a huge root elsewhere cannot glue small ones
        tol = 1e-5 * max(1.0, abs(z[i]))
        group = [j for j in range(d) if not seen[j] and abs(z[j] - z[i]) < tol]
        for j in group:
            seen[j] = True
        m = len(group)
        if m == 1:
            continue
        zc = z[group].mean()
        dm = P.polyder(c, m - 1)
        dm1 = P.polyder(c, m)
        for _ in range(4):
            den = P.polyval(zc, dm1)
            if den == 0:
                break
            step = P.polyval(zc, dm) / den
            if not np.isfinite(step) or abs(step) > tol:
                break
            zc = zc - step
        out[group] = zc
    return out


def _newton_polish(z: np.ndarray, c: np.ndarray, steps: int = 2) -> np.ndarray:
    dc = c[1:] * np.arange(1, len(c))
    out = z.copy()
    for i, zi in enumerate(z):
        if np.sum(z == zi) > 1:
            continue  # clusters were already polished as multiple roots
        for _ in range(steps):
            d = np.polynomial.polynomial.polyval(zi, dc)
            if d == 0:
                break
            step = np.polynomial.polynomial.polyval(zi, c) / d
            if not np.isfinite(step) or abs(step) > 1e-3 * max(1, abs(zi)):
                break
            zi = zi - step
        out[i] = zi
    return out


def poly_roots(p: CPoly) -> RootSet:
    """Roots of p with multiplicity; missing leading degree becomes roots at infinity."""
    c = np.asarray(p.coefficients, dtype=complex)
    amax = np.abs(c).max()
    if amax == 0 or not np.isfinite(amax):
        raise IdenticallyZero("polynomial vanishes identically")
    deg = p.effective_degree
    if deg < 0:
        raise IdenticallyZero("polynomial vanishes identically")
    n_inf = p.degree - deg
    c = c[: deg + 1]
    if deg == 0:
        return RootSet((), n_inf)
    # roots at the origin are exact; strip them before iterating
    n_zero = 0
    small = INFINITY_THRESHOLD * amax
    while n_zero < deg and abs(c[n_zero]) < small:
        n_zero += 1
    core = c[n_zero:]
    if len(core) > 1:
        z = _aberth(core)
        z = _merge_clusters(z, core)
        z = _newton_polish(z, core)
    else:
        z = np.zeros(0, complex)
    roots = [0j] * n_zero + [complex(v) for v in z]
    roots.sort(key=lambda v: (round(v.real, 12), round(v.imag, 12)))
    return RootSet(tuple(roots), n_inf)


# ---------------------------------------------------------------------------
# Pfaffian


def pfaffian(a, tol: float = 1e-10) -> complex:
    """Pfaffian by skew-symmetric Gaussian elimination with partial pivoting."""
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    if n % 2:
        raise OddDimension("Pfaffian needs an even dimension")
    if n == 0:
        return 1.0 + 0j
    if np.abs(a + a.T).max() > tol * max(np.abs(a).max(), 1.0):
        raise NotAntisymmetric("matrix is not antisymmetric")
    result = 1.0 + 0j
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.abs(a[k + 1 :, k]).argmax())
        if kp != k + 1:
            a[[k + 1, kp], k:] = a[[kp, k + 1], k:]
            a[k:, [k + 1, kp]] = a[k:, [kp, k + 1]]
            result = -result
        if a[k + 1, k] == 0:
            return 0j
        result *= a[k, k + 1]
        if k + 2 < n:
            tau = a[k, k + 2 :] / a[k, k + 1]
            col = a[k + 2 :, k + 1].copy()
            a[k + 2 :, k + 2 :] += np.outer(tau, col) - np.outer(col, tau)
    return complex(result)


# ---------------------------------------------------------------------------
# Origin-on-axis interval of a small complex point set


@dataclass(frozen=True)
class AxisPoint:
    Z: complex
    p: float


@dataclass(frozen=True)
class AxisInterval:
    p_min: float
    p_max: float
    witness_min: tuple[float, ...]
    witness_max: tuple[float, ...]


def axis_interval(points, tol: float = 1e-9) -> AxisInterval | None:
    """Range of sum(mu_j p_j) over convex weights mu with sum(mu_j Z_j) = 0.

    The feasible set is a polytope cut out by three equality constraints, so
    both extremes are attained on supports of at most three points; those are
    enumerated exactly.
    """
    pts = list(points)
    n = len(pts)
    best_lo: tuple[float, np.ndarray] | None = None
    best_hi: tuple[float, np.ndarray] | None = None
    b = np.array([1.0, 0.0, 0.0])
    for k in (1, 2, 3):
        for support in itertools.combinations(range(n), k):
            a = np.array(
                [[1.0] * k, [pts[j].Z.real for j in support], [pts[j].Z.imag for j in support]]
            )
            sv = np.linalg.svd(a, compute_uv=False)
            if sv[-1] < 1e-12 * max(sv[0], 1.0):
                continue
            mu = np.linalg.lstsq(a, b, rcond=None)[0]
            if np.abs(a @ mu - b).max() > tol or mu.min() < -tol:
                continue
            mu = np.clip(mu, 0, None)
            mu = mu / mu.sum()
            p = float(sum(m * pts[j].p for m, j in zip(mu, support)))
            full = np.zeros(n)
            full[list(support)] = mu
            if best_lo is None or p < best_lo[0]:
                best_lo = (p, full)
            if best_hi is None or p > best_hi[0]:
                best_hi = (p, full)
    if best_lo is None:
        return None
    return AxisInterval(
        min(max(best_lo[0], 0.0), 1.0),
        min(max(best_hi[0], 0.0), 1.0),
        tuple(best_lo[1]),
        tuple(best_hi[1]),
    )


# ---------------------------------------------------------------------------
# Adaptive quadrature on [0, pi]

_GK_X = np.array(
    [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144845693013,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.000000000000000000000000000000000,
    ]
)
_GK_WK = np.array(
    [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ]
)
_GK_WG = np.array(
    [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ]
)


def _gk15(f, a: float, b: float) -> tuple[float, float]:
    c, h = (a + b) / 2, (b - a) / 2
    x = np.concatenate([c - h * _GK_X[:-1], [c], c + h * _GK_X[:-1][::-1]])
    fx = np.array([f(v) for v in x], dtype=float)
    wk = np.concatenate([_GK_WK[:-1], [_GK_WK[-1]], _GK_WK[:-1][::-1]])
    kron = h * np.dot(wk, fx)
    # Gauss nodes are the odd-indexed Kronrod nodes
    gauss_idx = [1, 3, 5, 7, 9, 11, 13]
    wg = np.array(
        [_GK_WG[0], _GK_WG[1], _GK_WG[2], _GK_WG[3], _GK_WG[2], _GK_WG[1], _GK_WG[0]]
    )
    gauss = h * np.dot(wg, fx[gauss_idx])
    return kron, abs(kron - gauss)


def quad_0_pi(f, tol: float = 1e-10, max_panels: int = 4000) -> float:
    """Integrate f over [0, pi] by globally adaptive Gauss-Kronrod bisection.

    The panel with the largest error estimate is split until the summed
    estimate drops below tol.  Per-panel errors are floored at round-off
    level so that cancellation noise cannot force endless refinement.
    """
    eps = np.finfo(float).eps

    def make(a, b):
        est, err = _gk15(f, a, b)
        return (-max(err, 0.0), a, b, est)

    heap = [make(0.0, np.pi)]
    n = 1
    while True:
        total = sum(p[3] for p in heap)
        err = sum(-p[0] for p in heap)
        if err < max(tol, 50 * eps * sum(abs(p[3]) for p in heap)):
            return float(total)
        if n >= max_panels:
            raise NoConvergence("quadrature did not reach tolerance", float(total))
        _, a, b, _ = heapq.heappop(heap)
        m = (a + b) / 2
        heapq.heappush(heap, make(a, m))
        heapq.heappush(heap, make(m, b))
        n += 1


# ---------------------------------------------------------------------------
# Lower convex envelope


def lower_convex_envelope(samples):
    """Largest convex function below the samples, evaluated at the sample abscissae."""
    pts = [(float(x), float(y)) for x, y in samples]
    if len(pts) < 2:
        raise ValueError("need at least two samples")
    xs = np.array([x for x, _ in pts])
    if np.any(np.diff(xs) <= 0):
        raise UnsortedInput("abscissae must be strictly increasing")
    hull: list[tuple[float, float]] = []
    for x, y in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point unless it lies strictly below the chord
            if (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append((x, y))
    hx = np.array([h[0] for h in hull])
    hy = np.array([h[1] for h in hull])
    env = np.interp(xs, hx, hy)
    env = np.minimum(env, np.array([y for _, y in pts]))
    return list(zip(xs.tolist(), env.tolist()))
