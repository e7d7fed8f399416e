"""Independent numerical oracles for the analytic formulas.

Nothing here reuses the closed forms it certifies: inradii come from a
linear program over the facet halfspaces, neighborhood volumes from
rejection-free Monte Carlo, box dimensions from literal grid occupancy on
generated orbit clouds, and the Laplace transform from adaptive quadrature
of the neighborhood-volume function.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .geometry import ConvexPolytope, Simplex, hyperplane_basis, to_plane
from .series import _hole_level_terms
from .system import IfsSystem
from .words import MaxDepth

EQUILATERAL = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3.0) / 2.0]])

_BURN_IN = 200


@dataclass(frozen=True)
class McEstimate:
    """A seeded Monte Carlo value with its standard error."""

    value: float
    standard_error: float
    samples: int
    seed: int


@dataclass(frozen=True)
class BoxCountReport:
    """Grid-occupancy counts over a schedule of box sizes, finest last."""

    eps: tuple[float, ...]
    counts: tuple[int, ...]
    slope: float
    residual: float

    def __post_init__(self):
        pairs = zip(self.counts, self.counts[1:])
        if any(c2 < c1 for c1, c2 in pairs):
            raise ValueError("box counts must be non-increasing in eps")


def mc_inner_volume(region, eps: float, samples: int = 100_000, seed: int = 0) -> McEstimate:
    """Volume of the inner eps-band of a convex region, by uniform sampling."""
    if samples < 10_000:
        raise ValueError("need at least 10^4 samples")
    if eps < 0:
        raise ValueError("eps must be non-negative")
    if isinstance(region, Simplex) and region.is_degenerate:
        raise ValueError("degenerate region")
    rng = np.random.default_rng(seed)
    pts = region.sample_uniform(samples, rng)
    hits = region.distance_to_boundary(pts) < eps
    p = float(hits.mean())
    vol = region.volume
    return McEstimate(
        value=p * vol,
        standard_error=vol * math.sqrt(p * (1.0 - p) / samples),
        samples=samples,
        seed=seed,
    )


def _simplex_lp(t: np.ndarray, b: np.ndarray, c: np.ndarray, max_iter: int = 500) -> np.ndarray:
    """max c.x subject to t x <= b, x >= 0, with b > 0 (slack basis feasible).

    Dense tableau simplex method with Bland's rule; dimensions here are a
    handful of variables, so no factorization is needed.
    """
    m, n = t.shape
    tab = np.zeros((m + 1, n + m + 1))
    tab[:m, :n] = t
    tab[:m, n : n + m] = np.eye(m)
    tab[:m, -1] = b
    tab[m, :n] = -c
    basis = list(range(n, n + m))
    for _ in range(max_iter):
        enter = -1
        for j in range(n + m):
            if tab[m, j] < -1e-11:
                enter = j
                break
        if enter < 0:
            break
        leave = -1
        best = math.inf
        for i in range(m):
            a = tab[i, enter]
            if a > 1e-11:
                ratio = tab[i, -1] / a
                if ratio < best - 1e-13 or (
                    abs(ratio - best) <= 1e-13 and (leave < 0 or basis[i] < basis[leave])
                ):
                    best = ratio
                    leave = i
        if leave < 0:
            raise ValueError("LP unbounded (degenerate input)")
        tab[leave] /= tab[leave, enter]
        for i in range(m + 1):
            if i != leave and tab[i, enter] != 0.0:
                tab[i] -= tab[i, enter] * tab[leave]
        basis[leave] = enter
    else:
        raise ArithmeticError("LP did not converge")
    x = np.zeros(n + m)
    for i, bv in enumerate(basis):
        x[bv] = tab[i, -1]
    return x[:n]


def chebyshev_center(region) -> tuple[np.ndarray, float]:
    """Deepest point of a convex region and its distance to the boundary.

    Maximizes r subject to a_i . u + r <= b_i over the facet halfspaces in
    hyperplane coordinates, then polishes the LP vertex by solving the
    active constraints as a linear system.  Returns (ambient point, radius).
    """
    if isinstance(region, Simplex) and region.is_degenerate:
        raise ValueError("LP infeasible: degenerate input")
    a, b = region.halfspaces
    k = a.shape[1]
    c0 = to_plane(region.vertices).mean(axis=0)
    b0 = b - a @ c0
    if b0.min() <= 0:
        raise ValueError("LP infeasible: degenerate input")
    # x = (u+, u-, r) >= 0 encodes the free centre offset u = u+ - u-
    t = np.hstack([a, -a, np.ones((len(b0), 1))])
    cost = np.zeros(2 * k + 1)
    cost[-1] = 1.0
    x = _simplex_lp(t, b0, cost)
    u = x[:k] - x[k : 2 * k]
    r = x[2 * k]
    # polish: re-solve the active facets exactly (least-norm on ties)
    slack = b0 - (a @ u + r)
    active = slack < 1e-6 * max(1.0, float(np.abs(b0).max()))
    if active.sum() >= 1:
        m_act = np.hstack([a[active], np.ones((int(active.sum()), 1))])
        z, *_ = np.linalg.lstsq(m_act, b0[active], rcond=None)
        u2, r2 = z[:k], z[k]
        if r2 >= r - 1e-9 and (a @ u2 + r2 <= b0 + 1e-9).all():
            u, r = u2, r2
    ambient = region.vertices.shape[1]
    point = (c0 + u) @ hyperplane_basis(ambient).T + 1.0 / ambient
    return point, float(r)


def grid_box_count(points: np.ndarray, eps_schedule) -> BoxCountReport:
    """Occupied-box counts of a cloud over a schedule of grid sizes.

    The cloud's bounding box is normalized to the unit cube per axis first
    (box dimension is affine-invariant); the slope regresses log N(eps)
    on log(1/eps).
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 100_000:
        raise ValueError("need a cloud of at least 10^5 points")
    eps = sorted(float(e) for e in eps_schedule)
    if len(eps) < 4:
        raise ValueError("need at least 4 grid scales")
    if eps[0] <= 0 or eps[-1] > 1:
        raise ValueError("grid sizes must lie in (0, 1]")
    lo = pts.min(axis=0)
    span = np.maximum(pts.max(axis=0) - lo, 1e-300)
    unit = (pts - lo) / span
    eps = eps[::-1]  # coarse to fine
    counts = []
    for e in eps:
        nb = int(math.ceil(1.0 / e))
        idx = np.minimum((unit * nb).astype(np.int64), nb - 1)
        strides = nb ** np.arange(pts.shape[1] - 1, -1, -1, dtype=np.int64)
        counts.append(int(np.unique(idx @ strides).size))
    xs = np.log(1.0 / np.asarray(eps))
    ys = np.log(np.asarray(counts, dtype=np.float64))
    coef = np.polyfit(xs, ys, 1)
    res = float(np.sqrt(np.mean((ys - np.polyval(coef, xs)) ** 2)))
    return BoxCountReport(tuple(eps), tuple(counts), float(coef[0]), res)


def quadrature_laplace(system: IfsSystem, t: float, depth: int,
                       tolerance: float = 1e-8) -> tuple[float, float]:
    """(value, error estimate) of the transform integral at a fixed truncation.

    Integrates eps^(t-1) times the depth-n neighborhood volume over (0, 1)
    with the algebraic endpoint weight.  The integrand must be the
    residual-completed (upper) neighborhood value: the un-excised residual
    belongs to the depth-n approximant at distance zero, and only with it
    does the integral match the closed form at the same truncation.
    """
    if t <= 0:
        raise ValueError("t must be positive (divergent weight at 0 otherwise)")
    from scipy.integrate import IntegrationWarning, quad

    terms = _hole_level_terms(system, MaxDepth(int(depth)))
    vol = np.concatenate([np.exp(lv) for lv, _ in terms])
    inr = np.concatenate([np.exp(li) for _, li in terms])
    vol_delta = math.exp(system.simplex.log_volume)
    d = system.d

    def upper(eps):
        core = np.maximum(0.0, 1.0 - eps / inr) ** d
        return vol_delta - float((vol * core).sum())

    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            value, err = quad(upper, 0.0, 1.0, weight="alg",
                              wvar=(t - 1.0, 0.0), epsabs=tolerance,
                              epsrel=tolerance, limit=200)
        except IntegrationWarning as exc:
            raise ArithmeticError("quadrature tolerance not reached: %s" % exc)
    # quad's estimate is conservative on this integrand (one derivative kink
    # per hole inradius), so only an order-of-magnitude miss is a failure
    if err > max(10.0 * tolerance, 1e-12 * abs(value)):
        raise ArithmeticError("quadrature error %.3g above tolerance %.3g" % (err, tolerance))
    return float(value), float(err)


_KERNELS = None


def _orbit_kernels():
    global _KERNELS
    if _KERNELS is None:
        import numba

        @numba.njit(cache=True)
        def affine(verts, idx, x0, ratio):
            n = idx.shape[0]
            k = verts.shape[1]
            out = np.empty((n, k))
            x = x0.copy()
            for i in range(n):
                v = verts[idx[i]]
                for j in range(k):
                    x[j] = x[j] + ratio * (v[j] - x[j])
                out[i] = x
            return out

        @numba.njit(cache=True)
        def projective(gens, idx, x0):
            n = idx.shape[0]
            k = x0.shape[0]
            out = np.empty((n, k))
            x = x0.copy()
            y = np.empty(k)
            for i in range(n):
                g = gens[idx[i]]
                s = 0.0
                for r in range(k):
                    acc = 0.0
                    for c in range(k):
                        acc += g[r, c] * x[c]
                    y[r] = acc
                    s += acc
                for r in range(k):
                    x[r] = y[r] / s
                out[i] = x
            return out

        _KERNELS = (affine, projective)
    return _KERNELS


def sierpinski_cloud(n: int = 1_000_000, seed: int = 12345) -> np.ndarray:
    """Chaos-game orbit of the three half-contractions toward triangle corners.

    A known-dimension calibration fixture (slope log 3 / log 2), entirely
    outside the projective machinery.
    """
    affine, _ = _orbit_kernels()
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, 3, size=n + _BURN_IN)
    pts = affine(EQUILATERAL, idx, np.array([0.3, 0.3]), 0.5)
    return pts[_BURN_IN:]


def projective_orbit_cloud(system: IfsSystem, n: int = 1_000_000,
                           seed: int = 12345) -> np.ndarray:
    """Random compositions of the projectivized generators from the incentre.

    Returns barycentric points on the simplex; project with to_equilateral
    for d = 2 plotting or box counting.
    """
    _, projective = _orbit_kernels()
    rng = np.random.default_rng(seed)
    m = len(system.generators)
    idx = rng.integers(0, m, size=n + _BURN_IN)
    gens = np.stack([g.as_array() for g in system.generators])
    x0 = np.full(system.d + 1, 1.0 / (system.d + 1))
    pts = projective(gens, idx, x0)
    return pts[_BURN_IN:]


def to_equilateral(points: np.ndarray) -> np.ndarray:
    """Barycentric triples to planar coordinates on the unit equilateral."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.shape[-1] != 3:
        raise ValueError("equilateral projection is for barycentric triples")
    return pts @ EQUILATERAL
