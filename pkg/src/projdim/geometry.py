"""Geometry of d-simplices and convex polytopes on the unit-l1 simplex.

All bodies live in the hyperplane {x in R^(d+1) : sum x = 1}.  Measures are
d-dimensional Lebesgue measure inside that hyperplane, which carries the
Euclidean metric inherited from R^(d+1); computations map points through an
orthonormal basis of {sum x = 0} so determinants need no extra metric factor.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache, cached_property

import numpy as np

from .words import GeneratorMatrix, HoleMatrix, MatrixProduct, projectivize

_DEGENERATE_LOG = math.log(1e-300)


@lru_cache(maxsize=None)
def hyperplane_basis(ambient: int) -> np.ndarray:
    """Orthonormal basis (ambient x ambient-1) of the hyperplane {sum x = 0}."""
    ones = np.ones((ambient, 1)) / math.sqrt(ambient)
    # complete to an orthonormal basis of R^ambient, drop the ones-direction
    q, _ = np.linalg.qr(np.hstack([ones, np.eye(ambient)[:, : ambient - 1]]))
    basis = q[:, 1:]
    # fix signs for reproducibility
    for j in range(basis.shape[1]):
        k = np.argmax(np.abs(basis[:, j]))
        if basis[k, j] < 0:
            basis[:, j] = -basis[:, j]
    return basis


def to_plane(points: np.ndarray) -> np.ndarray:
    """Isometric coordinates in R^d of points on the hyperplane {sum x = 1}."""
    points = np.asarray(points, dtype=np.float64)
    ambient = points.shape[-1]
    origin = np.full(ambient, 1.0 / ambient)
    return (points - origin) @ hyperplane_basis(ambient)


def _gram_measure(edges: np.ndarray) -> float:
    """k-volume of the parallelepiped spanned by rows of edges, via Gram det."""
    g = edges @ edges.T
    sign, logdet = np.linalg.slogdet(g)
    if sign <= 0:
        return 0.0
    return math.exp(0.5 * logdet)


@dataclass(frozen=True)
class Simplex:
    """A d-simplex given by d+1 vertices on the unit simplex of R^(d+1)."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("need d+1 vertices in R^(d+1)")
        object.__setattr__(self, "vertices", v)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1] - 1

    @cached_property
    def _plane_vertices(self) -> np.ndarray:
        return to_plane(self.vertices)

    @cached_property
    def log_volume(self) -> float:
        e = self._plane_vertices[1:] - self._plane_vertices[0]
        sign, logdet = np.linalg.slogdet(e)
        if sign == 0:
            return -math.inf
        return logdet - math.log(math.factorial(self.dim))

    @cached_property
    def volume(self) -> float:
        return math.exp(self.log_volume) if self.log_volume > -math.inf else 0.0

    @property
    def is_degenerate(self) -> bool:
        return self.log_volume < _DEGENERATE_LOG

    @cached_property
    def facet_measures(self) -> np.ndarray:
        """(d-1)-measures; entry j is the facet omitting vertex j."""
        if self.is_degenerate:
            raise ValueError("degenerate simplex has no facet decomposition")
        pv = self._plane_vertices
        d = self.dim
        out = np.empty(d + 1)
        scale = math.factorial(d - 1) if d > 1 else 1
        for j in range(d + 1):
            pts = np.delete(pv, j, axis=0)
            if d == 1:
                out[j] = 1.0  # 0-dimensional measure of a point
            else:
                out[j] = _gram_measure(pts[1:] - pts[0]) / scale
        return out

    @cached_property
    def perimeter(self) -> float:
        return float(self.facet_measures.sum())

    @cached_property
    def incentre(self) -> np.ndarray:
        """Facet-measure-weighted vertex average (weights: opposite facets)."""
        w = self.facet_measures
        return (w @ self.vertices) / w.sum()

    @cached_property
    def inradius(self) -> float:
        """Heron form In = d * vol / per."""
        if self.is_degenerate:
            raise ValueError("degenerate simplex has no inradius")
        return self.dim * self.volume / self.perimeter

    @cached_property
    def halfspaces(self) -> tuple[np.ndarray, np.ndarray]:
        """(A, b) with A x <= b inside, rows unit-normalized, in plane coords."""
        pv = self._plane_vertices
        d = self.dim
        rows, offs = [], []
        for j in range(d + 1):
            pts = np.delete(pv, j, axis=0)
            # normal to the facet: solve for the hyperplane a.x = b through pts
            e = pts[1:] - pts[0]
            # nullspace of e (d-1 x d): last right-singular vector
            _, _, vt = np.linalg.svd(e) if d > 1 else (None, None, np.array([[1.0]]))
            a = vt[-1]
            b = float(a @ pts[0])
            if a @ pv[j] > b:  # orient so the omitted vertex is inside
                a, b = -a, -b
            rows.append(a)
            offs.append(b)
        return np.array(rows), np.array(offs)

    def distance_to_boundary(self, points: np.ndarray) -> np.ndarray:
        """Signed distance to the boundary (positive inside), in plane coords."""
        a, b = self.halfspaces
        p = to_plane(np.atleast_2d(points))
        return (b[None, :] - p @ a.T).min(axis=1)

    def barycentric(self, points: np.ndarray) -> np.ndarray:
        """Barycentric coordinates of ambient points w.r.t. this simplex."""
        p = np.atleast_2d(np.asarray(points, dtype=np.float64))
        return np.linalg.solve(self.vertices.T, p.T).T

    def contains(self, points: np.ndarray, tol: float = 1e-12) -> np.ndarray:
        lam = self.barycentric(points)
        return lam.min(axis=1) >= -tol

    def scaled_about_incentre(self, factor: float) -> "Simplex":
        c = self.incentre
        return Simplex(c + factor * (self.vertices - c))

    def sample_uniform(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Uniform points via the exponential-spacings construction."""
        w = rng.exponential(size=(n, self.dim + 1))
        w /= w.sum(axis=1, keepdims=True)
        return w @ self.vertices


def standard_simplex(d: int) -> Simplex:
    return Simplex(np.eye(d + 1))


@dataclass(frozen=True)
class ConvexPolytope:
    """Convex hull of a finite point set on the unit simplex."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.float64)
        if v.ndim != 2:
            raise ValueError("vertices must be a 2-d array")
        object.__setattr__(self, "vertices", v)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1] - 1

    @cached_property
    def _hull(self):
        from scipy.spatial import ConvexHull

        return ConvexHull(to_plane(self.vertices))

    @cached_property
    def volume(self) -> float:
        return float(self._hull.volume)

    @cached_property
    def surface_measure(self) -> float:
        return float(self._hull.area)

    @cached_property
    def halfspaces(self) -> tuple[np.ndarray, np.ndarray]:
        """(A, b) with A x <= b inside, rows unit-normalized, in plane coords."""
        eq = self._hull.equations  # a.x + b <= 0 inside, |a| = 1
        return eq[:, :-1].copy(), -eq[:, -1].copy()

    @cached_property
    def _chebyshev(self) -> tuple[np.ndarray, float]:
        from .oracles import chebyshev_center

        centre, radius = chebyshev_center(self)
        return centre, radius

    @property
    def chebyshev_centre(self) -> np.ndarray:
        return self._chebyshev[0]

    @property
    def inradius(self) -> float:
        return self._chebyshev[1]

    def distance_to_boundary(self, points: np.ndarray) -> np.ndarray:
        a, b = self.halfspaces
        p = to_plane(np.atleast_2d(points))
        return (b[None, :] - p @ a.T).min(axis=1)

    def contains(self, points: np.ndarray, tol: float = 1e-12) -> np.ndarray:
        return self.distance_to_boundary(points) >= -tol

    def sample_uniform(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Uniform points by rejection from the bounding box (plane coords)."""
        pv = to_plane(self.vertices)
        lo, hi = pv.min(axis=0), pv.max(axis=0)
        a, b = self.halfspaces
        out = []
        got = 0
        while got < n:
            cand = rng.uniform(lo, hi, size=(max(2 * (n - got), 1024), len(lo)))
            keep = cand[(cand @ a.T <= b[None, :]).all(axis=1)]
            out.append(keep)
            got += len(keep)
        planar = np.vstack(out)[:n]
        ambient = self.vertices.shape[1]
        basis = hyperplane_basis(ambient)
        return planar @ basis.T + 1.0 / ambient


def simplex_volume(s: Simplex) -> float:
    return s.volume


def facet_measures(s: Simplex) -> np.ndarray:
    return s.facet_measures


def incentre(s: Simplex) -> np.ndarray:
    return s.incentre


def inradius(s: Simplex) -> float:
    return s.inradius


def inner_neighborhood_volume(s: Simplex, eps: float) -> float:
    """Exact volume of {x in S : dist(x, boundary) <= eps}.

    Equals vol(S) * (1 - max(0, 1 - eps/In)^d): the complement is the
    (1 - eps/In)-scaled copy of S about the incentre.
    """
    if eps < 0:
        raise ValueError("eps must be >= 0")
    if s.is_degenerate:
        raise ValueError("degenerate simplex")
    shrink = max(0.0, 1.0 - eps / s.inradius)
    return s.volume * (1.0 - shrink ** s.dim)


def inner_neighborhood_volume_upper(p, eps: float) -> float:
    """Upper bound for the inner-neighborhood volume of a convex body.

    For simplices the bound is attained, so this coincides with
    inner_neighborhood_volume on Simplex inputs.
    """
    if eps < 0:
        raise ValueError("eps must be >= 0")
    if isinstance(p, Simplex):
        return inner_neighborhood_volume(p, eps)
    shrink = max(0.0, 1.0 - eps / p.inradius)
    return p.volume * (1.0 - shrink ** p.dim)


def image_simplex(n, s: Simplex) -> Simplex:
    """The simplex with vertices T(v) = Nv/|Nv| for each vertex v of S."""
    return Simplex(np.array([projectivize(n, v) for v in s.vertices]))


def volume_ratio(n, s: Simplex) -> float:
    """vol(T(S)) / vol(S) = product over vertices v of |N v|_1 ^ -1."""
    if isinstance(n, (MatrixProduct, GeneratorMatrix, HoleMatrix)):
        arr = n.as_array()
    else:
        arr = np.asarray(n, dtype=np.float64)
    sums = (s.vertices @ arr.T).sum(axis=1)  # |N v|_1 per vertex (all non-negative)
    return float(np.prod(1.0 / sums))
