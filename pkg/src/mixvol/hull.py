"""Convex hulls, volumes and certified inradii of finite point sets.

Full-dimensional hulls are delegated to Qhull (``scipy.spatial.ConvexHull``);
affine dimension, facet merging, volume and the degenerate cases are handled
here so that every point set, including lower-dimensional ones, gets a
well-defined :class:`Hull`.
"""

from __future__ import annotations

import itertools
import json
import logging
import math

import numpy as np
from scipy.spatial import ConvexHull, QhullError

__all__ = [
    "Hull",
    "KernelError",
    "affine_dimension",
    "convex_hull",
    "volume",
    "extreme_points",
    "inradius_at_origin",
    "cone_volume",
    "zonotope_volume",
]

log = logging.getLogger(__name__)

RANK_RTOL = 1e-10
FACET_DECIMALS = 9


class KernelError(RuntimeError):
    """A geometric kernel produced an inconsistent result."""


class Hull:
    """Facet description and volume of the convex hull of a point set.

    Attributes
    ----------
    dim : int
        Ambient dimension.
    affine_dim : int
        Dimension of the affine hull of the points.
    normals : (F, dim) ndarray
        Unit outer facet normals; empty unless ``affine_dim == dim``.
    offsets : (F,) ndarray
        Facet offsets, the hull is ``{x : normals @ x <= offsets}``.
    hull_vertices : ndarray of int
        Indices of the extreme input points.
    volume : float
        Ambient ``dim``-volume.
    """

    __slots__ = ("dim", "affine_dim", "normals", "offsets", "hull_vertices", "volume", "simplices")

    def __init__(self, dim, affine_dim, normals, offsets, hull_vertices, volume, simplices=None):
        self.dim = int(dim)
        self.affine_dim = int(affine_dim)
        self.normals = np.asarray(normals, dtype=float).reshape(-1, self.dim)
        self.offsets = np.asarray(offsets, dtype=float).reshape(-1)
        self.hull_vertices = np.asarray(hull_vertices, dtype=np.intp)
        self.volume = float(volume)
        # triangulated boundary (index triples in the input array), used by cone_volume
        self.simplices = simplices

    @property
    def facets(self) -> list[tuple[np.ndarray, float]]:
        return [(a, float(b)) for a, b in zip(self.normals, self.offsets)]

    @property
    def full_dimensional(self) -> bool:
        return self.affine_dim == self.dim

    def facets_json(self) -> str:
        return json.dumps(
            {
                "dim": self.dim,
                "affine_dim": self.affine_dim,
                "volume": self.volume,
                "facets": [{"normal": a.tolist(), "offset": b} for a, b in self.facets],
                "hull_vertices": self.hull_vertices.tolist(),
            }
        )

    def __repr__(self):
        return (
            f"Hull(dim={self.dim}, affine_dim={self.affine_dim}, facets={len(self.offsets)}, "
            f"vertices={len(self.hull_vertices)}, volume={self.volume:.6g})"
        )


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1) if pts.size else pts.reshape(0, 1)
    if pts.ndim != 2:
        raise ValueError("points must be a 2-D array of shape (N, k)")
    if pts.shape[0] == 0:
        raise ValueError("point list is empty")
    if pts.shape[1] == 0:
        raise ValueError("points must have at least one coordinate")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points contain non-finite coordinates")
    return pts


def _affine_frame(pts: np.ndarray) -> tuple[int, np.ndarray, np.ndarray]:
    """Affine dimension, centroid and an orthonormal basis (rows) of the affine hull."""
    center = pts.mean(axis=0)
    centered = pts - center
    if pts.shape[0] == 1:
        return 0, center, np.zeros((0, pts.shape[1]))
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    if s[0] == 0.0:
        return 0, center, np.zeros((0, pts.shape[1]))
    rank = int(np.count_nonzero(s > RANK_RTOL * s[0]))
    return rank, center, vt[:rank]


def affine_dimension(points) -> int:
    """Dimension of the affine hull, by singular values above ``1e-10 * s_max``."""
    return _affine_frame(_as_points(points))[0]


def _interval_hull(x: np.ndarray) -> tuple[np.ndarray, float]:
    lo, hi = int(np.argmin(x)), int(np.argmax(x))
    verts = np.array([lo] if lo == hi else [lo, hi], dtype=np.intp)
    return verts, float(x[hi] - x[lo])


def _qhull(pts: np.ndarray) -> ConvexHull:
    try:
        return ConvexHull(pts)
    except QhullError as exc:  # pragma: no cover - guarded by the rank test
        raise KernelError(f"qhull failed on {pts.shape[0]} points in R^{pts.shape[1]}: {exc}") from exc


def _extreme_points_in_frame(pts: np.ndarray, rank: int, center: np.ndarray, basis: np.ndarray) -> np.ndarray:
    if rank == 0:
        return np.array([0], dtype=np.intp)
    local = (pts - center) @ basis.T
    if rank == 1:
        return _interval_hull(local[:, 0])[0]
    return np.sort(_qhull(local).vertices)


def _fan_volume(pts: np.ndarray, simplices: np.ndarray, apex: np.ndarray) -> float:
    k = pts.shape[1]
    mats = pts[simplices] - apex
    return float(np.abs(np.linalg.det(mats)).sum()) / math.factorial(k)


def convex_hull(points, debug: bool = False) -> Hull:
    """Convex hull of a finite point set in R^k.

    Lower-dimensional inputs get an empty facet list, zero volume and their
    true affine dimension; ``hull_vertices`` are still the extreme points,
    found inside the affine hull.  Volume is the fan triangulation from the
    centroid of the extreme points over Qhull's simplicial facets.
    """
    pts = _as_points(points)
    n, k = pts.shape
    rank, center, basis = _affine_frame(pts)
    if rank < k:
        hull = Hull(k, rank, np.zeros((0, k)), np.zeros(0), _extreme_points_in_frame(pts, rank, center, basis), 0.0)
    elif k == 1:
        verts, length = _interval_hull(pts[:, 0])
        lo, hi = pts[verts[0], 0], pts[verts[-1], 0]
        hull = Hull(1, 1, [[-1.0], [1.0]], [-lo, hi], verts, length, simplices=verts.reshape(-1, 1))
    else:
        qh = _qhull(pts)
        eq = qh.equations
        normals = eq[:, :-1]
        norms = np.linalg.norm(normals, axis=1)
        normals = normals / norms[:, None]
        offsets = -eq[:, -1] / norms
        verts = np.sort(qh.vertices)
        apex = pts[verts].mean(axis=0)
        vol = _fan_volume(pts, qh.simplices, apex)
        key = np.round(np.hstack([normals, offsets[:, None]]), FACET_DECIMALS)
        _, first = np.unique(key, axis=0, return_index=True)
        first = np.sort(first)
        hull = Hull(k, k, normals[first], offsets[first], verts, vol, simplices=qh.simplices)
    if debug:
        log.debug("hull facets: %s", hull.facets_json())
    return hull


def volume(points) -> float:
    """Ambient volume of the convex hull of ``points`` (0 for degenerate sets)."""
    pts = _as_points(points)
    k = pts.shape[1]
    if pts.shape[0] <= k:
        return 0.0
    if k == 1:
        return float(pts[:, 0].max() - pts[:, 0].min())
    rank = _affine_frame(pts)[0]
    if rank < k:
        return 0.0
    qh = _qhull(pts)
    return _fan_volume(pts, qh.simplices, pts[qh.vertices].mean(axis=0))


def extreme_points(points) -> np.ndarray:
    """Indices of the extreme points, without building the facet description."""
    pts = _as_points(points)
    if pts.shape[0] <= 2:
        if pts.shape[0] == 2 and np.array_equal(pts[0], pts[1]):
            return np.array([0], dtype=np.intp)
        return np.arange(pts.shape[0], dtype=np.intp)
    rank, center, basis = _affine_frame(pts)
    if rank == pts.shape[1] and rank > 1:
        return np.sort(_qhull(pts).vertices)
    return _extreme_points_in_frame(pts, rank, center, basis if rank < pts.shape[1] else np.eye(rank))


def cone_volume(points, hull: Hull, apex) -> float:
    """Sum of simplex volumes from ``apex`` over the triangulated boundary.

    Self-check for :func:`convex_hull`: for any apex inside the hull this
    must reproduce ``hull.volume``.
    """
    pts = _as_points(points)
    if not hull.full_dimensional:
        return 0.0
    apex = np.asarray(apex, dtype=float)
    if hull.dim == 1:
        return float(np.abs(pts[hull.hull_vertices, 0] - apex[0]).sum())
    return _fan_volume(pts, hull.simplices, apex)


def inradius_at_origin(hull: Hull) -> float:
    """Largest ``r`` with ``r * B^k`` inside the hull, for a hull containing 0 in its interior."""
    if not hull.full_dimensional:
        raise ValueError("inradius needs a full-dimensional hull")
    r = float(hull.offsets.min())
    if r <= 0.0:
        raise ValueError("origin is not an interior point of the hull")
    return r


def zonotope_volume(generators) -> float:
    """Volume of the zonotope ``sum_i [0, g_i]`` in R^k.

    Uses the exact formula ``sum over k-subsets S of |det(g_S)|``; the cases
    k = 1, 2, 3 are vectorised so that a few thousand generators stay cheap.
    """
    g = _as_points(generators)
    n, k = g.shape
    if n < k:
        return 0.0
    if k == 1:
        return float(np.abs(g[:, 0]).sum())
    if k == 2:
        dets = np.abs(np.outer(g[:, 0], g[:, 1]) - np.outer(g[:, 1], g[:, 0]))
        return float(dets.sum() / 2.0)
    if k == 3:
        total = 0.0
        for i in range(n - 2):
            rest = g[i + 1:]
            cr = np.cross(g[i], rest)
            # |det(g_i, g_j, g_l)| is symmetric in (j, l) with zero diagonal
            total += float(np.abs(cr @ rest.T).sum()) / 2.0
        return total
    if math.comb(n, k) > 2_000_000:
        raise ValueError(f"zonotope with {n} generators in R^{k} is beyond desk scale")
    idx = np.array(list(itertools.combinations(range(n), k)))
    return float(np.abs(np.linalg.det(g[idx])).sum())
