"""Convex bodies as vertex lists and their Minkowski algebra.

A :class:`ConvexBody` is the convex hull of a finite point list.  Sums,
nonnegative scalings and linear projections act on the vertex list directly,
which is exact for V-polytopes.  Euclidean balls enter only through
:class:`BallBracket`, an inscribed polytope together with a certified factor
that blows it up to a circumscribed one.
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass

import numpy as np

from . import hull as _hull
from .constants import sphere_area
from .sampling import RandomStream, haar_orthogonal, uniform_sphere

__all__ = [
    "ConvexBody",
    "BodySpec",
    "BallBracket",
    "BODY_KINDS",
    "make_body",
    "minkowski_sum",
    "scale",
    "project",
    "ball_bracket",
    "cube",
    "simplex",
    "cross_polytope",
    "segment",
    "point",
    "parse_shortcut",
]

BODY_KINDS = ("vertices", "cube", "simplex", "cross_polytope", "segment", "point", "ball_inscribed")
ORTHONORMAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ConvexBody:
    """Convex hull of ``vertices``, an ``(N, ambient_dim)`` array.

    Duplicate or interior points are allowed.  The array is stored read-only.
    """

    vertices: np.ndarray
    label: str = ""

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim == 1:
            v = v.reshape(1, -1)
        if v.ndim != 2 or v.shape[0] == 0 or v.shape[1] == 0:
            raise ValueError("a body needs a nonempty (N, n) vertex array")
        if not np.all(np.isfinite(v)):
            raise ValueError("vertex coordinates must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "vertices", v)

    @property
    def ambient_dim(self) -> int:
        return self.vertices.shape[1]

    def hull(self) -> _hull.Hull:
        return _hull.convex_hull(self.vertices)

    def volume(self) -> float:
        return _hull.volume(self.vertices)

    def pruned(self) -> "ConvexBody":
        """Same body with interior and duplicate points dropped."""
        idx = self.hull().hull_vertices
        return ConvexBody(self.vertices[idx], self.label)

    def key(self) -> tuple:
        """Hashable identity of the vertex array, used to group equal bodies."""
        return (self.vertices.shape, self.vertices.tobytes())

    def __repr__(self):
        name = f" {self.label!r}" if self.label else ""
        return f"ConvexBody{name}(n={self.ambient_dim}, vertices={self.vertices.shape[0]})"


@dataclass(frozen=True)
class BallBracket:
    """``inner <= B^k <= outer_scale * inner``; ``inner`` has its vertices on S^(k-1)."""

    inner: ConvexBody
    outer_scale: float
    m: int
    seed: int

    @property
    def k(self) -> int:
        return self.inner.ambient_dim

    def outer(self) -> ConvexBody:
        return scale(self.inner, self.outer_scale)


@dataclass(frozen=True)
class BodySpec:
    """Serializable description of a catalog body.

    JSON form: ``{"kind": ..., "dim": n, "points": [[...]], "m": m, "seed": s, "label": ...}``;
    ``points`` is used only by the kinds ``vertices``, ``segment`` and ``point``.
    """

    kind: str
    dim: int | None = None
    points: tuple | None = None
    m: int | None = None
    seed: int | None = None
    label: str = ""

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.dim is not None:
            out["dim"] = self.dim
        if self.points is not None:
            out["points"] = [list(p) for p in self.points]
        if self.m is not None:
            out["m"] = self.m
        if self.seed is not None:
            out["seed"] = self.seed
        if self.label:
            out["label"] = self.label
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "BodySpec":
        if not isinstance(data, dict):
            raise ValueError(f"body spec must be a JSON object, got {type(data).__name__}")
        unknown = set(data) - {"kind", "dim", "points", "m", "seed", "label"}
        if unknown:
            raise ValueError(f"unknown body spec field(s): {', '.join(sorted(unknown))}")
        if data.get("kind") not in BODY_KINDS:
            raise ValueError(f"body spec field 'kind' must be one of {BODY_KINDS}, got {data.get('kind')!r}")
        points = data.get("points")
        if points is not None:
            if not isinstance(points, list) or not all(isinstance(p, list) for p in points):
                raise ValueError("body spec field 'points' must be a list of coordinate lists")
            try:
                points = tuple(tuple(float(c) for c in p) for p in points)
            except (TypeError, ValueError) as exc:
                raise ValueError(f"body spec field 'points' is malformed: {exc}") from None
        for name in ("dim", "m", "seed"):
            val = data.get(name)
            if val is not None and (isinstance(val, bool) or not isinstance(val, int)):
                raise ValueError(f"body spec field '{name}' must be an integer, got {val!r}")
        return cls(
            kind=data["kind"],
            dim=data.get("dim"),
            points=points,
            m=data.get("m"),
            seed=data.get("seed"),
            label=str(data.get("label", "")),
        )


def _need_dim(spec: BodySpec) -> int:
    if spec.dim is None or spec.dim < 1:
        raise ValueError(f"body kind {spec.kind!r} needs field 'dim' >= 1, got {spec.dim!r}")
    return spec.dim


def _need_points(spec: BodySpec, count: int | None = None) -> np.ndarray:
    if not spec.points:
        raise ValueError(f"body kind {spec.kind!r} needs field 'points'")
    widths = {len(p) for p in spec.points}
    if len(widths) != 1 or 0 in widths:
        raise ValueError("body spec field 'points' has inconsistent or empty coordinates")
    pts = np.array(spec.points, dtype=float)
    if count is not None and pts.shape[0] != count:
        raise ValueError(f"body kind {spec.kind!r} needs exactly {count} point(s) in 'points'")
    if spec.dim is not None and spec.dim != pts.shape[1]:
        raise ValueError(f"body spec field 'dim'={spec.dim} does not match point length {pts.shape[1]}")
    return pts


def make_body(spec: BodySpec | dict) -> ConvexBody:
    """Expand a :class:`BodySpec` (or its JSON dict) into a vertex list."""
    if isinstance(spec, dict):
        spec = BodySpec.from_dict(spec)
    kind, label = spec.kind, spec.label
    if kind == "vertices":
        return ConvexBody(_need_points(spec), label or "vertices")
    if kind == "cube":
        return cube(_need_dim(spec), label)
    if kind == "simplex":
        return simplex(_need_dim(spec), label)
    if kind == "cross_polytope":
        return cross_polytope(_need_dim(spec), label)
    if kind == "segment":
        pts = _need_points(spec)
        if pts.shape[0] == 1:
            return segment(pts[0], label)
        if pts.shape[0] == 2:
            return ConvexBody(pts, label or "segment")
        raise ValueError("segment needs one endpoint c (for [0, c]) or two endpoints")
    if kind == "point":
        return point(_need_points(spec, 1)[0], label)
    if kind == "ball_inscribed":
        k = _need_dim(spec)
        if spec.m is None:
            raise ValueError("body kind 'ball_inscribed' needs field 'm'")
        bb = ball_bracket(k, spec.m, 0 if spec.seed is None else spec.seed)
        return ConvexBody(bb.inner.vertices, label or f"ball{k}[m={spec.m}]")
    raise ValueError(f"unknown body kind {kind!r}")


def cube(n: int, label: str = "") -> ConvexBody:
    """The unit cube [0, 1]^n."""
    if n < 1:
        raise ValueError("cube dimension must be >= 1")
    verts = np.array(list(np.ndindex(*(2,) * n)), dtype=float)[:, ::-1]
    return ConvexBody(verts, label or f"cube{n}")


def simplex(n: int, label: str = "") -> ConvexBody:
    """Standard simplex conv{0, e_1, ..., e_n}."""
    if n < 1:
        raise ValueError("simplex dimension must be >= 1")
    return ConvexBody(np.vstack([np.zeros(n), np.eye(n)]), label or f"simplex{n}")


def cross_polytope(n: int, label: str = "") -> ConvexBody:
    """conv{+-e_i}."""
    if n < 1:
        raise ValueError("cross-polytope dimension must be >= 1")
    return ConvexBody(np.vstack([np.eye(n), -np.eye(n)]), label or f"cross{n}")


def segment(c, label: str = "") -> ConvexBody:
    """The needle [0, c]."""
    c = np.asarray(c, dtype=float).reshape(-1)
    return ConvexBody(np.vstack([np.zeros_like(c), c]), label or "segment")


def point(p, label: str = "") -> ConvexBody:
    p = np.asarray(p, dtype=float).reshape(1, -1)
    return ConvexBody(p, label or "point")


def _check_same_dim(a: ConvexBody, b: ConvexBody) -> None:
    if a.ambient_dim != b.ambient_dim:
        raise ValueError(f"dimension mismatch: R^{a.ambient_dim} vs R^{b.ambient_dim}")


def minkowski_sum(a: ConvexBody, b: ConvexBody, prune: bool = False) -> ConvexBody:
    """All pairwise vertex sums ``a_i + b_j``.

    ``prune=True`` keeps only the extreme points of the result; the hull is
    the same either way.
    """
    _check_same_dim(a, b)
    verts = (a.vertices[:, None, :] + b.vertices[None, :, :]).reshape(-1, a.ambient_dim)
    label = f"({a.label}+{b.label})" if a.label and b.label else ""
    out = ConvexBody(verts, label)
    return out.pruned() if prune else out


def scale(a: ConvexBody, t: float) -> ConvexBody:
    """Dilation ``t * a`` for ``t >= 0``."""
    t = float(t)
    if not t >= 0.0:
        raise ValueError(f"scale factor must be nonnegative, got {t!r}")
    label = f"{t:g}*{a.label}" if a.label else ""
    return ConvexBody(t * a.vertices, label)


def _check_frame(frame: np.ndarray, n: int) -> np.ndarray:
    f = np.asarray(frame, dtype=float)
    if f.ndim == 1:
        f = f.reshape(1, -1)
    if f.ndim != 2 or f.shape[1] != n:
        raise ValueError(f"frame must have shape (d, {n}), got {f.shape}")
    if not 1 <= f.shape[0] <= n:
        raise ValueError(f"frame must have between 1 and {n} rows")
    gram = f @ f.T
    if np.max(np.abs(gram - np.eye(f.shape[0]))) > ORTHONORMAL_TOL:
        raise ValueError("frame rows are not orthonormal")
    return f


def project(a: ConvexBody, frame) -> ConvexBody:
    """Image of ``a`` in R^d under ``x -> frame @ x`` for a row-orthonormal ``d x n`` frame."""
    f = _check_frame(frame, a.ambient_dim)
    return ConvexBody(a.vertices @ f.T, a.label)


def _spread_sphere_points(k: int, count: int, fixed: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """``count`` evenly spread points on S^(k-1), randomly placed by ``rng``."""
    if count == 0:
        return np.zeros((0, k))
    if k == 1:
        return rng.choice([-1.0, 1.0], size=(count, 1))
    if k == 2:
        angles = rng.uniform(0.0, 2.0 * math.pi / count) + 2.0 * math.pi * np.arange(count) / count
        return np.column_stack([np.cos(angles), np.sin(angles)])
    if k == 3:
        # spherical Fibonacci lattice under a random rotation
        i = np.arange(count) + 0.5
        z = 1.0 - 2.0 * i / count
        rho = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
        phi = math.pi * (1.0 + math.sqrt(5.0)) * i
        pts = np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
        return pts @ haar_orthogonal(3, rng).T
    # k >= 4: random start, then a fixed number of repulsion steps
    pts = uniform_sphere(k, rng, size=count)
    spacing = (sphere_area(k) / (count + len(fixed))) ** (1.0 / (k - 1))
    steps = 150
    for it in range(steps):
        allpts = np.vstack([pts, fixed])
        diff = pts[:, None, :] - allpts[None, :, :]
        dist = np.linalg.norm(diff, axis=2)
        dist[np.arange(count), np.arange(count)] = np.inf
        force = (diff / dist[..., None] ** (k + 1)).sum(axis=1)
        force -= (force * pts).sum(axis=1, keepdims=True) * pts
        fnorm = np.linalg.norm(force, axis=1, keepdims=True)
        fnorm[fnorm == 0.0] = 1.0
        pts = pts + 0.25 * spacing * (1.0 - it / steps) * force / fnorm
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return pts


def ball_bracket(k: int, m: int, seed: int = 0) -> BallBracket:
    """Inscribed ``m``-point polytope of the unit ball B^k with its certified blow-up factor.

    The vertices are ``+-e_i`` plus ``m - 2k`` evenly spread points on the
    sphere (equally spaced angles for k = 2, a Fibonacci lattice for k = 3,
    repulsion-relaxed random points for k >= 4), randomly rotated by ``seed``.
    ``outer_scale`` is ``1 / inradius`` of the hull, so ``B^k`` lies inside
    ``outer_scale * inner``.
    """
    if k < 1:
        raise ValueError("ball dimension must be >= 1")
    if m < 2 * k:
        raise ValueError(f"ball approximant in R^{k} needs m >= {2 * k} points, got {m}")
    return _ball_bracket(int(k), int(m), int(seed))


@functools.lru_cache(maxsize=64)
def _ball_bracket(k: int, m: int, seed: int) -> BallBracket:
    axes = np.vstack([np.eye(k), -np.eye(k)])
    rng = RandomStream(int(seed), 0).generator()
    extra = _spread_sphere_points(k, m - 2 * k, axes, rng)
    verts = np.vstack([axes, extra])
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    h = _hull.convex_hull(verts)
    if not h.full_dimensional:  # pragma: no cover - +-e_i make this impossible
        raise _hull.KernelError("ball approximant is degenerate")
    r = _hull.inradius_at_origin(h)
    return BallBracket(ConvexBody(verts, f"ball{k}[m={m}]"), 1.0 / r, int(m), int(seed))


_SHORT_RE = re.compile(r"^(cube|simplex|cross)(\d*)$")


def parse_shortcut(token: str, dim: int | None = None) -> BodySpec:
    """Expand a named shortcut into a :class:`BodySpec`.

    Recognised: ``cube3``, ``simplex3``, ``cross3`` (or without the digit when
    ``dim`` is given), ``seg:e2`` (``[0, e_2]`` in R^dim), ``seg:1/0/2``
    (explicit endpoint), and ``ball:k=3,m=256[,seed=0]``.
    """
    tok = token.strip()
    m = _SHORT_RE.match(tok)
    if m:
        n = int(m.group(2)) if m.group(2) else dim
        if n is None:
            raise ValueError(f"shortcut {tok!r} needs a dimension (e.g. {tok}3 or --n)")
        kind = {"cube": "cube", "simplex": "simplex", "cross": "cross_polytope"}[m.group(1)]
        return BodySpec(kind=kind, dim=n, label=f"{m.group(1)}{n}")
    if tok.startswith("seg:"):
        arg = tok[4:]
        em = re.fullmatch(r"e(\d+)", arg)
        if em:
            i = int(em.group(1))
            if dim is None:
                raise ValueError(f"shortcut {tok!r} needs --n for its ambient dimension")
            if not 1 <= i <= dim:
                raise ValueError(f"shortcut {tok!r}: axis index out of range for R^{dim}")
            c = [0.0] * dim
            c[i - 1] = 1.0
            return BodySpec(kind="segment", dim=dim, points=(tuple(c),), label=tok)
        try:
            c = tuple(float(x) for x in arg.split("/"))
        except ValueError:
            raise ValueError(f"cannot parse segment endpoint in {tok!r}") from None
        return BodySpec(kind="segment", dim=len(c), points=(c,), label=tok)
    if tok.startswith("ball:"):
        params = {}
        for part in tok[5:].split(","):
            key, _, val = part.partition("=")
            if key not in ("k", "m", "seed") or not val.strip().lstrip("-").isdigit():
                raise ValueError(f"cannot parse ball shortcut {tok!r}")
            params[key] = int(val)
        if "k" not in params and dim is None:
            raise ValueError(f"ball shortcut {tok!r} needs k=")
        k = params.get("k", dim)
        return BodySpec(kind="ball_inscribed", dim=k, m=params.get("m", 256), seed=params.get("seed", 0), label=tok)
    raise ValueError(f"unknown body shortcut {tok!r}")
