"""Mixed volumes of V-polytopes and brackets for quermassintegrals.

``mixed_volume`` evaluates the polarization formula

    V(A_1, ..., A_n) = 1/n! * sum over nonempty S of (-1)^(n-|S|) Vol(sum_{i in S} A_i)

with equal arguments grouped: if a body K appears ``a`` times, the subsets
only matter through how many copies of K they pick, and the sum of ``c``
copies is the dilate ``c K``.  This keeps repeated ball slots cheap.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, asdict

import numpy as np

from . import hull as _hull
from .bodies import ConvexBody, ball_bracket, project, segment
from .constants import ball_volume

__all__ = [
    "MAX_DIM",
    "MixedVolumeResult",
    "QuermassBracket",
    "mixed_volume",
    "mixed_volume_of_points",
    "quermass_bracket",
    "cube_quermass_reference",
    "projection_identity_sides",
    "projection_identity_residual",
]

MAX_DIM = 8
NEGATIVE_TOL = 1e-8


@dataclass(frozen=True)
class MixedVolumeResult:
    value: float
    n: int
    terms_evaluated: int
    max_term_volume: float
    distinct_volumes: int

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class QuermassBracket:
    """Certified interval for ``V(A_1, ..., A_d, B^n, ..., B^n)``."""

    lower: float
    upper: float
    d: int
    n: int
    m: int
    seed: int
    outer_scale: float

    def contains(self, value: float, rtol: float = 0.0) -> bool:
        slack = rtol * max(abs(value), 1.0)
        return self.lower - slack <= value <= self.upper + slack

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def to_dict(self) -> dict:
        return asdict(self)


def _group(arrays: list[np.ndarray]) -> tuple[list[np.ndarray], list[int]]:
    keys: dict[tuple, int] = {}
    groups: list[np.ndarray] = []
    counts: list[int] = []
    for v in arrays:
        key = (v.shape, v.tobytes())
        if key in keys:
            counts[keys[key]] += 1
        else:
            keys[key] = len(groups)
            groups.append(v)
            counts.append(1)
    return groups, counts


def _sum_vertices(parts: list[np.ndarray]) -> np.ndarray:
    acc = parts[0]
    for i, nxt in enumerate(parts[1:], start=2):
        acc = (acc[:, None, :] + nxt[None, :, :]).reshape(-1, acc.shape[1])
        # interior points only slow down the next sum; the last one goes straight to the volume
        if i < len(parts) and acc.shape[0] > 4 * acc.shape[1] + 4:
            acc = acc[_hull.extreme_points(acc)]
    return acc


def _pruned(v: np.ndarray) -> np.ndarray:
    return v[_hull.extreme_points(v)]


def mixed_volume_of_points(vertex_arrays, check: bool = True) -> MixedVolumeResult:
    """Mixed volume of the hulls of ``n`` point arrays in R^n, no body wrappers.

    Terms are reduced in a fixed order (number of copies picked, then
    lexicographic), so the result does not depend on evaluation order.
    """
    arrays = [np.asarray(v, dtype=float) for v in vertex_arrays]
    n = len(arrays)
    groups, counts = _group(arrays)
    groups = [_pruned(g) for g in groups]
    ranges = [range(c + 1) for c in counts]
    picks = [p for p in itertools.product(*ranges) if sum(p) > 0]
    picks.sort(key=lambda p: (sum(p), p))
    total = 0.0
    max_term = 0.0
    single: dict[int, float] = {}
    for p in picks:
        used = [i for i, c in enumerate(p) if c > 0]
        if len(used) == 1:
            # Vol(c K) = c^n Vol(K)
            i = used[0]
            if i not in single:
                single[i] = _hull.volume(groups[i])
            vol = p[i] ** n * single[i]
        else:
            vol = _hull.volume(_sum_vertices([p[i] * groups[i] for i in used]))
        weight = math.prod(math.comb(a, c) for a, c in zip(counts, p))
        sign = -1.0 if (n - sum(p)) % 2 else 1.0
        total += sign * weight * vol
        max_term = max(max_term, vol)
    value = total / math.factorial(n)
    if check and value < -NEGATIVE_TOL * max(1.0, max_term):
        raise _hull.KernelError(f"negative mixed volume {value!r} (largest term {max_term!r})")
    distinct = len(picks) - sum(1 for p in picks if sum(c > 0 for c in p) == 1) + len(single)
    return MixedVolumeResult(max(value, 0.0), n, 2**n - 1, max_term, distinct)


def mixed_volume(bodies) -> MixedVolumeResult:
    """Mixed volume ``V(A_1, ..., A_n)`` of ``n`` bodies in R^n.

    Symmetric and multilinear in its arguments, and ``V(A, ..., A) = Vol(A)``.
    ``n`` is capped at 8.
    """
    bodies = list(bodies)
    if not bodies:
        raise ValueError("mixed_volume needs at least one body")
    n = bodies[0].ambient_dim
    for b in bodies:
        if not isinstance(b, ConvexBody):
            raise TypeError(f"expected ConvexBody, got {type(b).__name__}")
        if b.ambient_dim != n:
            raise ValueError(f"dimension mismatch: R^{b.ambient_dim} vs R^{n}")
    if len(bodies) != n:
        raise ValueError(f"mixed volume in R^{n} needs exactly {n} bodies, got {len(bodies)}")
    if n > MAX_DIM:
        raise ValueError(f"dimension {n} exceeds the cap of {MAX_DIM}")
    return mixed_volume_of_points([b.vertices for b in bodies])


def quermass_bracket(bodies, m: int = 256, seed: int = 0) -> QuermassBracket:
    """Bracket for ``V(A_1, ..., A_d, B^n, ..., B^n)`` with ``n - d`` ball slots.

    The lower end fills the ball slots with the inscribed polytope of
    :func:`ball_bracket`, the upper end multiplies it by ``outer_scale^(n-d)``.
    Monotonicity in each slot puts the true value in between.
    """
    bodies = list(bodies)
    if not bodies:
        raise ValueError("quermass_bracket needs at least one body")
    n = bodies[0].ambient_dim
    d = len(bodies)
    if not 1 <= d < n:
        raise ValueError(f"need 1 <= d < n, got d={d}, n={n}")
    bb = ball_bracket(n, m, seed)
    lower = mixed_volume(bodies + [bb.inner] * (n - d)).value
    upper = bb.outer_scale ** (n - d) * lower
    if upper < lower - 1e-9 * max(1.0, abs(lower)):  # pragma: no cover - outer_scale >= 1
        raise _hull.KernelError("inverted quermassintegral bracket")
    return QuermassBracket(lower, upper, d, n, int(m), int(seed), bb.outer_scale)


def cube_quermass_reference(n: int, j: int) -> float:
    """``V(C, ..., C, B^n, ..., B^n)`` with ``j`` copies of the unit cube C.

    From ``Vol(C + sB) = sum_j C(n, j) kappa_{n-j} s^(n-j)`` the answer is
    ``kappa_{n-j}`` (with ``kappa_0 = 1``).
    """
    if n < 1 or not 0 <= j <= n:
        raise ValueError(f"need 0 <= j <= n, got n={n}, j={j}")
    return 1.0 if j == n else ball_volume(n - j)


def projection_identity_sides(bodies, q) -> tuple[float, float]:
    """Both sides of ``d! V(P A_1, ..., P A_d) = n! V(A_1, ..., A_d, [0, q_{d+1}], ..., [0, q_n])``.

    ``P`` is given by the first ``d`` rows of the orthogonal matrix ``q``.
    """
    bodies = list(bodies)
    q = np.asarray(q, dtype=float)
    n = bodies[0].ambient_dim
    d = len(bodies)
    if not 1 <= d < n:
        raise ValueError(f"need 1 <= d < n, got d={d}, n={n}")
    if q.shape != (n, n) or np.max(np.abs(q @ q.T - np.eye(n))) > 1e-10:
        raise ValueError("q must be an orthogonal n x n matrix")
    frame = q[:d]
    left = math.factorial(d) * mixed_volume([project(b, frame) for b in bodies]).value
    needles = [segment(q[i]) for i in range(d, n)]
    right = math.factorial(n) * mixed_volume(bodies + needles).value
    return left, right


def projection_identity_residual(bodies, q) -> float:
    """``|d! V(P A) - n! V(A, needles)|`` for one orthogonal matrix ``q``."""
    left, right = projection_identity_sides(bodies, q)
    return abs(left - right)
