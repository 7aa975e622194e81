"""Monte Carlo experiments for the projection-average inequality and the needle lemma.

Each experiment returns an :class:`ExperimentReport` whose verdict is one of
``BOUND_HOLDS``, ``BOUND_VIOLATED`` or ``INCONCLUSIVE``.  Monte Carlo error is
handled with 3-sigma bands, and the ball side of every comparison is a
certified bracket, so a reported violation cannot come from approximating
the ball.

Samples are split into chunks of ``CHUNK`` draws; chunk ``c`` uses the random
substream ``(seed, c)``.  Chunks may run in worker processes but are always
concatenated in chunk order, so the numbers never depend on the worker count.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bodies import BodySpec, ConvexBody, ball_bracket, make_body
from .constants import ball_volume, projection_constant, r_constant, theorem_constant
from .hull import extreme_points, zonotope_volume
from .mixed import mixed_volume_of_points, quermass_bracket
from .sampling import RandomStream, grassmann_frame, haar_orthogonal, uniform_sphere

__all__ = [
    "SCHEMA_VERSION",
    "CHUNK",
    "BOUND_HOLDS",
    "BOUND_VIOLATED",
    "INCONCLUSIVE",
    "MonteCarloEstimate",
    "ExperimentReport",
    "resolve_workers",
    "estimate_avg_projected_mv",
    "estimate_avg_segment_mv",
    "identity_residuals",
    "verify_theorem",
    "verify_identity",
    "verify_needle_average",
    "verify_lemma_sharpness",
    "strictness_probe",
    "random_catalog",
    "catalog_bodies",
]

SCHEMA_VERSION = 1
CHUNK = 250
WORKERS_ENV = "MIXVOL_WORKERS"
# stream ids at or above this offset are reserved for auxiliary draws
AUX_STREAM = 1 << 40

BOUND_HOLDS = "BOUND_HOLDS"
BOUND_VIOLATED = "BOUND_VIOLATED"
INCONCLUSIVE = "INCONCLUSIVE"

IDENTITY_RTOL = 1e-7


@dataclass
class MonteCarloEstimate:
    mean: float
    stderr: float
    samples: int
    seed: int
    wall_time: float = 0.0
    values: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def from_values(cls, values: np.ndarray, seed: int, wall_time: float = 0.0) -> "MonteCarloEstimate":
        values = np.asarray(values, dtype=float)
        if values.size < 2:
            raise ValueError("an estimate needs at least 2 samples")
        return cls(
            mean=float(np.mean(values)),
            stderr=float(np.std(values, ddof=1) / math.sqrt(values.size)),
            samples=int(values.size),
            seed=int(seed),
            wall_time=wall_time,
            values=values,
        )

    def scaled(self, factor: float) -> "MonteCarloEstimate":
        vals = None if self.values is None else self.values * factor
        return MonteCarloEstimate(self.mean * factor, self.stderr * abs(factor), self.samples, self.seed,
                                  self.wall_time, vals)

    def to_dict(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr, "samples": self.samples, "seed": self.seed}


@dataclass
class ExperimentReport:
    claim: str
    lhs: MonteCarloEstimate | None
    rhs: dict
    constant_used: float
    verdict: str
    margin: float
    config: dict
    checks: dict = field(default_factory=dict)
    wall_time: float = 0.0
    workers: int = 1

    def to_dict(self, timing: bool = False) -> dict:
        """JSON-ready dict.  Timing data is left out unless asked for, so that
        equal configurations give byte-identical output."""
        return {
            "schema_version": SCHEMA_VERSION,
            "config": self.config,
            "claim": self.claim,
            "lhs": None if self.lhs is None else self.lhs.to_dict(),
            "rhs": self.rhs,
            "constant_used": self.constant_used,
            "verdict": self.verdict,
            "margin": self.margin,
            "checks": self.checks,
            "timing": {"wall_time": self.wall_time, "workers": self.workers} if timing else None,
        }

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True, allow_nan=False)


def resolve_workers(workers: int | None = None) -> int:
    if workers is None:
        raw = os.environ.get(WORKERS_ENV, "1")
        try:
            workers = int(raw)
        except ValueError:
            raise ValueError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    if workers < 1:
        raise ValueError("worker count must be >= 1")
    return workers


def _call(task):
    fn, payload, stream, count = task
    return fn(payload, stream, count)


def _run_chunks(fn, payload, samples: int, seed: int, workers: int | None) -> np.ndarray:
    if samples < 2:
        raise ValueError("need at least 2 samples")
    nchunks = -(-samples // CHUNK)
    tasks = [(fn, payload, RandomStream(seed, c), min(CHUNK, samples - c * CHUNK)) for c in range(nchunks)]
    workers = min(resolve_workers(workers), nchunks)
    if workers == 1:
        parts = [_call(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_call, tasks))
    return np.concatenate(parts)


def _estimate(fn, payload, samples, seed, workers) -> MonteCarloEstimate:
    t0 = time.perf_counter()
    values = _run_chunks(fn, payload, samples, seed, workers)
    return MonteCarloEstimate.from_values(values, seed, time.perf_counter() - t0)


# --- per-chunk sample kernels (module level so worker processes can import them)


def _projected_chunk(payload, stream, count):
    arrays, d = payload
    n = arrays[0].shape[1]
    frames = grassmann_frame(d, n, stream, size=count)
    if d == 1:
        # a single body in R^1: the mixed volume is its length
        proj = arrays[0] @ frames[:, 0, :].T
        return proj.max(axis=0) - proj.min(axis=0)
    out = np.empty(count)
    for i, f in enumerate(frames):
        out[i] = mixed_volume_of_points([a @ f.T for a in arrays]).value
    return out


def _needles(rows: np.ndarray) -> list[np.ndarray]:
    return [np.vstack([np.zeros_like(r), r]) for r in rows]


def _segment_chunk(payload, stream, count):
    arrays, d = payload
    n = arrays[0].shape[1]
    qs = haar_orthogonal(n, stream, size=count)
    out = np.empty(count)
    for i, q in enumerate(qs):
        out[i] = mixed_volume_of_points(arrays + _needles(q[d:])).value
    return out


def _identity_chunk(payload, stream, count):
    arrays, d = payload
    n = arrays[0].shape[1]
    qs = haar_orthogonal(n, stream, size=count)
    out = np.empty(count)
    dfac, nfac = math.factorial(d), math.factorial(n)
    for i, q in enumerate(qs):
        left = dfac * mixed_volume_of_points([a @ q[:d].T for a in arrays]).value
        right = nfac * mixed_volume_of_points(arrays + _needles(q[d:])).value
        out[i] = abs(left - right) / max(1.0, abs(right))
    return out


def _support_chunk(payload, stream, count):
    (k,) = payload
    c = uniform_sphere(k, stream, size=count)
    return np.maximum(c[:, 0], 0.0)


def _sharpness_chunk(payload, stream, count):
    inner, k = payload
    cs = uniform_sphere(k, stream, size=count)
    out = np.empty(count)
    for i, c in enumerate(cs):
        out[i] = mixed_volume_of_points([inner] * (k - 1) + _needles(c[None, :])).value
    return out


# --- helpers


def _bodies_payload(bodies) -> tuple[list[np.ndarray], int, int]:
    bodies = list(bodies)
    if not bodies:
        raise ValueError("need at least one body")
    n = bodies[0].ambient_dim
    for b in bodies:
        if b.ambient_dim != n:
            raise ValueError(f"dimension mismatch: R^{b.ambient_dim} vs R^{n}")
    d = len(bodies)
    if not 1 <= d < n:
        raise ValueError(f"need 1 <= d < n, got d={d}, n={n}")
    # projections of the extreme points span the projected hull
    arrays = [np.ascontiguousarray(b.vertices[extreme_points(b.vertices)]) for b in bodies]
    return arrays, d, n


def _body_echo(b: ConvexBody) -> dict:
    return BodySpec(kind="vertices", points=tuple(map(tuple, b.vertices.tolist())), label=b.label).to_dict()


def _default_config(claim: str, bodies=None, **kw) -> dict:
    cfg = {"claim": claim}
    if bodies is not None:
        cfg["bodies"] = [_body_echo(b) for b in bodies]
    cfg.update(kw)
    return cfg


def _default_samples(n: int) -> int:
    return 10_000 if n <= 3 else 1_000


# --- estimators


def estimate_avg_projected_mv(bodies, samples: int = 10_000, seed: int = 0,
                              workers: int | None = None) -> MonteCarloEstimate:
    """Mean of ``V(P A_1, ..., P A_d)`` over uniformly random projections P onto G(d, n)."""
    arrays, d, n = _bodies_payload(bodies)
    return _estimate(_projected_chunk, (arrays, d), samples, seed, workers)


def estimate_avg_segment_mv(bodies, samples: int = 10_000, seed: int = 0,
                            workers: int | None = None) -> MonteCarloEstimate:
    """Mean of ``V(A_1, ..., A_d, [0, q_{d+1}], ..., [0, q_n])`` over Haar Q in O(n).

    Times ``n!/d!`` this estimates the same quantity as
    :func:`estimate_avg_projected_mv`.
    """
    arrays, d, n = _bodies_payload(bodies)
    return _estimate(_segment_chunk, (arrays, d), samples, seed, workers)


def identity_residuals(bodies, samples: int = 100, seed: int = 0, workers: int | None = None) -> np.ndarray:
    """Relative residual of ``d! V(P A) = n! V(A, needles)`` for each Haar draw."""
    arrays, d, n = _bodies_payload(bodies)
    return _run_chunks(_identity_chunk, (arrays, d), samples, seed, workers)


# --- experiments


def _verdict(lhs: MonteCarloEstimate, lower: float, upper: float) -> str:
    low_edge = lhs.mean - 3.0 * lhs.stderr
    if low_edge > upper:
        return BOUND_VIOLATED
    if low_edge <= lower:
        return BOUND_HOLDS
    return INCONCLUSIVE


def _theorem_sides(bodies, samples, m_ball, seed, workers):
    bodies = list(bodies)
    arrays, d, n = _bodies_payload(bodies)
    samples = _default_samples(n) if samples is None else samples
    t0 = time.perf_counter()
    lhs = _estimate(_projected_chunk, (arrays, d), samples, seed, workers)
    bracket = quermass_bracket(bodies, m_ball, seed)
    const = projection_constant(d, n)
    sub_const = theorem_constant(d, n)
    # Grassmannian constant and O(n) constant differ exactly by n!/d!
    factor = math.factorial(n) / math.factorial(d)
    consistent = abs(sub_const * factor - const) <= 1e-12 * const
    rhs = {
        "lower": const * bracket.lower,
        "upper": const * bracket.upper,
        "quermass": bracket.to_dict(),
        "constant_grassmannian": const,
        "constant_orthogonal": sub_const,
        "orthogonal_form": {
            "lhs_mean": lhs.mean / factor,
            "lhs_stderr": lhs.stderr / factor,
            "upper": sub_const * bracket.upper,
        },
    }
    return lhs, rhs, const, consistent, d, n, samples, time.perf_counter() - t0


def verify_theorem(bodies, samples: int | None = None, m_ball: int = 256, seed: int = 0,
                   workers: int | None = None, config: dict | None = None) -> ExperimentReport:
    """Mean projected mixed volume against ``kappa_d/kappa_n`` times the quermassintegral bracket.

    Violated only if ``mean - 3 stderr`` exceeds the upper bracket; holds if it
    is at most the lower bracket; inconclusive in between.
    """
    bodies = list(bodies)
    lhs, rhs, const, consistent, d, n, samples, wall = _theorem_sides(bodies, samples, m_ball, seed, workers)
    verdict = _verdict(lhs, rhs["lower"], rhs["upper"])
    margin = (rhs["upper"] + 3.0 * lhs.stderr - lhs.mean) / rhs["upper"]
    checks = {"constants_consistent": consistent}
    cfg = config or _default_config("theorem", bodies, d=d, n=n, samples=samples, m_ball=m_ball, seed=seed)
    return ExperimentReport("theorem", lhs, rhs, const, verdict, margin, cfg, checks, wall, resolve_workers(workers))


def strictness_probe(bodies, samples: int | None = None, m_ball: int = 256, seed: int = 0,
                     workers: int | None = None, config: dict | None = None) -> ExperimentReport:
    """Normalized gap ``(rhs_lower - lhs_mean) / rhs_upper`` with its 3-sigma half width.

    Report only: the verdict is ``BOUND_HOLDS`` or ``INCONCLUSIVE``, never a
    violation and never a claim of strictness.
    """
    bodies = list(bodies)
    lhs, rhs, const, consistent, d, n, samples, wall = _theorem_sides(bodies, samples, m_ball, seed, workers)
    gap = (rhs["lower"] - lhs.mean) / rhs["upper"]
    half_width = 3.0 * lhs.stderr / rhs["upper"]
    verdict = BOUND_HOLDS if lhs.mean - 3.0 * lhs.stderr <= rhs["lower"] else INCONCLUSIVE
    margin = (rhs["upper"] + 3.0 * lhs.stderr - lhs.mean) / rhs["upper"]
    checks = {
        "constants_consistent": consistent,
        "gap": gap,
        "gap_half_width": half_width,
        "bracket_rel_width": (rhs["upper"] - rhs["lower"]) / rhs["upper"],
    }
    cfg = config or _default_config("probe", bodies, d=d, n=n, samples=samples, m_ball=m_ball, seed=seed)
    return ExperimentReport("probe", lhs, rhs, const, verdict, margin, cfg, checks, wall, resolve_workers(workers))


def verify_identity(bodies, samples: int = 100, seed: int = 0, workers: int | None = None,
                    config: dict | None = None) -> ExperimentReport:
    """Per-sample check of ``d! V(P A) = n! V(A, [0, q_{d+1}], ..., [0, q_n])``."""
    bodies = list(bodies)
    arrays, d, n = _bodies_payload(bodies)
    t0 = time.perf_counter()
    res = _run_chunks(_identity_chunk, (arrays, d), samples, seed, workers)
    wall = time.perf_counter() - t0
    worst = float(res.max())
    verdict = BOUND_HOLDS if worst <= IDENTITY_RTOL else BOUND_VIOLATED
    est = MonteCarloEstimate.from_values(res, seed, wall)
    rhs = {"tolerance": IDENTITY_RTOL, "max_residual": worst}
    checks = {"max_residual": worst, "within_tolerance": worst <= IDENTITY_RTOL}
    cfg = config or _default_config("identity", bodies, d=d, n=n, samples=samples, seed=seed)
    return ExperimentReport("identity", est, rhs, 1.0, verdict, (IDENTITY_RTOL - worst) / IDENTITY_RTOL,
                            cfg, checks, wall, resolve_workers(workers))


def verify_needle_average(k: int, samples: int = 100_000, seed: int = 0, needles: int = 2000,
                          workers: int | None = None, config: dict | None = None) -> ExperimentReport:
    """Mean of ``max(0, <c, e_1>)`` over uniform ``c`` against ``r_k``, plus the needle zonotope.

    The support function of ``[0, c]`` in a fixed direction is linear and
    monotone with value 1 on the ball, so its average may not exceed ``r_k``.
    The second check builds the Minkowski average of ``needles`` random
    needles (only for k <= 3) and compares its volume with the ball of radius
    ``r_k``.
    """
    if not 2 <= k <= 6:
        raise ValueError(f"needle experiment supports 2 <= k <= 6, got {k}")
    t0 = time.perf_counter()
    lhs = _estimate(_support_chunk, (k,), samples, seed, workers)
    rk = r_constant(k)
    checks: dict = {"r_k": rk, "within_4_sigma": abs(lhs.mean - rk) <= 4.0 * lhs.stderr}
    if k <= 3 and needles:
        c = uniform_sphere(k, RandomStream(seed, AUX_STREAM), size=needles)
        vol = zonotope_volume(c / needles)
        target = ball_volume(k) * rk**k
        checks.update(
            zonotope_volume=vol,
            zonotope_target=target,
            zonotope_rel_error=abs(vol - target) / target,
            zonotope_ok=abs(vol - target) <= 0.05 * target,
        )
    wall = time.perf_counter() - t0
    if lhs.mean - 3.0 * lhs.stderr > rk:
        verdict = BOUND_VIOLATED
    elif checks["within_4_sigma"] and checks.get("zonotope_ok", True):
        verdict = BOUND_HOLDS
    else:
        verdict = INCONCLUSIVE
    margin = (rk + 3.0 * lhs.stderr - lhs.mean) / rk
    rhs = {"lower": rk, "upper": rk, "value": rk}
    cfg = config or _default_config("lemma", k=k, samples=samples, seed=seed, needles=needles)
    return ExperimentReport("lemma", lhs, rhs, rk, verdict, margin, cfg, checks, wall, resolve_workers(workers))


def verify_lemma_sharpness(k: int, m_ball: int = 256, samples: int = 500, seed: int = 0,
                           workers: int | None = None, config: dict | None = None) -> ExperimentReport:
    """Mean over needles ``[0, c]`` of ``V(B^k, ..., B^k, [0, c])`` through the ball bracket.

    The bracket ``[mean - 3 se, s^(k-1) (mean + 3 se)]`` (``s`` the certified
    outer scale) must contain ``kappa_{k-1}/k`` and overlap ``r_k`` times the
    bracket ``[Vol(inner), s^k Vol(inner)]`` of ``V(B^k, ..., B^k)``.
    """
    if not 2 <= k <= 4:
        raise ValueError(f"sharpness experiment supports 2 <= k <= 4, got {k}")
    t0 = time.perf_counter()
    bb = ball_bracket(k, m_ball, seed)
    inner = np.ascontiguousarray(bb.inner.vertices)
    lhs = _estimate(_sharpness_chunk, (inner, k), samples, seed, workers)
    s = bb.outer_scale
    lower = lhs.mean - 3.0 * lhs.stderr
    upper = s ** (k - 1) * (lhs.mean + 3.0 * lhs.stderr)
    target = ball_volume(k - 1) / k
    rk = r_constant(k)
    vol_inner = bb.inner.volume()
    pred_lower, pred_upper = rk * vol_inner, rk * s**k * vol_inner
    identity_gap = abs(rk * ball_volume(k) - target) / target
    checks = {
        "target": target,
        "contains_target": lower <= target <= upper,
        "predicted_lower": pred_lower,
        "predicted_upper": pred_upper,
        "overlaps_prediction": lower <= pred_upper and pred_lower <= upper,
        "rel_width": (upper - lower) / target,
        "outer_scale": s,
        "constants_identity_gap": identity_gap,
    }
    wall = time.perf_counter() - t0
    if lower > pred_upper:
        verdict = BOUND_VIOLATED
    elif checks["contains_target"] and checks["overlaps_prediction"]:
        verdict = BOUND_HOLDS
    else:
        verdict = INCONCLUSIVE
    margin = (pred_upper + 3.0 * lhs.stderr - lhs.mean) / pred_upper
    rhs = {"lower": lower, "upper": upper}
    cfg = config or _default_config("lemma-sharpness", k=k, m_ball=m_ball, samples=samples, seed=seed)
    return ExperimentReport("lemma-sharpness", lhs, rhs, rk, verdict, margin, cfg, checks, wall,
                            resolve_workers(workers))


_CATALOG_SHAPES = ((1, 2), (1, 3), (2, 3), (1, 4), (2, 4), (3, 4))


def random_catalog(count: int = 20, seed: int = 0) -> list[list[BodySpec]]:
    """Seeded tuples of random V-polytopes, cycling through (d, n) with n <= 4.

    Each body is the hull of 4 to 7 Gaussian points; every fifth tuple
    repeats its first body so that equal-argument cases are covered too.
    """
    rng = RandomStream(seed, AUX_STREAM + 1).generator()
    out = []
    for t in range(count):
        d, n = _CATALOG_SHAPES[t % len(_CATALOG_SHAPES)]
        specs = []
        for j in range(d):
            if t % 5 == 4 and j > 0:
                specs.append(specs[0])
                continue
            npts = int(rng.integers(4, 8))
            pts = rng.standard_normal((npts, n))
            specs.append(BodySpec(kind="vertices", dim=n, points=tuple(map(tuple, pts.tolist())),
                                  label=f"rand{t}.{j}"))
        out.append(specs)
    return out


def catalog_bodies(specs: list[BodySpec]) -> list[ConvexBody]:
    return [make_body(s) for s in specs]
