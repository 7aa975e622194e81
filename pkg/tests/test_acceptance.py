"""Acceptance criteria, each at its stated tolerance, one PASS/FAIL line per check."""

import math
import time

import numpy as np
import pytest

from mixvol.bodies import BodySpec, ConvexBody, cross_polytope, cube, make_body, minkowski_sum, scale, segment, simplex
from mixvol.cli import RunConfig, run_config
from mixvol.constants import ball_volume, constants_table, r_constant, sphere_area
from mixvol.mixed import mixed_volume
from mixvol.verify import (
    BOUND_VIOLATED,
    catalog_bodies,
    random_catalog,
    verify_identity,
    verify_lemma_sharpness,
    verify_needle_average,
    verify_theorem,
)

SEED = 7


# 1. constants


def test_criterion_1_constants(verdict_line):
    t0 = time.perf_counter()
    r_gap = max(abs(r_constant(k) - ball_volume(k - 1) / sphere_area(k)) / r_constant(k) for k in range(2, 11))
    rows = constants_table(10)
    remark_gap = max(r.relative_gap for r in rows if r.name == "theorem_constant")
    product_gap = max(r.relative_gap for r in rows if r.name == "r_product")
    pairs = {r.args for r in rows if r.name == "r_product"}
    elapsed = time.perf_counter() - t0
    ok = (max(r_gap, remark_gap, product_gap) <= 1e-10 and len(pairs) == 45
          and pairs == {(d, n) for n in range(2, 11) for d in range(1, n)} and elapsed < 1.0)
    verdict_line("1 constants", ok, f"r gap {r_gap:.1e}, remark gap {remark_gap:.1e}, "
                                    f"product gap {product_gap:.1e}, {elapsed:.3f}s")
    assert ok


# 2. mixed-volume kernel


def _rand_body(rng, n):
    return ConvexBody(rng.standard_normal((int(rng.integers(n + 1, n + 4)), n)))


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-12)


def test_criterion_2_kernel(verdict_line):
    t0 = time.perf_counter()
    norm_err = 0.0
    for n in range(1, 6):
        for body in (cube(n), simplex(n), cross_polytope(n)):
            norm_err = max(norm_err, _rel(mixed_volume([body] * n).value, body.volume()))
    worst = {"symmetry": 0.0, "homogeneity": 0.0, "multilinearity": 0.0}
    for case in range(200):
        rng = np.random.default_rng(case)
        n = 2 + case % 3
        bodies = [_rand_body(rng, n) for _ in range(n)]
        v = mixed_volume(bodies).value
        perm = rng.permutation(n)
        worst["symmetry"] = max(worst["symmetry"], _rel(mixed_volume([bodies[i] for i in perm]).value, v))
        j = int(rng.integers(n))
        t = float(rng.uniform(0.2, 3.0))
        scaled = list(bodies)
        scaled[j] = scale(bodies[j], t)
        worst["homogeneity"] = max(worst["homogeneity"], _rel(mixed_volume(scaled).value, t * v))
        extra = _rand_body(rng, n)
        summed, swapped = list(bodies), list(bodies)
        summed[j] = minkowski_sum(bodies[j], extra, prune=True)
        swapped[j] = extra
        lin = _rel(mixed_volume(summed).value, v + mixed_volume(swapped).value)
        worst["multilinearity"] = max(worst["multilinearity"], lin)
    elapsed = time.perf_counter() - t0
    ok = norm_err <= 1e-9 and max(worst.values()) <= 1e-8 and elapsed < 60
    detail = f"normalization {norm_err:.1e}, " + ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    verdict_line("2 mixed-volume kernel", ok, f"{detail}, 200 cases, {elapsed:.1f}s")
    assert ok


# 3. projection identity


def test_criterion_3_projection_identity(verdict_line):
    t0 = time.perf_counter()
    worst = 0.0
    rng = np.random.default_rng(SEED)
    for d, n in [(1, 2), (1, 3), (2, 3), (2, 4)]:
        needles = [segment(rng.standard_normal(n)) for _ in range(d)]
        axis = [segment(np.eye(n)[i]) for i in range(d)]
        for bodies in ([cube(n)] * d, needles, axis):
            rep = verify_identity(bodies, samples=100, seed=SEED)
            worst = max(worst, rep.checks["max_residual"])
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-7 and elapsed < 120
    verdict_line("3 projection identity", ok, f"max residual {worst:.1e} over 100 draws x 12 cases, {elapsed:.1f}s")
    assert ok


# 4. needle-average lemma


def test_criterion_4_needle_average(verdict_line):
    t0 = time.perf_counter()
    parts = []
    ok = True
    for k in range(2, 7):
        rep = verify_needle_average(k, samples=100_000, seed=SEED, needles=2000 if k == 2 else 0)
        z = (rep.lhs.mean - rep.constant_used) / rep.lhs.stderr
        ok &= bool(rep.checks["within_4_sigma"])
        parts.append(f"k={k} z={z:+.2f}")
        if k == 2:
            ok &= bool(rep.checks["zonotope_ok"])
            parts.append(f"zonotope err {rep.checks['zonotope_rel_error']:.2%}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 180
    verdict_line("4 needle averages", ok, ", ".join(parts) + f", {elapsed:.1f}s")
    assert ok


@pytest.mark.parametrize("k", [2, 3, 4])
def test_criterion_4_sharpness(k, verdict_line):
    t0 = time.perf_counter()
    rep = verify_lemma_sharpness(k, m_ball=256, samples=500, seed=SEED)
    c = rep.checks
    elapsed = time.perf_counter() - t0
    ok = bool(c["contains_target"]) and c["rel_width"] <= 0.05 and elapsed < 180
    verdict_line(f"4 sharpness k={k}", ok,
                 f"bracket [{rep.rhs['lower']:.5f}, {rep.rhs['upper']:.5f}] vs {c['target']:.5f}, "
                 f"width {c['rel_width']:.2%} (outer scale {c['outer_scale']:.4f}), {elapsed:.1f}s")
    assert ok


def test_criterion_4_constants_identity(verdict_line):
    gap = max(abs(r_constant(k) * ball_volume(k) - ball_volume(k - 1) / k) / (ball_volume(k - 1) / k)
              for k in range(2, 11))
    ok = gap <= 1e-10
    verdict_line("4 r_k kappa_k = kappa_(k-1)/k", ok, f"max gap {gap:.1e} for k=2..10")
    assert ok


# 5. equality cases

EQUALITY_CASES = {
    "unit square d=1 n=2": ([cube(2)], 4 / math.pi),
    "two unit cubes d=2 n=3": ([cube(3), cube(3)], 1.5),
    "segments [0,e1],[0,e2] d=2 n=3": ([segment([1, 0, 0]), segment([0, 1, 0])], 0.25),
}


@pytest.mark.parametrize("name", list(EQUALITY_CASES))
def test_criterion_5_equality(name, verdict_line):
    bodies, value = EQUALITY_CASES[name]
    t0 = time.perf_counter()
    rep = verify_theorem(bodies, samples=10_000, m_ball=256, seed=SEED)
    elapsed = time.perf_counter() - t0
    lhs = rep.lhs
    lo, hi = rep.rhs["lower"], rep.rhs["upper"]
    # the lower end is exact for these bodies; allow roundoff only
    in_bracket = lo <= value * (1 + 1e-12) and value <= hi
    near = abs(lhs.mean - value) <= 3 * lhs.stderr
    ok = near and in_bracket and elapsed < 180
    verdict_line(f"5 equality {name}", ok,
                 f"lhs {lhs.mean:.5f} +- {lhs.stderr:.5f} vs {value:.5f}, rhs [{lo:.6f}, {hi:.6f}], {elapsed:.1f}s")
    assert ok


# 6. inequality over a random catalog


def test_criterion_6_catalog(verdict_line):
    t0 = time.perf_counter()
    verdicts = []
    for specs in random_catalog(20, seed=0):
        rep = verify_theorem(catalog_bodies(specs), samples=10_000, m_ball=256, seed=SEED)
        verdicts.append(rep.verdict)
    elapsed = time.perf_counter() - t0
    counts = {v: verdicts.count(v) for v in sorted(set(verdicts))}
    ok = BOUND_VIOLATED not in verdicts and len(verdicts) == 20 and elapsed < 600
    verdict_line("6 catalog of 20", ok, f"verdicts {counts}, {elapsed:.1f}s")
    assert ok


# 7. sharpness trend


def test_criterion_7_trend(verdict_line):
    t0 = time.perf_counter()
    ratios = []
    for m in (32, 128, 512):
        p = make_body(BodySpec("ball_inscribed", dim=3, m=m, seed=SEED))
        rep = verify_theorem([p, p], samples=10_000, m_ball=m, seed=SEED)
        ratios.append(rep.lhs.mean / rep.rhs["upper"])
    elapsed = time.perf_counter() - t0
    ok = ratios[0] < ratios[1] < ratios[2] and ratios[2] >= 0.9 and elapsed < 300
    verdict_line("7 sharpness trend", ok, "ratios " + ", ".join(f"{r:.4f}" for r in ratios) + f", {elapsed:.1f}s")
    assert ok


# 8. reproducibility


def test_criterion_8_reproducibility(verdict_line):
    configs = [
        RunConfig(command="verify", claim="theorem", bodies=[{"kind": "cube", "dim": 3}] * 2, samples=1100,
                  seed=SEED, format="json"),
        RunConfig(command="verify", claim="lemma", k=3, samples=2000, needles=200, seed=SEED, format="json"),
        RunConfig(command="verify", claim="identity", bodies=[{"kind": "cube", "dim": 3}], samples=600, seed=SEED,
                  format="json"),
    ]
    ok = True
    for cfg in configs:
        outs = {run_config(RunConfig(**cfg.to_dict()), workers=w)[1] for w in (1, 3, 1)}
        ok &= len(outs) == 1
    verdict_line("8 reproducibility", ok, f"{len(configs)} configs, workers 1 and 3, byte-identical JSON")
    assert ok
