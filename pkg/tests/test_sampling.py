import math

import numpy as np
import pytest
from scipy import stats

from mixvol.sampling import RandomStream, as_generator, grassmann_frame, haar_orthogonal, uniform_sphere


def test_orthogonality_and_shapes():
    qs = haar_orthogonal(4, 0, size=50)
    assert qs.shape == (50, 4, 4)
    err = np.abs(np.einsum("sij,skj->sik", qs, qs) - np.eye(4)).max()
    assert err <= 1e-12
    assert haar_orthogonal(3, RandomStream(1, 2)).shape == (3, 3)


def test_one_dimensional_is_fair_sign():
    # O(1) = {+1, -1}, each with probability 1/2
    q = haar_orthogonal(1, 3, size=20_000).reshape(-1)
    assert set(np.unique(q)) == {-1.0, 1.0}
    counts = [np.sum(q > 0), np.sum(q < 0)]
    assert stats.chisquare(counts).pvalue > 1e-3


def _angles(q):
    return np.arctan2(q[:, 1, 0], q[:, 0, 0])


def test_first_column_angle_uniform():
    q = haar_orthogonal(2, 11, size=100_000)
    ks = stats.kstest((_angles(q) + math.pi) / (2 * math.pi), "uniform")
    assert ks.pvalue > 1e-3
    det = np.linalg.det(q)
    assert abs(np.mean(det > 0) - 0.5) < 0.01


def test_sign_fix_matters():
    # the same Gaussian draws without the column sign fix are visibly not Haar
    z = RandomStream(11).generator().standard_normal((100_000, 2, 2))
    q, _ = np.linalg.qr(z)
    ks = stats.kstest((_angles(q) + math.pi) / (2 * math.pi), "uniform")
    assert ks.pvalue < 1e-6


def test_entry_moments():
    # E q_ij = 0, E q_ij^2 = 1/n, E q_ij^4 = 3/(n(n+2))
    n = 4
    q = haar_orthogonal(n, 5, size=50_000)
    assert np.abs(q.mean(axis=0)).max() < 0.02
    assert np.abs((q**2).mean(axis=0) - 1 / n).max() < 0.01
    assert np.abs((q**4).mean(axis=0) - 3 / (n * (n + 2))).max() < 0.01


def test_left_invariance():
    # Q and R Q have the same law; compare the law of a fixed entry
    n = 3
    r = haar_orthogonal(n, 99)
    a = haar_orthogonal(n, 1, size=40_000)[:, 0, 0]
    b = (r @ haar_orthogonal(n, 2, size=40_000))[:, 0, 0]
    assert stats.ks_2samp(a, b).pvalue > 1e-3


def test_sphere_first_coordinate_law():
    # on S^2 the first coordinate is uniform on [-1, 1]
    c = uniform_sphere(3, 4, size=50_000)
    assert np.allclose(np.linalg.norm(c, axis=1), 1.0)
    assert stats.kstest((c[:, 0] + 1) / 2, "uniform").pvalue > 1e-3


def test_grassmann_frame_second_moment():
    # E |P e_1|^2 = d / n
    for d, n in [(1, 3), (2, 3), (2, 5)]:
        f = grassmann_frame(d, n, 7, size=40_000)
        assert np.mean(np.sum(f[:, :, 0] ** 2, axis=1)) == pytest.approx(d / n, abs=0.01)
        assert f.shape == (40_000, d, n)
    with pytest.raises(ValueError):
        grassmann_frame(4, 3, 0)


def test_determinism():
    a = haar_orthogonal(3, RandomStream(42, 7), size=10)
    b = haar_orthogonal(3, RandomStream(42, 7), size=10)
    c = haar_orthogonal(3, RandomStream(42, 8), size=10)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert RandomStream(42).substream(7) == RandomStream(42, 7)


def test_stream_validation():
    with pytest.raises(ValueError):
        RandomStream(-1)
    with pytest.raises(ValueError):
        RandomStream(1, -1)
    with pytest.raises(TypeError):
        as_generator("seed")
    g = np.random.default_rng(0)
    assert as_generator(g) is g
    with pytest.raises(ValueError):
        haar_orthogonal(0, 0)
    with pytest.raises(ValueError):
        uniform_sphere(0, 0)
