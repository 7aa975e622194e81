"""Seeded sampling of Haar orthogonal matrices, sphere points and Grassmannian frames.

Every random draw goes through a :class:`RandomStream`, a ``(seed, stream_id)``
pair that maps to a Philox counter-based generator.  Monte Carlo loops give
each fixed-size chunk of samples its own ``stream_id``, so results do not
depend on how chunks are spread over worker processes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "RandomStream",
    "as_generator",
    "haar_orthogonal",
    "uniform_sphere",
    "grassmann_frame",
]


@dataclass(frozen=True)
class RandomStream:
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must fit in an unsigned 64-bit integer, got {self.seed!r}")
        if int(self.stream_id) < 0:
            raise ValueError("stream_id must be nonnegative")

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(self.seed), int(self.stream_id)])))

    def substream(self, stream_id: int) -> "RandomStream":
        return RandomStream(self.seed, stream_id)


def as_generator(stream) -> np.random.Generator:
    """Accept a :class:`RandomStream`, a ``Generator`` or an integer seed."""
    if isinstance(stream, np.random.Generator):
        return stream
    if isinstance(stream, RandomStream):
        return stream.generator()
    if isinstance(stream, (int, np.integer)):
        return RandomStream(int(stream)).generator()
    raise TypeError(f"cannot build a random generator from {type(stream).__name__}")


def haar_orthogonal(n: int, stream, size: int | None = None) -> np.ndarray:
    """Haar-distributed orthogonal matrix (or a stack of ``size`` of them).

    Gaussian matrix, QR factorisation, then each column of Q multiplied by the
    sign of the matching diagonal entry of R.  Without the sign fix the result
    is not Haar distributed.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = as_generator(stream)
    shape = (n, n) if size is None else (size, n, n)
    z = rng.standard_normal(shape)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    signs = np.where(diag < 0.0, -1.0, 1.0)
    return q * signs[..., None, :]


def uniform_sphere(k: int, stream, size: int | None = None) -> np.ndarray:
    """Uniform point(s) on the unit sphere S^(k-1) in R^k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = as_generator(stream)
    shape = (k,) if size is None else (size, k)
    while True:
        x = rng.standard_normal(shape)
        norms = np.linalg.norm(x, axis=-1, keepdims=True)
        if np.all(norms > 0.0):
            return x / norms


def grassmann_frame(d: int, n: int, stream, size: int | None = None) -> np.ndarray:
    """Row-orthonormal ``d x n`` frame whose row space is uniform on G(d, n)."""
    if not 1 <= d <= n:
        raise ValueError(f"need 1 <= d <= n, got d={d}, n={n}")
    q = haar_orthogonal(n, stream, size=size)
    return q[..., :d, :]
