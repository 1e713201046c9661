"""Deterministic, splittable random streams and the samplers built on them.

All bootstrap and simulation code draws randomness through a :class:`StreamSpec`,
a (master_seed, path) pair mapped to a counter-based Philox generator via
``numpy.random.SeedSequence``.  Replicate ``b`` always uses the path suffix
``b``, so results are bit-identical regardless of how replicates are scheduled
across threads.

Sampler algorithms are numpy's and fixed per numpy release: Gaussians use the
ziggurat method of ``Generator.normal``; Laplace draws apply the explicit
inverse CDF in :func:`laplace_inverse_cdf` to ``Generator.random`` uniforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Smallest positive uniform admitted to the Laplace inverse CDF; random()
# can return exactly 0, which would map to -inf.
_MIN_UNIFORM = 2.0 ** -53


@dataclass(frozen=True)
class StreamSpec:
    """Identifier for one deterministic random stream.

    Identical (master_seed, path) pairs always yield bit-identical draw
    sequences.  ``child`` extends the path, giving disjoint substreams for
    e.g. per-replicate or per-purpose randomness.
    """

    master_seed: int
    path: tuple[int, ...] = ()

    def child(self, *ids: int) -> "StreamSpec":
        return StreamSpec(self.master_seed, self.path + ids)

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed, spawn_key=self.path)
        return np.random.Generator(np.random.Philox(seq))


def normal(stream: np.random.Generator, mean: float, sd: float, count: int) -> np.ndarray:
    """``count`` i.i.d. N(mean, sd^2) draws; sd = 0 returns the constant vector."""
    if sd < 0:
        raise ValueError(f"normal: sd must be >= 0, got {sd}")
    if sd == 0:
        return np.full(count, float(mean))
    return stream.normal(mean, sd, size=count)


def laplace_inverse_cdf(u: np.ndarray, scale: float) -> np.ndarray:
    """Quantile function of the mean-0 Laplace law with the given scale.

    F^{-1}(u) = scale*log(2u) for u < 1/2 and -scale*log(2(1-u)) otherwise;
    u = 1/2 maps to 0 exactly.
    """
    u = np.asarray(u, dtype=float)
    lower = u < 0.5
    out = np.empty_like(u)
    out[lower] = scale * np.log(2.0 * u[lower])
    out[~lower] = -scale * np.log(2.0 * (1.0 - u[~lower]))
    return out


def laplace(stream: np.random.Generator, scale: float, count: int) -> np.ndarray:
    """``count`` i.i.d. mean-0 Laplace draws with variance 2*scale^2."""
    if scale <= 0:
        raise ValueError(f"laplace: scale must be > 0, got {scale}")
    u = np.fmax(stream.random(count), _MIN_UNIFORM)
    return laplace_inverse_cdf(u, scale)


def resample_indices(stream: np.random.Generator, n: int, count: int) -> np.ndarray:
    """``count`` i.i.d. uniform draws from the index set {0..n-1}."""
    if n < 1:
        raise ValueError(f"resample_indices: n must be >= 1, got {n}")
    return stream.integers(0, n, size=count)
