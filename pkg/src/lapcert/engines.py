"""Deterministic expectation engines for integrals against Gaussian measures.

Two engines with one interface:

    engine.expectation(f, measure) -> scalar (real or complex) or vector

where f maps a batch of points, shape (N, n), to values of shape (N,) or
(N, d). Integrands are evaluated through the measure's symmetric square
root, u = mean + cov^{1/2} z with z standard normal.

GaussHermiteEngine uses a tensor-product rule and is preferred up to
three dimensions. MonteCarloEngine is seeded and chunked: every chunk
draws from its own counter-derived PCG64 substream and partial sums are
reduced in chunk order, so the result is bit-stable under any worker
count. The worker count defaults to the LAPLACE_CERT_THREADS environment
variable.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .gaussian import GaussianMeasure

__all__ = ["GaussHermiteEngine", "MonteCarloEngine", "default_engine"]

_MAX_TENSOR_POINTS = 20_000_000


def _env_threads() -> int:
    raw = os.environ.get("LAPLACE_CERT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


class GaussHermiteEngine:
    """Tensor-product Gauss-Hermite quadrature (probabilists' weight)."""

    def __init__(self, order: int = 96):
        if order < 2:
            raise ValueError("Gauss-Hermite order must be at least 2")
        if order > 350:
            # numpy's hermegauss weight normalization overflows near order 400
            raise ValueError("Gauss-Hermite order above 350 is numerically unstable")
        self.order = int(order)
        nodes, weights = np.polynomial.hermite_e.hermegauss(self.order)
        self._nodes = nodes
        self._weights = weights / np.sqrt(2.0 * np.pi)

    def _grid(self, dim: int):
        if self.order ** dim > _MAX_TENSOR_POINTS:
            raise ValueError(
                f"tensor grid of order {self.order} in dimension {dim} is too large; "
                "use MonteCarloEngine for high-dimensional problems"
            )
        if dim == 1:
            return self._nodes[:, None], self._weights
        idx = np.indices((self.order,) * dim).reshape(dim, -1).T
        return self._nodes[idx], self._weights[idx].prod(axis=1)

    def expectation(self, f, measure: GaussianMeasure):
        z, w = self._grid(measure.dim)
        points = measure.mean + z @ measure.sqrt_cov.T
        values = np.asarray(f(points))
        return w @ values

    def description(self) -> dict:
        return {"kind": "gauss-hermite", "order": self.order}

    def __repr__(self):
        return f"GaussHermiteEngine(order={self.order})"


class MonteCarloEngine:
    """Seeded, chunked Monte Carlo expectations.

    The sample stream is split into fixed-size chunks; chunk i uses the
    i-th child of SeedSequence(seed). Threads only schedule chunks, they
    never change which chunk sees which substream or the reduction order.
    """

    def __init__(self, samples: int = 1_000_000, seed: int = 0,
                 threads: int | None = None, chunk: int = 131_072):
        if samples < 1:
            raise ValueError("samples must be >= 1")
        self.samples = int(samples)
        self.seed = int(seed)
        self.threads = _env_threads() if threads is None else max(1, int(threads))
        self.chunk = int(chunk)

    def _chunk_sizes(self):
        full, rest = divmod(self.samples, self.chunk)
        sizes = [self.chunk] * full
        if rest:
            sizes.append(rest)
        return sizes

    def _chunk_values(self, f, measure: GaussianMeasure, reduce_chunk):
        sizes = self._chunk_sizes()
        children = np.random.SeedSequence(self.seed).spawn(len(sizes))
        sqrt = measure.sqrt_cov

        def run(i):
            rng = np.random.default_rng(children[i])
            z = rng.standard_normal((sizes[i], measure.dim))
            return reduce_chunk(np.asarray(f(measure.mean + z @ sqrt.T)))

        if self.threads > 1 and len(sizes) > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                return list(pool.map(run, range(len(sizes))))
        return [run(i) for i in range(len(sizes))]

    def expectation(self, f, measure: GaussianMeasure):
        partial = self._chunk_values(f, measure, lambda v: v.sum(axis=0))
        total = partial[0]
        for p in partial[1:]:
            total = total + p
        return total / self.samples

    def expectation_with_error(self, f, measure: GaussianMeasure):
        """(estimate, standard error) for a real scalar-valued integrand."""
        def reduce_chunk(v):
            if np.iscomplexobj(v):
                raise TypeError("standard errors are defined for real integrands; "
                                "integrate real and imaginary parts separately")
            if v.ndim != 1:
                raise TypeError("standard errors are defined for scalar integrands")
            return v.sum(), (v * v).sum()
        partial = self._chunk_values(f, measure, reduce_chunk)
        total = sum(p[0] for p in partial)
        total_sq = sum(p[1] for p in partial)
        mean = total / self.samples
        var = max(total_sq / self.samples - mean * mean, 0.0)
        return float(mean), float(np.sqrt(var / self.samples))

    def description(self) -> dict:
        return {"kind": "monte-carlo", "samples": self.samples, "seed": self.seed}

    def __repr__(self):
        return (f"MonteCarloEngine(samples={self.samples}, seed={self.seed}, "
                f"threads={self.threads})")


def default_engine(dim: int, *, seed: int = 0):
    """Gauss-Hermite in low dimension, seeded Monte Carlo above three."""
    if dim <= 1:
        return GaussHermiteEngine(order=96)
    if dim <= 3:
        return GaussHermiteEngine(order=48)
    return MonteCarloEngine(samples=1_000_000, seed=seed)
