"""Catalog, Mandelbrot-Zipf popularity and seeded request streams."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, NamedTuple, Sequence

import numpy as np

__all__ = [
    "MZipfDistribution",
    "Catalog",
    "RequestEvent",
    "WorkloadError",
    "mzipf_pmf",
    "sample_object",
    "sample_objects",
    "chunk_count",
    "generate_workload",
]


class WorkloadError(ValueError):
    pass


class MZipfDistribution:
    """Mandelbrot-Zipf law over ranks ``1..n``: ``p(i) ~ (i + beta) ** -alpha``.

    The pmf and its cumulative table are computed once at construction, so
    building one for ``n = 10**7`` costs ~160 MB of float64 for a moment.
    """

    def __init__(self, alpha: float, beta: float, n: int):
        if n < 1:
            raise WorkloadError(f"catalog size must be >= 1, got {n}")
        if alpha < 0:
            raise WorkloadError(f"alpha must be >= 0, got {alpha}")
        if beta < 0:
            raise WorkloadError(f"beta must be >= 0, got {beta}")
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.n = int(n)
        weights = (np.arange(1, self.n + 1, dtype=np.float64) + self.beta) ** -self.alpha
        # sum smallest-first to keep the normalisation accurate for large n
        total = math.fsum(weights[::-1]) if self.n <= 10**6 else float(np.sum(weights[::-1]))
        self.pmf = weights / total
        cdf = np.cumsum(self.pmf)
        cdf[-1] = 1.0
        self.cdf = cdf

    def __repr__(self) -> str:
        return f"MZipfDistribution(alpha={self.alpha}, beta={self.beta}, n={self.n})"


def mzipf_pmf(dist: MZipfDistribution, rank: int) -> float:
    """Probability of the object at popularity ``rank`` (1-based)."""
    if not 1 <= rank <= dist.n:
        raise WorkloadError(f"rank {rank} outside 1..{dist.n}")
    return float(dist.pmf[rank - 1])


def sample_object(dist: MZipfDistribution, rng: np.random.Generator) -> int:
    """Draw one rank by inverse CDF; consumes exactly one ``rng.random()``."""
    u = rng.random()
    return min(int(np.searchsorted(dist.cdf, u, side="right")), dist.n - 1) + 1


def sample_objects(dist: MZipfDistribution, rng: np.random.Generator, size: int) -> np.ndarray:
    """Vectorised :func:`sample_object`; yields the same ranks as ``size`` single calls."""
    u = rng.random(size)
    idx = np.searchsorted(dist.cdf, u, side="right")
    np.minimum(idx, dist.n - 1, out=idx)
    return idx + 1


def chunk_count(filesize: int, chunk_size: int) -> int:
    if filesize <= 0 or chunk_size <= 0:
        raise WorkloadError(f"filesize and chunk_size must be positive, got {filesize}, {chunk_size}")
    return -(-filesize // chunk_size)


@dataclass(frozen=True)
class Catalog:
    n_objects: int
    avg_filesize: int
    chunk_size: int

    def __post_init__(self):
        if self.n_objects < 1:
            raise WorkloadError("catalog needs at least one object")
        chunk_count(self.avg_filesize, self.chunk_size)

    @property
    def chunks_per_object(self) -> int:
        return chunk_count(self.avg_filesize, self.chunk_size)


class RequestEvent(NamedTuple):
    time: float
    client: int
    object: int


def generate_workload(
    dist: MZipfDistribution,
    clients: Sequence[int],
    rate: float,
    duration: float,
    rng: np.random.Generator,
) -> List[RequestEvent]:
    """Merged per-client Poisson request stream on ``[0, duration)``.

    Each client draws its arrival count from Poisson(rate * duration) and
    places the arrivals uniformly, which is the same process as summing
    exponential gaps. Clients are drawn in the order given, then the object
    ranks for the merged stream are drawn in time order.
    """
    if not clients:
        raise WorkloadError("workload needs at least one client")
    if rate < 0 or duration <= 0:
        raise WorkloadError(f"need rate >= 0 and duration > 0, got rate={rate}, duration={duration}")
    if rate == 0:
        return []
    times = []
    owners = []
    for c in clients:
        k = int(rng.poisson(rate * duration))
        t = np.sort(rng.random(k) * duration)
        times.append(t)
        owners.append(np.full(k, c, dtype=np.int64))
    t_all = np.concatenate(times)
    c_all = np.concatenate(owners)
    order = np.lexsort((c_all, t_all))
    t_all = t_all[order]
    c_all = c_all[order]
    objs = sample_objects(dist, rng, len(t_all))
    return [RequestEvent(float(t), int(c), int(o)) for t, c, o in zip(t_all, c_all, objs)]
