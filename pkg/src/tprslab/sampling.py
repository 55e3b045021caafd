"""Deterministic chunked Monte-Carlo machinery.

Work is split into fixed-size chunks addressed by index; chunk index (never
thread identity) seeds the generator and results merge in index order, so an
estimate depends only on (seed, samples) and is byte-identical for any thread
count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .randprims import RngSeed

__all__ = ["MeanAccumulator", "chunk_layout", "run_ordered", "paired_value_means"]

DEFAULT_CHUNK = 1024


def chunk_layout(samples: int, chunk: int = DEFAULT_CHUNK) -> list[tuple[int, int, int]]:
    """(chunk_index, start_offset, size) triples covering ``samples`` draws."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    out = []
    start = 0
    idx = 0
    while start < samples:
        size = min(chunk, samples - start)
        out.append((idx, start, size))
        start += size
        idx += 1
    return out


def run_ordered(worker, count: int, threads: int = 1) -> list:
    """Evaluate worker(0..count-1), merged in index order regardless of threads."""
    if threads <= 1 or count <= 1:
        return [worker(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, range(count)))


@dataclass
class MeanAccumulator:
    """Running sum / sum-of-squares for a scalar stream."""

    total: float = 0.0
    total_sq: float = 0.0
    count: int = 0

    def add_block(self, values: np.ndarray) -> None:
        v = np.asarray(values, dtype=float)
        self.total += float(v.sum())
        self.total_sq += float((v * v).sum())
        self.count += int(v.size)

    def merge(self, other: "MeanAccumulator") -> None:
        self.total += other.total
        self.total_sq += other.total_sq
        self.count += other.count

    @property
    def mean(self) -> float:
        return self.total / self.count

    @property
    def stderr(self) -> float:
        if self.count < 2:
            return 0.0
        var = max(self.total_sq / self.count - self.mean**2, 0.0)
        # unbiased-ish correction; negligible at the sample counts used here
        var *= self.count / (self.count - 1)
        return float(np.sqrt(var / self.count))


def paired_value_means(
    seed: RngSeed,
    samples: int,
    value_fns,
    salts=None,
    threads: int = 1,
    chunk: int = DEFAULT_CHUNK,
) -> list[MeanAccumulator]:
    """Per-stream means where stream k's sample i uses a generator seeded by
    (seed, chunk, offset, salt_k).

    Streams sharing a salt receive identically seeded fresh generators at each
    sample index, so identical sampling procedures yield identical draws
    (common-random-number pairing; a same-spec same-salt null comparison is
    exactly 0). Distinct salts decorrelate the streams.
    """
    layout = chunk_layout(samples, chunk)
    n_streams = len(value_fns)
    if salts is None:
        salts = (0,) * n_streams
    if len(salts) != n_streams:
        raise ValueError("one salt per value stream required")

    def worker(i: int):
        idx, _, size = layout[i]
        accs = [MeanAccumulator() for _ in range(n_streams)]
        for off in range(size):
            for k, fn in enumerate(value_fns):
                accs[k].add_block(np.array([fn(seed.generator(idx, off, salts[k]))]))
        return accs

    totals = [MeanAccumulator() for _ in range(n_streams)]
    for accs in run_ordered(worker, len(layout), threads):
        for k in range(n_streams):
            totals[k].merge(accs[k])
    return totals
