"""Batch assignments: sequential blocks under a permutation, plus baselines.

A batch assignment partitions row indices into consecutive blocks of size k
taken along a permutation; two samples share a batch exactly when their
positions fall in the same block.  When k does not divide N the final block
is short rather than dropping samples, since dropped rows would corrupt any
loss comparison.

The mined-negative baseline is different in kind: it oversamples.  Each
sample is paired with its strongest cross-side neighbor and an epoch holds
2N slots, so its assignment records explicit per-batch index lists and is
flagged ``oversampled``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._parallel import chunk_spans, ordered_map
from .errors import ParameterError
from .io import EmbeddingPair, validate_permutation
from .bandwidth import cuthill_mckee
from .similarity import build_sparse_graph, estimate_quantile_threshold

_ROW_CHUNK = 2048


@dataclass(frozen=True)
class BatchAssignment:
    """Grouping of sample indices into training batches.

    ``batches`` holds the per-batch index lists in epoch order.  For
    partition assignments each index appears exactly once and ``perm`` is
    the underlying permutation; for oversampled assignments (mined
    negatives) indices may repeat across batches and ``perm`` is None.
    """

    n: int
    k: int
    batches: tuple[np.ndarray, ...]
    perm: np.ndarray | None = None
    oversampled: bool = False

    # sample index -> batch ordinal, for partition assignments
    _batch_of: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        for b in self.batches:
            if b.size and (int(b.min()) < 0 or int(b.max()) >= self.n):
                raise ParameterError("batch references an index outside 0..N-1")
            b.setflags(write=False)
        if not self.oversampled:
            lookup = np.full(self.n, -1, dtype=np.int64)
            for ordinal, batch in enumerate(self.batches):
                lookup[batch] = ordinal
            object.__setattr__(self, "_batch_of", lookup)

    @property
    def total_slots(self) -> int:
        return sum(int(b.size) for b in self.batches)

    def batch_of(self, i: int) -> int:
        """Ordinal of the batch containing sample i (partition assignments only)."""
        if self.oversampled or self._batch_of is None:
            raise ParameterError("batch_of is ambiguous for oversampled assignments")
        return int(self._batch_of[i])

    def members(self, i: int) -> np.ndarray:
        """Indices sharing a batch with sample i, including i itself."""
        return self.batches[self.batch_of(i)]


def sequential_batches(order: np.ndarray, k: int) -> BatchAssignment:
    """Cut a permutation into consecutive blocks of size k (last may be short)."""
    order = validate_permutation(order)
    n = order.size
    if not 1 <= k <= n:
        raise ParameterError(f"batch size must lie in [1, {n}], got {k}")
    batches = tuple(order[s:e].copy() for s, e in chunk_spans(n, k))
    return BatchAssignment(n=n, k=k, batches=batches, perm=order)


def random_batches(n: int, k: int, seed: int) -> BatchAssignment:
    """Sequential batches over a uniformly random permutation.

    The permutation is a Fisher-Yates shuffle driven by NumPy's seeded
    PCG64 generator, so the same seed reproduces the same assignment on
    every platform.
    """
    if n < 1:
        raise ParameterError(f"need at least one sample, got {n}")
    order = np.random.default_rng(seed).permutation(n).astype(np.int64)
    return sequential_batches(order, k)


def nearest_cross_neighbors(pair: EmbeddingPair, threads: int = 1) -> np.ndarray:
    """For each row i, the j != i maximizing x_i . y_j (ties: lowest j)."""

    def scan(span: tuple[int, int]) -> np.ndarray:
        start, stop = span
        block = pair.x[start:stop] @ pair.y.T
        block[np.arange(start, stop) - start, np.arange(start, stop)] = -np.inf
        return np.argmax(block, axis=1)

    parts = ordered_map(scan, chunk_spans(pair.n, _ROW_CHUNK), threads)
    return np.concatenate(parts).astype(np.int64)


def hard_negative_batches(
    pair: EmbeddingPair, k: int, seed: int = 0, threads: int = 1
) -> BatchAssignment:
    """Mined-negative baseline: each batch pairs k/2 samples with their neighbors.

    Samples are visited in a seeded random order; each batch records k/2
    reference indices followed by their mined partners.  An epoch therefore
    spans 2N slots and a popular neighbor may appear in several batches.
    """
    if k % 2 != 0:
        raise ParameterError(f"mined-negative batches need an even batch size, got {k}")
    n = pair.n
    if n < 2:
        raise ParameterError("mining a negative needs at least two samples")
    if not 2 <= k <= 2 * n:
        raise ParameterError(f"batch size must lie in [2, {2 * n}], got {k}")
    nn = nearest_cross_neighbors(pair, threads=threads)
    refs = np.random.default_rng(seed).permutation(n).astype(np.int64)
    half = k // 2
    batches = tuple(
        np.concatenate([refs[s:e], nn[refs[s:e]]]) for s, e in chunk_spans(n, half)
    )
    return BatchAssignment(n=n, k=k, batches=batches, perm=None, oversampled=True)


def bandwidth_pipeline(
    pair: EmbeddingPair,
    q: float,
    k: int,
    chunk_rows: int | None = None,
    reverse: bool = True,
    threads: int = 1,
) -> tuple[np.ndarray, BatchAssignment]:
    """Full reordering pipeline: normalize, threshold, sparsify, order, batch.

    Composition: row normalization, cutoff estimation at quantile ``q``
    (``chunk_rows`` defaults to min(N, 4096)), sparse graph construction,
    BFS bandwidth ordering (reversed by default), sequential batching.
    Pure function of its inputs: repeated runs are bit-identical.
    """
    pair = pair.normalized()
    if chunk_rows is None:
        chunk_rows = min(pair.n, 4096)
    threshold = estimate_quantile_threshold(pair, q, chunk_rows, threads=threads)
    graph = build_sparse_graph(pair, threshold, threads=threads)
    order = cuthill_mckee(graph, reverse=reverse)
    return order, sequential_batches(order, k)


def format_batches(assignment: BatchAssignment) -> str:
    """Dump format: one ``batch_index: i1 i2 ... ik`` line per batch."""
    lines = [
        f"{ordinal}: " + " ".join(str(int(i)) for i in batch)
        for ordinal, batch in enumerate(assignment.batches)
    ]
    return "\n".join(lines) + "\n"
