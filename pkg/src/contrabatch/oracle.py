"""Exhaustive solvers over all fixed-block-size partitions at toy scale.

Each solver enumerates every way to split {0..N-1} into unordered blocks of
size k (one short block of size N mod k when k does not divide N) and picks
the partition optimizing its objective.  Enumeration is canonical -- the
smallest unassigned index opens each new block -- so every partition is
produced exactly once, in lexicographic order; ties therefore resolve to
the lexicographically smallest optimum.

These exist to validate the heuristics and objective definitions, not to
solve anything at production size: factorial growth is capped hard.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import factorial

import numpy as np

from .batching import BatchAssignment
from .errors import CapacityError, ObjectiveUndefined, ParameterError
from .io import EmbeddingPair

_MAX_NODES = 10
_MAX_PARTITIONS = 10**6


@dataclass(frozen=True)
class OracleResult:
    best_value: float
    best_assignment: BatchAssignment
    enumerated_count: int


def partition_count(n: int, k: int) -> int:
    """Number of unordered partitions into blocks of size k (last short)."""
    full, rest = divmod(n, k)
    count = factorial(n) // (factorial(k) ** full * factorial(full))
    if rest:
        count //= factorial(rest)
    return count


def iter_block_partitions(n: int, k: int):
    """Yield each partition once as a tuple of sorted index tuples.

    Blocks appear ordered by their smallest element.  With a short block
    present, the opener of every block chooses between the two remaining
    block sizes, which covers partitions where the short block is any of
    the blocks.
    """
    if not 1 <= k <= n:
        raise ParameterError(f"block size must lie in [1, {n}], got {k}")
    full, rest = divmod(n, k)

    def recurse(remaining: tuple[int, ...], fulls_left: int, shorts_left: int):
        if not remaining:
            yield ()
            return
        opener, rest_items = remaining[0], remaining[1:]
        sizes = set()
        if fulls_left:
            sizes.add(k)
        if shorts_left:
            sizes.add(rest)
        for size in sorted(sizes):
            for companions in combinations(rest_items, size - 1):
                block = (opener,) + companions
                leftover = tuple(i for i in rest_items if i not in companions)
                consumed_full = size == k
                for tail in recurse(
                    leftover,
                    fulls_left - consumed_full,
                    shorts_left - (not consumed_full),
                ):
                    yield (block,) + tail

    yield from recurse(tuple(range(n)), full, 1 if rest else 0)


def _assignment_from_partition(partition, n: int, k: int) -> BatchAssignment:
    # Sequential batching puts the short block last; reorder to match.
    blocks = sorted(partition, key=lambda b: (len(b) != k, b))
    order = np.array([i for block in blocks for i in block], dtype=np.int64)
    batches = tuple(np.array(block, dtype=np.int64) for block in blocks)
    return BatchAssignment(n=n, k=k, batches=batches, perm=order)


def _guard(pair: EmbeddingPair, k: int) -> None:
    n = pair.n
    if n > _MAX_NODES:
        raise CapacityError(f"exhaustive enumeration limited to {_MAX_NODES} samples, got {n}")
    if not 1 <= k <= n:
        raise ParameterError(f"block size must lie in [1, {n}], got {k}")
    if partition_count(n, k) > _MAX_PARTITIONS:
        raise CapacityError("too many partitions to enumerate")


def exhaustive_qbap(pair: EmbeddingPair, k: int) -> OracleResult:
    """Partition maximizing the smallest in-batch symmetric similarity."""
    _guard(pair, k)
    if k < 2:
        raise ObjectiveUndefined("bottleneck objective needs blocks of size >= 2")
    m = pair.x @ pair.y.T
    z = np.minimum(m, m.T)

    def value(partition) -> float:
        worst = np.inf
        for block in partition:
            if len(block) < 2:
                continue
            sub = z[np.ix_(block, block)]
            worst = min(worst, float(np.min(sub[~np.eye(len(block), dtype=bool)])))
        return worst

    return _maximize(pair, k, value)


def exhaustive_qap(pair: EmbeddingPair, k: int) -> OracleResult:
    """Partition maximizing total in-batch cross similarity (both directions)."""
    _guard(pair, k)
    m = pair.x @ pair.y.T

    def value(partition) -> float:
        total = 0.0
        for block in partition:
            sub = m[np.ix_(block, block)]
            total += 2.0 * float(sub.sum() - np.trace(sub))
        return total

    return _maximize(pair, k, value)


def exhaustive_min_gap(pair: EmbeddingPair, k: int, tau: float) -> OracleResult:
    """Partition minimizing the gap between global and in-batch losses.

    The global loss is partition-independent, so this maximizes the
    in-batch loss directly and reports the resulting gap.
    """
    _guard(pair, k)
    if not tau > 0:
        raise ParameterError(f"temperature must be positive, got {tau}")
    z = pair.x @ pair.y.T / tau
    row_lse = _lse_rows(z)
    global_loss = float(np.sum(row_lse - np.diag(z)) / pair.n)

    def train(partition) -> float:
        total = 0.0
        for block in partition:
            sub = z[np.ix_(block, block)]
            total += float(np.sum(_lse_rows(sub) - np.diag(sub)))
        return total / pair.n

    best_gap = np.inf
    best_partition = None
    count = 0
    for partition in iter_block_partitions(pair.n, k):
        count += 1
        gap = global_loss - train(partition)
        if gap < best_gap:
            best_gap = gap
            best_partition = partition
    return OracleResult(
        best_value=float(best_gap),
        best_assignment=_assignment_from_partition(best_partition, pair.n, k),
        enumerated_count=count,
    )


def _maximize(pair: EmbeddingPair, k: int, value) -> OracleResult:
    best = -np.inf
    best_partition = None
    count = 0
    for partition in iter_block_partitions(pair.n, k):
        count += 1
        v = value(partition)
        if v > best:
            best = v
            best_partition = partition
    return OracleResult(
        best_value=float(best),
        best_assignment=_assignment_from_partition(best_partition, pair.n, k),
        enumerated_count=count,
    )


def _lse_rows(z: np.ndarray) -> np.ndarray:
    m = z.max(axis=1)
    return m + np.log(np.exp(z - m[:, None]).sum(axis=1))
