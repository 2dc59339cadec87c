"""Temperature-scaled contrastive losses, their log-sum-exp envelopes, and
the batch objectives they induce.

Row i of ``x`` is scored against candidate rows of ``y`` through scaled
logits z_ij = <x_i, y_j> / tau, with the aligned row as the positive.  The
full-candidate ("global") loss lets every row see all N candidates; the
in-batch ("training") loss restricts each row to the candidates sharing its
batch.  All log-sum-exp terms subtract the row maximum first, so losses
stay finite at temperatures where the naive exponentials overflow.

Per-row envelope identities (count = number of candidates in the sum):

    max_j z_j <= logsumexp_j z_j <= max_j z_j + log(count)
    logsumexp_j z_j >= min_j z_j + log(count)

Chaining them bounds the training loss from below, the global loss from
above, and their gap from both sides.  The gap bounds use log(N/count) per
row with the row's actual candidate count, which reduces to the familiar
log(N/k) when every batch is full.

Two scalar objectives summarize how hard a batch assignment is:

* bottleneck objective -- the smallest symmetric in-batch cross similarity
  min(<x_i,y_j>, <x_j,y_i>) over co-batched pairs i != j (larger is better);
* total objective -- the sum of <x_i,y_j> + <x_j,y_i> over ordered
  co-batched pairs i != j (larger is better).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log

import numpy as np

from ._parallel import chunk_spans, ordered_map
from .batching import BatchAssignment
from .errors import ObjectiveUndefined, ParameterError
from .io import EmbeddingPair

_ROW_CHUNK = 2048


def _check_tau(tau: float) -> float:
    if not tau > 0:
        raise ParameterError(f"temperature must be positive, got {tau}")
    return float(tau)


def _check_assignment(pair: EmbeddingPair, assignment: BatchAssignment) -> None:
    if assignment.n != pair.n:
        raise ParameterError(
            f"assignment covers {assignment.n} samples, embeddings have {pair.n}"
        )
    for batch in assignment.batches:
        if batch.size and (batch.min() < 0 or batch.max() >= pair.n):
            raise ParameterError("batch references an index outside 0..N-1")


def _logsumexp_rows(z: np.ndarray) -> np.ndarray:
    m = z.max(axis=1)
    return m + np.log(np.exp(z - m[:, None]).sum(axis=1))


@dataclass(frozen=True)
class _RowStats:
    """Per-sample logit summaries over the full candidate set."""

    lse: np.ndarray
    positive: np.ndarray
    row_max: np.ndarray


def _global_row_stats(pair: EmbeddingPair, tau: float, threads: int = 1) -> _RowStats:
    def scan(span: tuple[int, int]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        start, stop = span
        z = pair.x[start:stop] @ pair.y.T / tau
        rows = np.arange(stop - start)
        return _logsumexp_rows(z), z[rows, rows + start], z.max(axis=1)

    parts = ordered_map(scan, chunk_spans(pair.n, _ROW_CHUNK), threads)
    return _RowStats(
        lse=np.concatenate([p[0] for p in parts]),
        positive=np.concatenate([p[1] for p in parts]),
        row_max=np.concatenate([p[2] for p in parts]),
    )


@dataclass(frozen=True)
class _SlotStats:
    """Per-slot logit summaries over each slot's in-batch candidate set.

    For partition assignments slots coincide with samples.  Oversampled
    assignments contribute one slot per recorded batch entry; their
    candidate sets are de-duplicated so no inner product is double-counted
    inside one batch.
    """

    sample: np.ndarray  # original row index of each slot
    lse: np.ndarray
    positive: np.ndarray
    cand_min: np.ndarray
    cand_max: np.ndarray
    cand_count: np.ndarray


def _slot_stats(
    pair: EmbeddingPair, assignment: BatchAssignment, tau: float, threads: int = 1
) -> _SlotStats:
    def scan(batch: np.ndarray) -> tuple[np.ndarray, ...]:
        candidates = np.unique(batch) if assignment.oversampled else batch
        z = pair.x[batch] @ pair.y[candidates].T / tau
        rows = np.arange(batch.size)
        cols = np.searchsorted(candidates, batch) if assignment.oversampled else rows
        return (
            batch,
            _logsumexp_rows(z),
            z[rows, cols],
            z.min(axis=1),
            z.max(axis=1),
            np.full(batch.size, candidates.size, dtype=np.int64),
        )

    parts = ordered_map(scan, assignment.batches, threads)
    return _SlotStats(*(np.concatenate([p[i] for p in parts]) for i in range(6)))


def ntxent_global(pair: EmbeddingPair, tau: float, threads: int = 1) -> float:
    """Contrast loss with every sample scored against all N candidates."""
    tau = _check_tau(tau)
    stats = _global_row_stats(pair, tau, threads)
    return float(np.sum(stats.lse - stats.positive) / pair.n)


def ntxent_train(
    pair: EmbeddingPair, assignment: BatchAssignment, tau: float, threads: int = 1
) -> float:
    """Contrast loss with each sample restricted to its in-batch candidates.

    Partition assignments average over the N samples; oversampled ones
    average over all recorded slots (2N for the mined-negative baseline).
    """
    tau = _check_tau(tau)
    _check_assignment(pair, assignment)
    stats = _slot_stats(pair, assignment, tau, threads)
    terms = stats.lse - stats.positive
    return float(np.sum(terms) / terms.size)


def lse_component_bounds(
    pair: EmbeddingPair, assignment: BatchAssignment, tau: float
) -> tuple[float, float, float]:
    """Envelope values (ub_global, lb_train_standard, lb_train_translation).

    Guarantees lb_train_* <= training loss <= global loss <= ub_global for
    partition assignments, up to accumulation noise well under 1e-9.
    """
    tau = _check_tau(tau)
    _check_assignment(pair, assignment)
    g = _global_row_stats(pair, tau)
    s = _slot_stats(pair, assignment, tau)
    ub_global = float(np.sum(g.row_max - g.positive) / pair.n + log(pair.n))
    lb_standard = float(np.sum(s.cand_max - s.positive) / s.lse.size)
    lb_translation = float(
        np.sum(s.cand_min - s.positive + np.log(s.cand_count)) / s.lse.size
    )
    return ub_global, lb_standard, lb_translation


def gap_upper_bounds(
    pair: EmbeddingPair, assignment: BatchAssignment, tau: float
) -> tuple[float, float]:
    """Upper bounds on (global - training) loss: (translation, standard).

    Per slot with candidate set U and row maximum taken over all N columns:

        translation branch: max_j z - min_U z + log(N / |U|)
        standard branch:    max_j z - max_U z + log N

    Both average over slots; the true gap never exceeds either bound for
    partition assignments.
    """
    tau = _check_tau(tau)
    _check_assignment(pair, assignment)
    g = _global_row_stats(pair, tau)
    s = _slot_stats(pair, assignment, tau)
    slots = s.lse.size
    trans = np.sum(g.row_max[s.sample] - s.cand_min + np.log(pair.n / s.cand_count))
    std = np.sum(g.row_max[s.sample] - s.cand_max)
    return float(trans / slots), float(std / slots + log(pair.n))


def qbap_objective(pair: EmbeddingPair, assignment: BatchAssignment) -> float:
    """Smallest symmetric cross similarity over co-batched negative pairs.

    Raises ObjectiveUndefined when no batch holds two distinct samples.
    """
    _check_assignment(pair, assignment)
    worst = np.inf
    for batch in assignment.batches:
        candidates = np.unique(batch) if assignment.oversampled else batch
        if candidates.size < 2:
            continue
        m = pair.x[candidates] @ pair.y[candidates].T
        z = np.minimum(m, m.T)
        np.fill_diagonal(z, np.inf)
        worst = min(worst, float(z.min()))
    if not np.isfinite(worst):
        raise ObjectiveUndefined("no batch contains a negative pair")
    return worst


def qap_objective(pair: EmbeddingPair, assignment: BatchAssignment) -> float:
    """Total in-batch cross similarity, both directions, over negative pairs.

    Equals sum_i sum_{j in batch(i), j != i} (<x_i,y_j> + <x_j,y_i>); zero
    when every batch is a singleton.
    """
    _check_assignment(pair, assignment)
    total = 0.0
    for batch in assignment.batches:
        candidates = np.unique(batch) if assignment.oversampled else batch
        if candidates.size < 2:
            continue
        m = pair.x[candidates] @ pair.y[candidates].T
        total += 2.0 * float(m.sum() - np.trace(m))
    return total


@dataclass(frozen=True)
class GapReport:
    """Losses, gap, gap bounds, and batch objectives for one assignment."""

    n: int
    k: int
    tau: float
    global_loss: float
    train_loss: float
    gap: float
    ub_gap_translation: float
    ub_gap_standard: float
    qbap_value: float | None
    qap_value: float
    strategy: str | None = None
    quantile: float | None = None

    def to_json(self) -> str:
        """Serialize with 17 significant digits on every float."""

        def num(v) -> str:
            if v is None:
                return "null"
            if isinstance(v, int):
                return str(v)
            return format(float(v), ".17g")

        strategy = "null" if self.strategy is None else f'"{self.strategy}"'
        fields = [
            f'"n": {self.n}',
            f'"k": {self.k}',
            f'"tau": {num(self.tau)}',
            f'"global_loss": {num(self.global_loss)}',
            f'"train_loss": {num(self.train_loss)}',
            f'"gap": {num(self.gap)}',
            f'"ub_gap_translation": {num(self.ub_gap_translation)}',
            f'"ub_gap_standard": {num(self.ub_gap_standard)}',
            f'"qbap_value": {num(self.qbap_value)}',
            f'"qap_value": {num(self.qap_value)}',
            f'"strategy": {strategy}',
            f'"quantile": {num(self.quantile)}',
        ]
        return "{" + ", ".join(fields) + "}"


def gap_report(
    pair: EmbeddingPair,
    assignment: BatchAssignment,
    tau: float,
    strategy: str | None = None,
    quantile: float | None = None,
    threads: int = 1,
) -> GapReport:
    """Assemble losses, bounds, and objectives for one batch assignment.

    ``qbap_value`` is null when every batch is a singleton (k = 1), where
    the bottleneck objective has no pairs to range over.
    """
    tau = _check_tau(tau)
    _check_assignment(pair, assignment)
    g = _global_row_stats(pair, tau, threads)
    s = _slot_stats(pair, assignment, tau, threads)
    n = pair.n
    slots = s.lse.size
    global_loss = float(np.sum(g.lse - g.positive) / n)
    train_terms = s.lse - s.positive
    train_loss = float(np.sum(train_terms) / slots)
    ub_translation = float(
        np.sum(g.row_max[s.sample] - s.cand_min + np.log(n / s.cand_count)) / slots
    )
    ub_standard = float(np.sum(g.row_max[s.sample] - s.cand_max) / slots + log(n))
    try:
        qbap = qbap_objective(pair, assignment)
    except ObjectiveUndefined:
        qbap = None
    return GapReport(
        n=n,
        k=assignment.k,
        tau=float(tau),
        global_loss=global_loss,
        train_loss=train_loss,
        gap=global_loss - train_loss,
        ub_gap_translation=ub_translation,
        ub_gap_standard=ub_standard,
        qbap_value=qbap,
        qap_value=qap_objective(pair, assignment),
        strategy=strategy,
        quantile=quantile,
    )
