"""Losses, the gap between them, and the envelopes that bound the gap.

The in-batch loss always undershoots the loss over all candidates, because
each row contrasts against k candidates instead of N.  Log-sum-exp
envelopes sandwich both losses, and the induced gap bounds depend on the
batch assignment only through which candidates share a batch -- that is
the quantity batch construction can optimize.
"""

import math

import numpy as np

import contrabatch as cb

rng = np.random.default_rng(3)
n, d, k, tau = 48, 12, 8, 0.1

pair = cb.EmbeddingPair(
    cb.normalize_rows(rng.standard_normal((n, d))),
    cb.normalize_rows(rng.standard_normal((n, d))),
)
assignment = cb.random_batches(n, k, seed=0)

glob = cb.ntxent_global(pair, tau)
train = cb.ntxent_train(pair, assignment, tau)
ub_global, lb_std, lb_trans = cb.lse_component_bounds(pair, assignment, tau)
ub_trans, ub_std = cb.gap_upper_bounds(pair, assignment, tau)

print(f"N={n}, k={k}, tau={tau}")
print(f"\nloss over all {n} candidates per row: {glob:.4f}")
print(f"loss over the {k} in-batch candidates: {train:.4f}")
print(f"gap: {glob - train:.4f}")

print("\nthe envelope chain (each line must not exceed the next):")
print(f"  translation lower bound on in-batch loss: {lb_trans:.4f}")
print(f"  standard lower bound on in-batch loss:    {lb_std:.4f}")
print(f"  in-batch loss:                            {train:.4f}")
print(f"  all-candidates loss:                      {glob:.4f}")
print(f"  upper bound on all-candidates loss:       {ub_global:.4f}")

print(f"\ngap bounds: translation {ub_trans:.4f}, standard {ub_std:.4f}")

# When every inner product is identical, all envelopes collapse: the loss
# is exactly log N, the gap exactly log(N / k).
flat = np.tile(np.eye(1, d), (n, 1))
constant = cb.EmbeddingPair(flat, flat.copy())
seq = cb.sequential_batches(np.arange(n), k)
print("\nconstant-similarity sanity check:")
print(f"  loss = {cb.ntxent_global(constant, tau):.6f} vs log N = {math.log(n):.6f}")
gap = cb.ntxent_global(constant, tau) - cb.ntxent_train(constant, seq, tau)
print(f"  gap  = {gap:.6f} vs log(N/k) = {math.log(n / k):.6f}")

# Machine-readable summary of everything above.
report = cb.gap_report(pair, assignment, tau, strategy="random")
print("\ngap report JSON:")
print(report.to_json())
