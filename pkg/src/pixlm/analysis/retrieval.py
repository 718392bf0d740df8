"""Cross-lingual retrieval by cosine similarity."""

import numpy as np

from ..errors import SizeMismatchError


def retrieval_recall_at_k(queries, candidates, k=5):
    """Fraction of queries whose gold pair (same index) ranks in the top k.

    Inputs are unit-norm row matrices, so cosine similarity is a dot
    product. Ties rank the lower candidate index first.
    """
    q = np.asarray(queries, dtype=np.float64)
    c = np.asarray(candidates, dtype=np.float64)
    if q.shape != c.shape:
        raise SizeMismatchError(f"queries {q.shape} vs candidates {c.shape}")
    n = q.shape[0]
    if n == 0:
        raise SizeMismatchError("empty retrieval sets")
    sims = q @ c.T
    hits = 0
    gold = sims[np.arange(n), np.arange(n)]
    for i in range(n):
        row = sims[i]
        # candidates strictly better, plus equal-similarity ones at lower index
        better = np.count_nonzero(row > gold[i])
        tied_before = np.count_nonzero((row == gold[i]) & (np.arange(n) < i))
        if better + tied_before < k:
            hits += 1
    return hits / n
