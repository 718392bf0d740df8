"""Pooling from patch-level hidden states to word and sentence vectors."""

import numpy as np

from .. import numerics as nx
from ..errors import AllPaddingError, EmptySpanError


def pool_words(hidden_state, word_spans, strategy="mean"):
    """One vector per word from its patch span at a chosen layer.

    `hidden_state` rows are CLS followed by patch tokens, so span (s, e)
    maps to rows s+1 .. e. Strategies: "mean" (default) and "first".
    """
    if strategy not in ("mean", "first"):
        raise ValueError(f"unknown pooling strategy {strategy!r}")
    vectors = []
    n_rows = hidden_state.shape[0]
    for start, end in word_spans:
        if end <= start:
            raise EmptySpanError(f"span ({start}, {end}) covers no patches")
        if end + 1 > n_rows:
            raise EmptySpanError(f"span ({start}, {end}) outside encoded region")
        rows = nx.gather_rows(hidden_state, np.arange(start + 1, end + 1))
        if strategy == "first":
            vectors.append(nx.gather_rows(rows, np.array([0])))
        else:
            vectors.append(nx.mean_(rows, axis=0, keepdims=True))
    if not vectors:
        return nx.Tensor(np.zeros((0, hidden_state.shape[1]), dtype=np.float32))
    return nx.concat(vectors, axis=0)


def pool_sequence(hidden_state, attended):
    """Mean over attended non-CLS rows; `attended` is a bool row mask."""
    attended = np.asarray(attended, dtype=bool)
    if attended.shape[0] != hidden_state.shape[0]:
        raise EmptySpanError("attended mask length != hidden state rows")
    idx = np.flatnonzero(attended)
    idx = idx[idx > 0]  # never pool the CLS row
    if idx.size == 0:
        raise AllPaddingError("no attended positions to pool over")
    return nx.mean_(nx.gather_rows(hidden_state, idx), axis=0)
