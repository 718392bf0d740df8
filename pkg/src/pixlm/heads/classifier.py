"""Sequence classification head: mean pooling plus an affine map."""

import numpy as np

from .. import numerics as nx
from .pooling import pool_sequence


class SequenceClassifier:
    def __init__(self, hidden_dim, num_classes, rng=None, prefix="head.cls"):
        rng = rng or np.random.default_rng(0)
        self.num_classes = num_classes
        self.prefix = prefix
        self.params = {
            f"{prefix}.w": nx.Tensor(rng.normal(0.0, 0.02, (hidden_dim, num_classes))
                                     .astype(np.float32), requires_grad=True),
            f"{prefix}.b": nx.Tensor(np.zeros(num_classes, dtype=np.float32),
                                     requires_grad=True),
        }

    def logits(self, hidden_state, attended):
        pooled = pool_sequence(hidden_state, attended)
        pooled = nx.reshape(pooled, (1, -1))
        out = nx.add(nx.matmul(pooled, self.params[f"{self.prefix}.w"]),
                     self.params[f"{self.prefix}.b"])
        return nx.reshape(out, (self.num_classes,))

    def predict(self, hidden_state, attended):
        # argmax breaks ties toward the lowest class index
        return int(np.argmax(self.logits(hidden_state, attended).data))

    def loss(self, hidden_state, attended, label):
        logits = nx.reshape(self.logits(hidden_state, attended), (1, -1))
        return nx.cross_entropy(logits, np.array([label]))


def classify_sequence(hidden_state, attended, weights, bias):
    """Functional form: mean-pool attended non-CLS rows, then affine map."""
    pooled = nx.reshape(pool_sequence(hidden_state, attended), (1, -1))
    out = nx.add(nx.matmul(pooled, nx.as_tensor(weights)), nx.as_tensor(bias))
    return nx.reshape(out, (out.shape[-1],))
