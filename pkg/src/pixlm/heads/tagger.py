"""Per-word BIO tagging head: affine map, no transition constraints."""

import numpy as np

from .. import numerics as nx
from ..errors import EmptyInputError


class TokenTagger:
    def __init__(self, hidden_dim, labels, rng=None, prefix="head.ner"):
        rng = rng or np.random.default_rng(0)
        self.labels = list(labels)
        self.prefix = prefix
        self.params = {
            f"{prefix}.w": nx.Tensor(rng.normal(0.0, 0.02, (hidden_dim, len(self.labels)))
                                     .astype(np.float32), requires_grad=True),
            f"{prefix}.b": nx.Tensor(np.zeros(len(self.labels), dtype=np.float32),
                                     requires_grad=True),
        }

    def logits(self, words):
        if words.shape[0] == 0:
            raise EmptyInputError("tagger requires at least one word")
        return nx.add(nx.matmul(words, self.params[f"{self.prefix}.w"]),
                      self.params[f"{self.prefix}.b"])

    def predict(self, words):
        # lowest label index wins ties, so zero weights yield label 0 ("O")
        return [int(i) for i in np.argmax(self.logits(words).data, axis=1)]

    def loss(self, words, gold_labels):
        return nx.cross_entropy(self.logits(words), np.asarray(gold_labels, dtype=np.int64))


def tag_tokens(words, weights, bias):
    """Functional form: per-word affine logits, argmax with low-index ties."""
    if words.shape[0] == 0:
        raise EmptyInputError("tag_tokens requires at least one word")
    logits = nx.add(nx.matmul(words, nx.as_tensor(weights)), nx.as_tensor(bias))
    return [int(i) for i in np.argmax(logits.data, axis=1)]
