"""Biaffine arc and label scoring over word representations.

Arc score of dependent j with candidate head i:
    mlp_dep(h_j)^T U_arc mlp_head(h_i) + b^T mlp_head(h_i)
ROOT participates as a learned head vector. Label scores use one bilinear
form per label plus linear terms for dependent and head.
"""

import numpy as np

from .. import numerics as nx


def _ones_col(n, dtype):
    return nx.Tensor(np.ones((n, 1), dtype=dtype))


class BiaffineParser:
    def __init__(self, hidden_dim, labels, proj_dim=128, rng=None, prefix="head.udp"):
        rng = rng or np.random.default_rng(0)
        self.labels = list(labels)
        self.proj_dim = proj_dim
        self.prefix = prefix
        L = len(self.labels)

        def normal(shape, std=0.02):
            return nx.Tensor(rng.normal(0.0, std, shape).astype(np.float32), requires_grad=True)

        def zeros(shape):
            return nx.Tensor(np.zeros(shape, dtype=np.float32), requires_grad=True)

        p = prefix
        self.params = {
            f"{p}.dep.w": normal((hidden_dim, proj_dim)),
            f"{p}.dep.b": zeros((proj_dim,)),
            f"{p}.head.w": normal((hidden_dim, proj_dim)),
            f"{p}.head.b": zeros((proj_dim,)),
            f"{p}.root": normal((hidden_dim,)),
            f"{p}.arc.u": normal((proj_dim, proj_dim)),
            f"{p}.arc.b": zeros((proj_dim,)),
            f"{p}.label.u": normal((L, proj_dim, proj_dim)),
            f"{p}.label.wdep": normal((L, proj_dim)),
            f"{p}.label.whead": normal((L, proj_dim)),
            f"{p}.label.b": zeros((L,)),
        }

    def _project(self, words):
        """Dep and head projections; heads get ROOT prepended as row 0."""
        p = self.prefix
        dep = nx.gelu(nx.add(nx.matmul(words, self.params[f"{p}.dep.w"]),
                             self.params[f"{p}.dep.b"]))
        root = nx.reshape(self.params[f"{p}.root"], (1, -1))
        with_root = nx.concat([root, words], axis=0)
        head = nx.gelu(nx.add(nx.matmul(with_root, self.params[f"{p}.head.w"]),
                              self.params[f"{p}.head.b"]))
        return dep, head

    def scores(self, words):
        """Return (arc_scores, label_scores).

        arc_scores: (n+1, n), rows are candidate heads (row 0 = ROOT),
        columns are dependents. label_scores: (n, n+1, L).
        """
        p = self.prefix
        n = words.shape[0]
        dep, head = self._project(words)  # (n, d), (n+1, d)

        # arc: head U dep^T -> (n+1, n), plus head-bias column replicated
        arc = nx.matmul(head, nx.matmul(self.params[f"{p}.arc.u"], nx.transpose_last(dep)))
        head_bias = nx.matmul(head, nx.reshape(self.params[f"{p}.arc.b"], (-1, 1)))  # (n+1, 1)
        arc = nx.add(arc, nx.matmul(head_bias, nx.transpose_last(_ones_col(n, words.dtype))))

        # labels: for each label, dep U_l head^T -> (n, n+1)
        pieces = []
        L = len(self.labels)
        for ell in range(L):
            u = nx.gather_rows(self.params[f"{p}.label.u"], np.array([ell]))
            u = nx.reshape(u, (self.proj_dim, self.proj_dim))
            bilinear = nx.matmul(dep, nx.matmul(u, nx.transpose_last(head)))  # (n, n+1)
            wd = nx.reshape(nx.gather_rows(self.params[f"{p}.label.wdep"], np.array([ell])),
                            (-1, 1))
            wh = nx.reshape(nx.gather_rows(self.params[f"{p}.label.whead"], np.array([ell])),
                            (-1, 1))
            dep_term = nx.matmul(nx.matmul(dep, wd),
                                 nx.transpose_last(_ones_col(n + 1, words.dtype)))  # (n, n+1)
            head_term = nx.matmul(_ones_col(n, words.dtype),
                                  nx.transpose_last(nx.matmul(head, wh)))  # (n, n+1)
            score = nx.add(nx.add(bilinear, dep_term), head_term)
            pieces.append(nx.reshape(score, (n, n + 1, 1)))
        label = nx.concat(pieces, axis=2)
        label = nx.add(label, self.params[f"{p}.label.b"])
        return arc, label

    def loss(self, words, gold_heads, gold_labels):
        """Cross-entropy over heads per dependent plus labels at gold arcs."""
        n = words.shape[0]
        arc, label = self.scores(words)
        arc_logits = nx.transpose_last(arc)  # (n, n+1): per dependent over heads
        heads = np.asarray(gold_heads, dtype=np.int64)
        arc_loss = nx.cross_entropy(arc_logits, heads)
        flat = nx.reshape(label, (n * (n + 1), len(self.labels)))
        rows = np.arange(n) * (n + 1) + heads
        label_logits = nx.gather_rows(flat, rows)
        label_loss = nx.cross_entropy(label_logits, np.asarray(gold_labels, dtype=np.int64))
        return nx.add(arc_loss, label_loss)

    def predict(self, words):
        """Decode heads with Edmonds, then labels conditioned on those heads."""
        from .edmonds import decode_tree

        n = words.shape[0]
        arc, label = self.scores(words)
        heads = decode_tree(arc.data)
        flat = label.data.reshape(n * (n + 1), len(self.labels))
        rows = np.arange(n) * (n + 1) + np.asarray(heads)
        labels = [int(np.argmax(flat[r])) for r in rows]
        return heads, labels
