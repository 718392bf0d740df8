"""Layer-wise word probing over a frozen encoder.

Each word is rendered standalone, mean-pooled at the probed layer, and a
single affine classifier is trained on those fixed features with AdamW.
Linear probes keep capacity constant so accuracies are comparable across
layers.
"""

from dataclasses import dataclass, field

import numpy as np

from .. import numerics as nx
from ..errors import EmptyInputError
from ..heads.pooling import pool_words
from ..render import render_words
from ..train.optim import AdamW, OptimConfig, lr_at
from ..train.tasks import encode_finetune


@dataclass
class ProbeDataset:
    """(word, label) pairs with fixed train/val/test splits."""

    train: list
    val: list
    test: list
    task: str = ""
    lang: str = ""

    def label_set(self):
        labels = sorted({lab for split in (self.train, self.val, self.test)
                         for _, lab in split})
        if not labels:
            raise EmptyInputError("probe dataset has no labels")
        return labels


@dataclass
class ProbeConfig:
    epochs: int = 60
    batch_size: int = 64
    lr: float = 5e-3
    seed: int = 0


def _word_features(model, words, layer, render_cfg):
    feats = np.zeros((len(words), model.config.hidden_dim), dtype=np.float32)
    for i, word in enumerate(words):
        seq = render_words([word], render_cfg)
        enc = encode_finetune(model, seq)
        feats[i] = pool_words(enc.hidden_states[layer], seq.word_spans).data[0]
    return feats


def _train_probe(train_x, train_y, val_x, val_y, num_classes, cfg):
    rng = np.random.default_rng(cfg.seed)
    dim = train_x.shape[1]
    params = {
        "probe.w": nx.Tensor(rng.normal(0.0, 0.02, (dim, num_classes)).astype(np.float32),
                             requires_grad=True),
        "probe.b": nx.Tensor(np.zeros(num_classes, dtype=np.float32), requires_grad=True),
    }
    total_steps = max(1, cfg.epochs * ((len(train_y) + cfg.batch_size - 1) // cfg.batch_size))
    optim_cfg = OptimConfig(peak_lr=cfg.lr, total_steps=total_steps,
                            warmup_steps=min(10, total_steps))
    optimizer = AdamW(params, optim_cfg)

    def accuracy(x, y, w, b):
        logits = x @ w + b
        return float(np.mean(np.argmax(logits, axis=1) == y))

    best = (params["probe.w"].data.copy(), params["probe.b"].data.copy())
    best_acc = accuracy(val_x, val_y, *best)
    step = 0
    for _ in range(cfg.epochs):
        order = rng.permutation(len(train_y))
        for lo in range(0, len(order), cfg.batch_size):
            idx = order[lo:lo + cfg.batch_size]
            with nx.Tape():
                logits = nx.add(nx.matmul(nx.Tensor(train_x[idx]), params["probe.w"]),
                                params["probe.b"])
                loss = nx.cross_entropy(logits, train_y[idx])
                nx.backward(loss, params=params.values())
            step += 1
            optimizer.step(lr_at(min(step, total_steps), optim_cfg))
        acc = accuracy(val_x, val_y, params["probe.w"].data, params["probe.b"].data)
        if acc > best_acc:
            best_acc = acc
            best = (params["probe.w"].data.copy(), params["probe.b"].data.copy())
    return best


def probe_layerwise(model, dataset, layers, render_cfg=None, probe_cfg=None):
    """Test accuracy of a linear probe per layer; encoder weights frozen."""
    probe_cfg = probe_cfg or ProbeConfig()
    labels = dataset.label_set()
    index = {lab: i for i, lab in enumerate(labels)}

    def split_arrays(split, layer):
        words = [w for w, _ in split]
        y = np.array([index[lab] for _, lab in split], dtype=np.int64)
        return _word_features(model, words, layer, render_cfg), y

    results = {}
    for layer in layers:
        train_x, train_y = split_arrays(dataset.train, layer)
        val_x, val_y = split_arrays(dataset.val, layer)
        test_x, test_y = split_arrays(dataset.test, layer)
        w, b = _train_probe(train_x, train_y, val_x, val_y, len(labels), probe_cfg)
        pred = np.argmax(test_x @ w + b, axis=1)
        results[layer] = float(np.mean(pred == test_y))
    return results
