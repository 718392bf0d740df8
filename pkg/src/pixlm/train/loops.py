"""Pretraining and fine-tuning loops.

Both loops are fully determined by (seed, config, data): per-step RNG
streams are spawned from a SeedSequence so masks, dropout and batch order
never depend on wall clock or dict iteration order.
"""

import copy
import csv
from dataclasses import dataclass, field, replace

import numpy as np

from .. import numerics as nx
from ..errors import ExhaustedCorpusError, NonFiniteGradError
from ..masking import MaskSpec, mask_for_sequence
from ..model import PixelModel
from ..render import RenderConfig, render_text
from ..data.sampling import mix_batches
from .early_stopping import EarlyStopper
from .optim import AdamW, OptimConfig, lr_at
from . import tasks


@dataclass
class Trace:
    """Loss/metric trace, serializable as step,split,metric_name,value CSV."""

    rows: list = field(default_factory=list)

    def log(self, step, split, metric_name, value):
        self.rows.append((step, split, metric_name, float(value)))

    def values(self, metric_name, split=None):
        return [v for s, sp, m, v in self.rows
                if m == metric_name and (split is None or sp == split)]

    def save(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "split", "metric_name", "value"])
            writer.writerows(self.rows)


@dataclass
class PretrainResult:
    model: PixelModel
    trace: Trace
    skipped_steps: int


def pretrain(model, corpora, mask_spec=None, optim_cfg=None, steps=300,
             batch_size=8, render_cfg=None, seed=0, trace_path=None):
    """Masked-autoencoder pretraining over language-mixed batches.

    `corpora` maps language codes to lists of CorpusRecord. Rendering is
    cached per record; every step draws the next mixed batch (re-mixing each
    epoch with a derived seed), samples one span mask per sample, and
    averages the reconstruction losses.
    """
    mask_spec = mask_spec or MaskSpec()
    render_cfg = render_cfg or RenderConfig()
    optim_cfg = optim_cfg or OptimConfig(peak_lr=1.5e-3, total_steps=steps,
                                         warmup_steps=min(100, max(steps // 10, 1)))
    rendered = {lang: [render_text(rec.text, render_cfg) for rec in recs]
                for lang, recs in corpora.items()}

    optimizer = AdamW(model.parameters(), optim_cfg)
    trace = Trace()
    seq_root = np.random.SeedSequence(seed)
    step = 0
    epoch = 0
    batches = mix_batches(rendered, batch_size, seed)
    while step < steps:
        try:
            batch = next(batches)
        except (StopIteration, ExhaustedCorpusError):
            # epoch finished (unequal corpora end it early); re-mix and go on
            epoch += 1
            batches = mix_batches(rendered, batch_size, seed + epoch)
            continue
        step_rng = np.random.default_rng(seq_root.spawn(1)[0])
        with nx.Tape():
            losses = []
            for seq in batch:
                mask = mask_for_sequence(seq, mask_spec, step_rng)
                losses.append(model.forward_mae(seq, mask, training=True, rng=step_rng))
            total = losses[0]
            for extra in losses[1:]:
                total = nx.add(total, extra)
            loss = nx.scale(total, 1.0 / len(losses))
            nx.backward(loss, params=model.parameters().values())
        trace.log(step, "train", "mae_loss", loss.item())
        try:
            optimizer.step(lr_at(min(step + 1, optim_cfg.total_steps), optim_cfg))
        except NonFiniteGradError:
            pass  # counted by the optimizer; parameters and state untouched
        step += 1
    if trace_path:
        trace.save(trace_path)
    return PretrainResult(model=model, trace=trace, skipped_steps=optimizer.skipped)


@dataclass
class FinetuneConfig:
    """Fine-tuning protocol defaults per task.

    cls: batch 32, 256 patches, eval per epoch, patience 20.
    udp/ner: batch 64, 256/196 patches, eval every 500 steps, patience 5.
    """

    task: str = "cls"
    lr: float = 5e-5
    lr_grid: tuple = (1e-5, 3e-5, 5e-5, 7e-5, 9e-5)
    max_steps: int = 15000
    batch_size: int = 32
    max_patches: int = 256
    eval_every: int | None = None  # None = per epoch
    patience: int = 20
    threshold: float = 0.0
    warmup_steps: int = 100
    dropout: float = 0.1
    proj_dim: int = 128
    seed: int = 0

    @classmethod
    def for_task(cls, task, **overrides):
        defaults = {
            "cls": dict(task="cls", batch_size=32, max_patches=256,
                        eval_every=None, patience=20),
            "udp": dict(task="udp", batch_size=64, max_patches=256,
                        eval_every=500, patience=5),
            "ner": dict(task="ner", batch_size=64, max_patches=196,
                        eval_every=500, patience=5),
        }[task]
        defaults.update(overrides)
        return cls(**defaults)


@dataclass
class FinetuneResult:
    model: PixelModel
    head: object
    trace: Trace
    best_metric: float
    best_step: int
    label_set: list


def finetune(model, train_data, val_data, cfg, trace_path=None):
    """Fine-tune encoder plus task head with early stopping.

    Returns the best-by-validation snapshot. The task adapter renders each
    example once up front; examples whose words do not fit the patch budget
    are dropped (word-aligned heads need complete alignment maps).
    """
    task = tasks.get_task(cfg.task)
    render_cfg = replace(RenderConfig(), max_patches=cfg.max_patches)
    label_set = task.label_set(train_data)
    train_ex = task.prepare(train_data, label_set, render_cfg)
    val_ex = task.prepare(val_data, label_set, render_cfg)
    if not train_ex:
        raise ValueError("no usable training examples after rendering")

    rng = np.random.default_rng(cfg.seed)
    head = task.build_head(model.config.hidden_dim, label_set, cfg, rng)
    params = dict(model.parameters())
    params.update(head.params)
    optim_cfg = OptimConfig(peak_lr=cfg.lr, total_steps=cfg.max_steps,
                            warmup_steps=min(cfg.warmup_steps, cfg.max_steps))
    optimizer = AdamW(params, optim_cfg)
    stopper = EarlyStopper(patience=cfg.patience, threshold=cfg.threshold)
    trace = Trace()
    seq_root = np.random.SeedSequence(cfg.seed + 1)

    steps_per_epoch = max(1, (len(train_ex) + cfg.batch_size - 1) // cfg.batch_size)
    eval_every = cfg.eval_every or steps_per_epoch

    best = {name: p.data.copy() for name, p in params.items()}
    best_metric = float("-inf")
    best_step = -1

    step = 0
    order = rng.permutation(len(train_ex))
    cursor = 0
    while step < cfg.max_steps:
        if cursor >= len(order):
            order = rng.permutation(len(train_ex))
            cursor = 0
        idx = order[cursor:cursor + cfg.batch_size]
        cursor += cfg.batch_size
        step_rng = np.random.default_rng(seq_root.spawn(1)[0])

        with nx.Tape():
            losses = [task.example_loss(model, head, train_ex[i], training=True,
                                        rng=step_rng) for i in idx]
            total = losses[0]
            for extra in losses[1:]:
                total = nx.add(total, extra)
            loss = nx.scale(total, 1.0 / len(losses))
            nx.backward(loss, params=params.values())
        trace.log(step, "train", "loss", loss.item())
        try:
            optimizer.step(lr_at(min(step + 1, optim_cfg.total_steps), optim_cfg))
        except NonFiniteGradError:
            pass
        step += 1

        if step % eval_every == 0 or step == cfg.max_steps:
            metric = task.evaluate(model, head, val_ex, label_set)
            trace.log(step, "val", task.metric_name, metric)
            if stopper.update(metric, step):
                best = {name: p.data.copy() for name, p in params.items()}
                best_metric = metric
                best_step = step
            if stopper.should_stop:
                break

    for name, p in params.items():
        p.data = best[name]
    if trace_path:
        trace.save(trace_path)
    return FinetuneResult(model=model, head=head, trace=trace,
                          best_metric=best_metric, best_step=best_step,
                          label_set=label_set)


def finetune_grid(model_factory, train_data, val_data, cfg, lrs=None):
    """Sweep the learning-rate grid; best validation metric wins, ties to
    the smaller lr."""
    lrs = sorted(lrs if lrs is not None else cfg.lr_grid)
    best_result = None
    best_lr = None
    for lr in lrs:
        result = finetune(model_factory(), train_data, val_data, replace(cfg, lr=lr))
        if best_result is None or result.best_metric > best_result.best_metric:
            best_result = result
            best_lr = lr
    return best_result, best_lr
