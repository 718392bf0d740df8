"""AdamW with bias correction and the linear warmup/decay schedule."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import NonFiniteGradError, RangeError


@dataclass
class OptimConfig:
    peak_lr: float = 5e-5
    total_steps: int = 15000
    warmup_steps: int = 100
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.0
    schedule: str = "linear-decay"

    def __post_init__(self):
        if not (0.0 < self.beta1 < 1.0 and 0.0 < self.beta2 < 1.0):
            raise ValueError("betas must lie in (0, 1)")
        if self.warmup_steps > self.total_steps:
            raise ValueError("warmup_steps must not exceed total_steps")


def lr_at(step, cfg):
    """Linear 0 -> peak over warmup, then linear peak -> 0 at total_steps."""
    if not 0 <= step <= cfg.total_steps:
        raise RangeError(f"step {step} outside [0, {cfg.total_steps}]")
    if cfg.warmup_steps and step <= cfg.warmup_steps:
        return cfg.peak_lr * step / cfg.warmup_steps
    denom = cfg.total_steps - cfg.warmup_steps
    if denom == 0:
        return cfg.peak_lr if step == cfg.warmup_steps else 0.0
    return cfg.peak_lr * (cfg.total_steps - step) / denom


def adamw_step(params, grads, state, lr, cfg):
    """One decoupled-weight-decay Adam update, in place.

    `state` maps parameter names to (m, v) moment buffers and is created on
    first use. Raises NonFiniteGradError before touching params or state if
    any gradient is non-finite, so a skipped step cannot corrupt training.
    """
    for name, g in grads.items():
        if not np.all(np.isfinite(g)):
            raise NonFiniteGradError(f"non-finite gradient for {name}")
    state["t"] = state.get("t", 0) + 1
    t = state["t"]
    bc1 = 1.0 - cfg.beta1 ** t
    bc2 = 1.0 - cfg.beta2 ** t
    for name, g in grads.items():
        p = params[name]
        if name not in state:
            state[name] = (np.zeros_like(p.data), np.zeros_like(p.data))
        m, v = state[name]
        m *= cfg.beta1
        m += (1.0 - cfg.beta1) * g
        v *= cfg.beta2
        v += (1.0 - cfg.beta2) * g * g
        mhat = m / bc1
        vhat = v / bc2
        p.data -= lr * (mhat / (np.sqrt(vhat) + cfg.eps) + cfg.weight_decay * p.data)


@dataclass
class AdamW:
    """Stateful wrapper tying adamw_step to a parameter table."""

    params: dict
    cfg: OptimConfig
    state: dict = field(default_factory=dict)
    skipped: int = 0

    def step(self, lr):
        grads = {}
        for name, p in self.params.items():
            if p.requires_grad:
                grads[name] = p.grad if p.grad is not None else np.zeros_like(p.data)
        try:
            adamw_step(self.params, grads, self.state, lr, self.cfg)
        except NonFiniteGradError:
            self.skipped += 1
            raise
        finally:
            for p in self.params.values():
                p.zero_grad()
