from .early_stopping import EarlyStopper
from .loops import (FinetuneConfig, FinetuneResult, PretrainResult, Trace,
                    finetune, finetune_grid, pretrain)
from .optim import AdamW, OptimConfig, adamw_step, lr_at
from .tasks import encode_finetune, get_task

__all__ = [
    "AdamW", "EarlyStopper", "FinetuneConfig", "FinetuneResult", "OptimConfig",
    "PretrainResult", "Trace", "adamw_step", "encode_finetune", "finetune",
    "finetune_grid", "get_task", "lr_at", "pretrain",
]
