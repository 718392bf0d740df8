import json

import numpy as np

from .. import numerics as nx
from .checkpoint import load_checkpoint, save_checkpoint
from .config import ModelConfig
from .pixel_model import Encoding, PixelModel

__all__ = ["Encoding", "ModelConfig", "PixelModel",
           "load_checkpoint", "save_checkpoint", "save_model", "load_model"]


def save_model(path, model, extra_config=None, extra_tensors=None):
    """Checkpoint a PixelModel, optionally with head tensors and settings."""
    doc = {"model": json.loads(model.config.to_json())}
    if extra_config:
        doc.update(extra_config)
    tensors = dict(model.params)
    if extra_tensors:
        tensors.update(extra_tensors)
    save_checkpoint(path, doc, tensors)


def load_model(path):
    """Rebuild a PixelModel; returns (model, config_doc, leftover_tensors)."""
    doc, tensors = load_checkpoint(path)
    config = ModelConfig(**doc["model"])
    probe = PixelModel(config, seed=0)
    params = {}
    rest = {}
    for name, arr in tensors.items():
        if name in probe.params:
            if probe.params[name].shape != arr.shape:
                raise ValueError(f"checkpoint tensor {name} has shape {arr.shape}, "
                                 f"expected {probe.params[name].shape}")
            params[name] = nx.Tensor(np.ascontiguousarray(arr), requires_grad=True)
        else:
            rest[name] = arr
    missing = set(probe.params) - set(params)
    if missing:
        raise ValueError(f"checkpoint missing model tensors: {sorted(missing)[:5]}")
    return PixelModel(config, params=params), doc, rest
