"""Model configuration."""

import json
from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class ModelConfig:
    hidden_dim: int = 192
    num_layers: int = 6
    num_heads: int = 3
    mlp_ratio: float = 4.0
    decoder_dim: int = 96
    decoder_layers: int = 2
    max_patches: int = 529
    patch_size: int = 16
    dropout: float = 0.1
    norm_pix_loss: bool = True

    def __post_init__(self):
        if self.hidden_dim % self.num_heads != 0:
            raise ValueError(
                f"hidden_dim {self.hidden_dim} not divisible by num_heads {self.num_heads}")
        if self.decoder_layers >= self.num_layers:
            raise ValueError("decoder must be lightweight: decoder_layers < num_layers")
        if self.num_layers < 1:
            raise ValueError("num_layers must be >= 1")

    @property
    def patch_dim(self):
        return self.patch_size * self.patch_size

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))
