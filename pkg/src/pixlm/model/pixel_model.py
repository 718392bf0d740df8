"""Masked-autoencoder transformer over rendered text patches.

The encoder consumes a CLS token plus the visible patches only; a smaller
decoder scatters the encoded tokens back to their positions, fills masked
positions with a learned mask token, and reconstructs the pixel values of
the masked patches. The separator and padding patches never enter the
model: they are wire-format sentinels.
"""

from dataclasses import dataclass

import numpy as np

from .. import numerics as nx
from ..errors import ShapeError
from ..masking import apply_mask
from .config import ModelConfig


def _init_params(config, rng):
    """Parameter table; names are stable and serialize into checkpoints."""
    h, d = config.hidden_dim, config.decoder_dim
    p = {}

    def normal(name, shape, std=0.02):
        p[name] = nx.Tensor(rng.normal(0.0, std, size=shape).astype(np.float32),
                            requires_grad=True)

    def zeros(name, shape):
        p[name] = nx.Tensor(np.zeros(shape, dtype=np.float32), requires_grad=True)

    def ones(name, shape):
        p[name] = nx.Tensor(np.ones(shape, dtype=np.float32), requires_grad=True)

    normal("embed.proj.w", (config.patch_dim, h))
    zeros("embed.proj.b", (h,))
    normal("embed.cls", (h,))
    normal("embed.pos", (config.max_patches + 1, h))

    def block(prefix, dim, mlp_dim):
        ones(f"{prefix}.ln1.g", (dim,))
        zeros(f"{prefix}.ln1.b", (dim,))
        for n in ("q", "k", "v", "o"):
            normal(f"{prefix}.attn.w{n}", (dim, dim))
            zeros(f"{prefix}.attn.b{n}", (dim,))
        ones(f"{prefix}.ln2.g", (dim,))
        zeros(f"{prefix}.ln2.b", (dim,))
        normal(f"{prefix}.mlp.w1", (dim, mlp_dim))
        zeros(f"{prefix}.mlp.b1", (mlp_dim,))
        normal(f"{prefix}.mlp.w2", (mlp_dim, dim))
        zeros(f"{prefix}.mlp.b2", (dim,))

    for i in range(config.num_layers):
        block(f"enc.{i}", h, int(h * config.mlp_ratio))
    ones("enc.norm.g", (h,))
    zeros("enc.norm.b", (h,))

    normal("dec.embed.w", (h, d))
    zeros("dec.embed.b", (d,))
    normal("dec.mask_token", (d,))
    normal("dec.pos", (config.max_patches + 1, d))
    for i in range(config.decoder_layers):
        block(f"dec.{i}", d, int(d * config.mlp_ratio))
    ones("dec.norm.g", (d,))
    zeros("dec.norm.b", (d,))
    normal("dec.recon.w", (d, config.patch_dim))
    zeros("dec.recon.b", (config.patch_dim,))

    return p


@dataclass
class Encoding:
    """Per-layer hidden states for CLS + visible patches.

    hidden_states[0] is the embedding layer; hidden_states[-1] has the final
    encoder norm applied. Row 0 of each state is CLS; row r >= 1 corresponds
    to patch visible_indices[r - 1].
    """

    hidden_states: list
    visible_indices: np.ndarray

    @property
    def last(self):
        return self.hidden_states[-1]


class PixelModel:
    def __init__(self, config=None, seed=0, params=None):
        self.config = config or ModelConfig()
        self.params = params if params is not None else _init_params(
            self.config, np.random.default_rng(seed))

    def parameters(self):
        return self.params

    def zero_grad(self):
        for t in self.params.values():
            t.zero_grad()

    def astype(self, dtype):
        """Copy with parameters cast to dtype (float64 for gradient checks)."""
        cast = {k: nx.Tensor(v.data.astype(dtype), requires_grad=True)
                for k, v in self.params.items()}
        return PixelModel(self.config, params=cast)

    # forward pieces

    def _linear(self, x, prefix):
        return nx.add(nx.matmul(x, self.params[f"{prefix}.w"]), self.params[f"{prefix}.b"])

    def _block(self, x, prefix, num_heads, training, rng):
        p = self.params
        h = nx.layer_norm(x, p[f"{prefix}.ln1.g"], p[f"{prefix}.ln1.b"])
        attn = self._attention(h, prefix, num_heads, training, rng)
        x = nx.add(x, attn)
        h = nx.layer_norm(x, p[f"{prefix}.ln2.g"], p[f"{prefix}.ln2.b"])
        m = nx.gelu(nx.add(nx.matmul(h, p[f"{prefix}.mlp.w1"]), p[f"{prefix}.mlp.b1"]))
        m = nx.add(nx.matmul(m, p[f"{prefix}.mlp.w2"]), p[f"{prefix}.mlp.b2"])
        m = nx.dropout(m, self.config.dropout, rng, training)
        return nx.add(x, m)

    def _attention(self, x, prefix, num_heads, training, rng):
        p = self.params
        t, dim = x.shape
        hd = dim // num_heads
        q = nx.add(nx.matmul(x, p[f"{prefix}.attn.wq"]), p[f"{prefix}.attn.bq"])
        k = nx.add(nx.matmul(x, p[f"{prefix}.attn.wk"]), p[f"{prefix}.attn.bk"])
        v = nx.add(nx.matmul(x, p[f"{prefix}.attn.wv"]), p[f"{prefix}.attn.bv"])
        # (t, dim) -> (heads, t, head_dim)
        split = lambda z: nx.transpose(nx.reshape(z, (t, num_heads, hd)), (1, 0, 2))
        ctx = nx.attention(split(q), split(k), split(v))
        ctx = nx.reshape(nx.transpose(ctx, (1, 0, 2)), (t, dim))
        out = nx.add(nx.matmul(ctx, p[f"{prefix}.attn.wo"]), p[f"{prefix}.attn.bo"])
        return nx.dropout(out, self.config.dropout, rng, training)

    def _decoder_heads(self):
        cfg = self.config
        return cfg.num_heads if cfg.decoder_dim % cfg.num_heads == 0 else 1

    def embed_patches(self, seq):
        """Project patches and add position embeddings; row 0 is CLS."""
        cfg = self.config
        if seq.patch_size != cfg.patch_size:
            raise ShapeError(
                f"sequence patch_size {seq.patch_size} != model patch_size {cfg.patch_size}")
        if seq.num_patches > cfg.max_patches:
            raise ShapeError(
                f"sequence has {seq.num_patches} patches, model supports {cfg.max_patches}")
        p = self.params
        flat = nx.Tensor(seq.patch_vectors().astype(p["embed.proj.w"].dtype))
        tokens = self._linear(flat, "embed.proj")
        cls = nx.reshape(p["embed.cls"], (1, cfg.hidden_dim))
        tokens = nx.concat([cls, tokens], axis=0)
        pos = nx.gather_rows(p["embed.pos"], np.arange(seq.num_patches + 1))
        return nx.add(tokens, pos)

    def encode(self, tokens, visible_indices, training=False, rng=None):
        """Run the encoder over CLS + the visible patch tokens.

        Returns per-layer hidden states; layer 0 is the selected embeddings,
        the last layer carries the final encoder norm.
        """
        visible = np.asarray(visible_indices, dtype=np.int64)
        n_tokens = tokens.shape[0]
        if visible.size and (visible.min() < 0 or visible.max() >= n_tokens - 1):
            raise IndexError(f"visible index out of range for {n_tokens - 1} patches")
        rows = np.concatenate([[0], visible + 1])
        x = nx.gather_rows(tokens, rows)
        x = nx.dropout(x, self.config.dropout, rng, training)
        states = [x]
        p = self.params
        for i in range(self.config.num_layers):
            x = self._block(x, f"enc.{i}", self.config.num_heads, training, rng)
            states.append(x)
        states[-1] = nx.layer_norm(states[-1], p["enc.norm.g"], p["enc.norm.b"])
        return Encoding(hidden_states=states, visible_indices=visible)

    def reconstruct(self, encoding, masked_indices, training=False, rng=None):
        """Decode masked patch pixels; one row per index in masked_indices."""
        cfg = self.config
        masked = np.asarray(masked_indices, dtype=np.int64)
        if masked.size == 0:
            return nx.Tensor(np.zeros((0, cfg.patch_dim), dtype=np.float32))
        if np.intersect1d(masked, encoding.visible_indices).size:
            raise IndexError("masked indices overlap visible indices")
        if masked.min() < 0 or masked.max() >= cfg.max_patches:
            raise IndexError("masked index out of range")
        p = self.params

        enc_tokens = self._linear(encoding.last, "dec.embed")
        # canvas rows: CLS, then visible and masked patch positions in order
        positions = np.concatenate([encoding.visible_indices, masked])
        order = np.argsort(positions, kind="stable")
        n_vis = encoding.visible_indices.size

        mask_tok = nx.reshape(p["dec.mask_token"], (1, cfg.decoder_dim))
        ones_col = nx.Tensor(np.ones((masked.size, 1), dtype=enc_tokens.dtype))
        mask_rows = nx.matmul(ones_col, mask_tok)
        body = nx.concat([self._drop_cls(enc_tokens), mask_rows], axis=0)
        body = nx.gather_rows(body, order)
        cls_row = nx.gather_rows(enc_tokens, np.array([0]))
        x = nx.concat([cls_row, body], axis=0)

        pos_rows = np.concatenate([[0], positions[order] + 1])
        x = nx.add(x, nx.gather_rows(p["dec.pos"], pos_rows))

        for i in range(cfg.decoder_layers):
            x = self._block(x, f"dec.{i}", self._decoder_heads(), training, rng)
        x = nx.layer_norm(x, p["dec.norm.g"], p["dec.norm.b"])
        pred = self._linear(x, "dec.recon")

        # rows of pred: 0 = CLS, then sorted positions; pick the masked ones
        sorted_positions = positions[order]
        row_of = {int(pos): r + 1 for r, pos in enumerate(sorted_positions)}
        take = np.array([row_of[int(m)] for m in masked], dtype=np.int64)
        return nx.gather_rows(pred, take)

    def _drop_cls(self, x):
        return nx.gather_rows(x, np.arange(1, x.shape[0]))

    def mae_loss(self, pred, seq, mask):
        """Mean squared error over masked patches only.

        With norm_pix_loss the target patch is normalized to zero mean and
        unit variance first; zero-variance patches (all-black or all-white
        runs are common in rendered text) fall back to raw pixel targets.
        """
        cfg = self.config
        masked = np.flatnonzero(mask.bits)
        if pred.shape[0] != masked.size:
            raise ShapeError(f"pred has {pred.shape[0]} rows for {masked.size} masked patches")
        if masked.size == 0:
            return nx.sum_(pred)  # zero loss, still recorded on the tape
        target = seq.patch_vectors()[masked].astype(np.float64 if pred.dtype == np.float64
                                                    else np.float32)
        if cfg.norm_pix_loss and masked.size:
            mu = target.mean(axis=1, keepdims=True)
            var = target.var(axis=1, keepdims=True)
            degenerate = var[:, 0] <= 1e-12
            norm = (target - mu) / np.sqrt(var + 1e-6)
            target = np.where(degenerate[:, None], target, norm)
        diff = nx.sub(pred, nx.Tensor(target))
        return nx.mean_(nx.square(diff))

    def forward_mae(self, seq, mask, training=False, rng=None):
        """Render-side convenience: embed, encode, reconstruct, loss."""
        visible, masked = apply_mask(seq, mask)
        tokens = self.embed_patches(seq)
        encoding = self.encode(tokens, visible, training=training, rng=rng)
        pred = self.reconstruct(encoding, masked, training=training, rng=rng)
        return self.mae_loss(pred, seq, mask)
