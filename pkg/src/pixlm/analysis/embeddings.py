"""Sentence embeddings, per-language centroids, and TSV export."""

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyGroupError, ZeroNormError
from ..render import render_text
from ..train.tasks import encode_finetune


@dataclass
class SentenceEmbedding:
    vector: np.ndarray   # unit L2 norm
    pooled: np.ndarray   # pre-normalization mean-pooled hidden state
    lang: str
    index: int
    layer: int


def embed_sentences(model, sentences, layer, render_cfg=None, langs=None):
    """Mean-pool attended non-CLS states at `layer`, then L2-normalize.

    `sentences` is a list of strings; `langs` optionally provides a language
    code per sentence for provenance. Masking is disabled: the encoder sees
    every text patch.
    """
    if not 0 <= layer <= model.config.num_layers:
        raise IndexError(f"layer {layer} outside [0, {model.config.num_layers}]")
    out = []
    for i, text in enumerate(sentences):
        seq = render_text(text, render_cfg)
        enc = encode_finetune(model, seq)
        state = enc.hidden_states[layer].data
        if state.shape[0] < 2:
            raise ZeroNormError(f"sentence {i} rendered to zero text patches")
        pooled = state[1:].mean(axis=0)
        norm = float(np.linalg.norm(pooled))
        if norm == 0.0:
            raise ZeroNormError(f"zero-norm embedding for sentence {i}")
        out.append(SentenceEmbedding(vector=pooled / norm, pooled=pooled,
                                     lang=langs[i] if langs else "und",
                                     index=i, layer=layer))
    return out


def language_centroids(embeddings):
    """Arithmetic mean of the pre-normalization vectors per language."""
    groups = {}
    for emb in embeddings:
        groups.setdefault(emb.lang, []).append(emb.pooled)
    if not groups:
        raise EmptyGroupError("no embeddings to average")
    return {lang: np.mean(vecs, axis=0) for lang, vecs in groups.items()}


def export_embeddings(embeddings, path):
    """TSV rows: lang, sentence_index, layer, then components (9 sig digits).

    A sidecar `<path>.meta` records the data row count.
    """
    with open(path, "w", encoding="utf-8") as fh:
        dim = embeddings[0].vector.size if embeddings else 0
        header = ["lang", "sentence_index", "layer"] + [f"v{i}" for i in range(dim)]
        fh.write("\t".join(header) + "\n")
        for emb in embeddings:
            comps = [f"{x:.9g}" for x in emb.vector]
            fh.write("\t".join([emb.lang, str(emb.index), str(emb.layer)] + comps) + "\n")
    with open(str(path) + ".meta", "w", encoding="utf-8") as fh:
        fh.write(f"rows\t{len(embeddings)}\n")
    return path


def read_embeddings(path):
    """Inverse of export_embeddings; returns SentenceEmbeddings with
    pooled == vector (normalization is not invertible)."""
    out = []
    with open(path, encoding="utf-8") as fh:
        next(fh)
        for line in fh:
            cols = line.rstrip("\n").split("\t")
            vec = np.array([float(x) for x in cols[3:]], dtype=np.float32)
            out.append(SentenceEmbedding(vector=vec, pooled=vec, lang=cols[0],
                                         index=int(cols[1]), layer=int(cols[2])))
    return out
