from .embeddings import (SentenceEmbedding, embed_sentences, export_embeddings,
                         language_centroids, read_embeddings)
from .probing import ProbeConfig, ProbeDataset, probe_layerwise
from .retrieval import retrieval_recall_at_k

__all__ = [
    "ProbeConfig", "ProbeDataset", "SentenceEmbedding", "embed_sentences",
    "export_embeddings", "language_centroids", "probe_layerwise",
    "read_embeddings", "retrieval_recall_at_k",
]
