"""pixlm: a tokenizer-free pixel language-model toolkit.

Text is rendered into fixed-size grayscale patches, a masked-autoencoder
transformer is pretrained to reconstruct hidden patches, and task heads
(classification, biaffine dependency parsing, BIO tagging) attach in place
of the decoder for fine-tuning. Analysis utilities cover layer-wise word
probing, cross-lingual retrieval, and embedding export.
"""

from . import analysis, data, heads, masking, metrics, model, numerics, render, train
from .errors import PixlmError

__version__ = "0.1.0"

__all__ = ["analysis", "data", "heads", "masking", "metrics", "model",
           "numerics", "render", "train", "PixlmError", "__version__"]
