"""Deterministic text-to-patch layout.

Characters pack left to right into the current patch while their combined
advance fits and the per-patch character budget is not exceeded. Every word
starts on a fresh patch, so word boundaries are patch boundaries and
token-level heads get exact alignment. One all-black separator patch follows
the text; the remainder is all-white padding with attention 0.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import CapacityError, EmptyWordError
from .font import get_rasterizer


@dataclass(frozen=True)
class RenderConfig:
    patch_size: int = 16
    max_patches: int = 529
    chars_per_patch: int = 2
    font_px: int = 16
    rasterizer_id: str = "builtin-8x16"

    def __post_init__(self):
        if self.max_patches < 2:
            raise CapacityError(
                f"max_patches={self.max_patches} leaves no room for text plus separator")
        if self.patch_size < 8:
            raise ValueError(f"patch_size must be >= 8, got {self.patch_size}")
        if self.chars_per_patch < 1:
            raise ValueError(f"chars_per_patch must be >= 1, got {self.chars_per_patch}")

    def rasterizer(self):
        return get_rasterizer(self.rasterizer_id)


@dataclass
class PatchSequence:
    """Rendered text as a fixed-length sequence of grayscale patches."""

    pixels: np.ndarray            # (max_patches, patch_size, patch_size) in [0, 1]
    attention_mask: np.ndarray    # bool, 1 = text or separator
    word_spans: list              # (start_patch, end_patch_exclusive) per surviving word
    source_text: str
    truncated_words: int = 0
    config: RenderConfig = field(default_factory=RenderConfig)

    @property
    def num_patches(self):
        return self.pixels.shape[0]

    @property
    def patch_size(self):
        return self.pixels.shape[1]

    @property
    def num_text_patches(self):
        # attended prefix minus the separator patch
        return int(self.attention_mask.sum()) - 1

    @property
    def separator_index(self):
        return self.num_text_patches

    def patch_vectors(self):
        """Patches flattened to (max_patches, patch_size**2) rows."""
        return self.pixels.reshape(self.num_patches, -1)


def _group_chars(word, config, rasterizer):
    """Split a word into per-patch character runs by glyph advance."""
    groups = []
    current = ""
    used = 0
    for ch in word:
        adv = rasterizer.advance(ch)
        if current and (used + adv > config.patch_size or len(current) >= config.chars_per_patch):
            groups.append(current)
            current, used = "", 0
        current += ch
        used += adv
    if current:
        groups.append(current)
    return groups


def _render_groups(words, config, source_text):
    rasterizer = config.rasterizer()
    ps = config.patch_size
    budget = config.max_patches - 1  # one slot reserved for the separator

    pixels = np.ones((config.max_patches, ps, ps), dtype=np.float32)
    attention = np.zeros(config.max_patches, dtype=bool)
    spans = []
    cursor = 0
    truncated = 0

    for i, word in enumerate(words):
        groups = _group_chars(word, config, rasterizer)
        if cursor + len(groups) > budget:
            # truncate at the last whole word that fit; drop the rest
            truncated = len(words) - i
            break
        start = cursor
        for run in groups:
            pixels[cursor] = rasterizer.rasterize(run, ps, ps)
            attention[cursor] = True
            cursor += 1
        spans.append((start, cursor))

    pixels[cursor] = 0.0  # separator: one all-black patch
    attention[cursor] = True

    return PatchSequence(pixels=pixels, attention_mask=attention, word_spans=spans,
                         source_text=source_text, truncated_words=truncated, config=config)


def render_text(text, config=None):
    """Render a string; words are segmented on whitespace."""
    config = config or RenderConfig()
    words = text.split()
    return _render_groups(words, config, text)


def render_words(words, config=None):
    """Render pre-tokenized words, one span per surviving word."""
    config = config or RenderConfig()
    for i, word in enumerate(words):
        if not word or any(ch.isspace() for ch in word):
            raise EmptyWordError(f"word {i} is empty or contains whitespace: {word!r}")
    return _render_groups(list(words), config, " ".join(words))
