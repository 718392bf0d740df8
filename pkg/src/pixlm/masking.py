"""Span masks over text patches for masked-autoencoding pretraining.

Masks cover exactly floor(ratio * num_text_patches) positions, placed as
spans of at most max_span consecutive patches with min_gap unmasked patches
between spans. The default min_gap of 1 keeps spans from merging into runs
longer than max_span. The separator and padding are never masked.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleMaskError, LengthMismatchError


@dataclass(frozen=True)
class MaskSpec:
    ratio: float = 0.25
    max_span: int = 6
    min_gap: int = 1

    def __post_init__(self):
        if not 0.0 <= self.ratio <= 1.0:
            raise ValueError(f"ratio must be in [0, 1], got {self.ratio}")
        if self.max_span < 1:
            raise ValueError(f"max_span must be >= 1, got {self.max_span}")
        if self.min_gap < 0:
            raise ValueError(f"min_gap must be >= 0, got {self.min_gap}")


@dataclass
class Mask:
    bits: np.ndarray  # bool per patch position

    @property
    def num_masked(self):
        return int(self.bits.sum())

    def padded_to(self, length):
        """Extend with unmasked positions to cover a full patch sequence."""
        if length < self.bits.size:
            raise LengthMismatchError(
                f"cannot pad mask of length {self.bits.size} down to {length}")
        out = np.zeros(length, dtype=bool)
        out[:self.bits.size] = self.bits
        return Mask(out)


def _eligible_starts(csum, length, span, min_gap):
    """Start positions where a span of `span` keeps min_gap from masked runs.

    `csum` is the running count of masked bits (length+1 entries); a start is
    eligible when the window [p-min_gap, p+span+min_gap) holds no masked bit.
    """
    if span > length:
        return np.empty(0, dtype=np.int64)
    p = np.arange(length - span + 1)
    lo = np.maximum(p - min_gap, 0)
    hi = np.minimum(p + span + min_gap, length)
    return p[csum[hi] - csum[lo] == 0]


def generate_span_mask(num_text_patches, spec, rng):
    """Sample a span mask hitting the target count exactly.

    Span lengths are uniform over {1..max_span} and starts uniform over the
    eligible positions for that length; when a sampled length has no eligible
    start the largest shorter feasible length is used so placement always
    progresses. The final span is truncated to land exactly on the target.
    """
    length = int(num_text_patches)
    if length < 0:
        raise ValueError("num_text_patches must be >= 0")
    bits = np.zeros(length, dtype=bool)
    csum = np.zeros(length + 1, dtype=np.int64)
    target = int(np.floor(spec.ratio * length))
    placed = 0
    while placed < target:
        span = int(rng.integers(1, spec.max_span + 1))
        span = min(span, target - placed)
        starts = _eligible_starts(csum, length, span, spec.min_gap)
        while starts.size == 0 and span > 1:
            span -= 1
            starts = _eligible_starts(csum, length, span, spec.min_gap)
        if starts.size == 0:
            raise InfeasibleMaskError(
                f"cannot place {target - placed} more masked patches "
                f"(L={length}, min_gap={spec.min_gap})")
        start = int(starts[int(rng.integers(starts.size))])
        bits[start:start + span] = True
        csum[1:] = np.cumsum(bits)
        placed += span
    return Mask(bits)


def mask_for_sequence(seq, spec, rng):
    """Generate a span mask over a PatchSequence's text prefix, full length."""
    return generate_span_mask(seq.num_text_patches, spec, rng).padded_to(seq.num_patches)


def apply_mask(seq, mask):
    """Partition attended text positions into (visible, masked) index lists."""
    if mask.bits.size != seq.num_patches:
        raise LengthMismatchError(
            f"mask length {mask.bits.size} != sequence length {seq.num_patches}")
    num_text = seq.num_text_patches
    text_positions = np.arange(num_text)
    masked = text_positions[mask.bits[:num_text]]
    visible = text_positions[~mask.bits[:num_text]]
    return visible, masked
