import numpy as np
import pytest

from pixlm.errors import InfeasibleMaskError, LengthMismatchError
from pixlm.masking import (Mask, MaskSpec, apply_mask, generate_span_mask,
                           mask_for_sequence)
from pixlm.render import RenderConfig, render_text


def max_run(bits):
    best = cur = 0
    for b in bits:
        cur = cur + 1 if b else 0
        best = max(best, cur)
    return best


def test_exact_count_529():
    mask = generate_span_mask(529, MaskSpec(), np.random.default_rng(7))
    assert mask.num_masked == 132  # floor(0.25 * 529)


def test_zero_ratio():
    for n in (0, 1, 17, 529):
        mask = generate_span_mask(n, MaskSpec(ratio=0.0), np.random.default_rng(0))
        assert mask.num_masked == 0
        assert not mask.bits.any()


def test_sweep_small_length():
    spec = MaskSpec(ratio=0.25, max_span=6)
    for seed in range(1000):
        mask = generate_span_mask(24, spec, np.random.default_rng(seed))
        assert mask.num_masked == 6
        assert max_run(mask.bits) <= 6


def test_exact_count_many_lengths():
    spec = MaskSpec()
    for L in (0, 1, 2, 3, 10, 100, 529):
        mask = generate_span_mask(L, spec, np.random.default_rng(3))
        assert mask.num_masked == int(np.floor(0.25 * L))


def test_seed_determinism():
    spec = MaskSpec()
    a = generate_span_mask(529, spec, np.random.default_rng(99))
    b = generate_span_mask(529, spec, np.random.default_rng(99))
    assert np.array_equal(a.bits, b.bits)


def test_min_gap_respected():
    spec = MaskSpec(ratio=0.4, max_span=3, min_gap=2)
    for seed in range(200):
        bits = generate_span_mask(40, spec, np.random.default_rng(seed)).bits
        runs = []
        start = None
        for i, b in enumerate(bits):
            if b and start is None:
                start = i
            elif not b and start is not None:
                runs.append((start, i))
                start = None
        if start is not None:
            runs.append((start, len(bits)))
        for (_, e1), (s2, _) in zip(runs, runs[1:]):
            assert s2 - e1 >= 2


def test_infeasible_raises():
    # max_span 4 cannot cover 5 of 5 positions with a gap between spans
    spec = MaskSpec(ratio=1.0, max_span=4, min_gap=1)
    with pytest.raises(InfeasibleMaskError):
        generate_span_mask(5, spec, np.random.default_rng(0))


def test_padding_and_separator_never_masked():
    cfg = RenderConfig(max_patches=32)
    seq = render_text("some words here", cfg)
    for seed in range(50):
        mask = mask_for_sequence(seq, MaskSpec(ratio=0.5), np.random.default_rng(seed))
        assert mask.bits.size == seq.num_patches
        assert not mask.bits[seq.separator_index:].any()


def test_apply_mask_partition_example():
    cfg = RenderConfig(max_patches=8)
    seq = render_text("ab cd ef gh", cfg)  # 4 text patches
    assert seq.num_text_patches == 4
    bits = np.zeros(8, dtype=bool)
    bits[1] = bits[2] = True
    visible, masked = apply_mask(seq, Mask(bits))
    assert visible.tolist() == [0, 3]
    assert masked.tolist() == [1, 2]


def test_apply_mask_all_false():
    cfg = RenderConfig(max_patches=8)
    seq = render_text("ab cd", cfg)
    visible, masked = apply_mask(seq, Mask(np.zeros(8, dtype=bool)))
    assert masked.size == 0
    assert visible.tolist() == list(range(seq.num_text_patches))


def test_apply_mask_length_mismatch():
    seq = render_text("ab", RenderConfig(max_patches=8))
    with pytest.raises(LengthMismatchError):
        apply_mask(seq, Mask(np.zeros(4, dtype=bool)))


def test_apply_mask_partition_property():
    cfg = RenderConfig(max_patches=24)
    rng = np.random.default_rng(5)
    for _ in range(50):
        n_words = int(rng.integers(1, 6))
        text = " ".join("w" * int(rng.integers(1, 7)) for _ in range(n_words))
        seq = render_text(text, cfg)
        mask = mask_for_sequence(seq, MaskSpec(ratio=float(rng.uniform(0, 1))), rng)
        visible, masked = apply_mask(seq, mask)
        merged = np.sort(np.concatenate([visible, masked]))
        assert np.array_equal(merged, np.arange(seq.num_text_patches))
        assert np.intersect1d(visible, masked).size == 0


def test_padded_to_shorter_raises():
    mask = generate_span_mask(10, MaskSpec(), np.random.default_rng(0))
    with pytest.raises(LengthMismatchError):
        mask.padded_to(5)


def test_spec_validation():
    with pytest.raises(ValueError):
        MaskSpec(ratio=1.5)
    with pytest.raises(ValueError):
        MaskSpec(max_span=0)
    with pytest.raises(ValueError):
        MaskSpec(min_gap=-1)
