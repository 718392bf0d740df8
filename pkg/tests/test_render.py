import numpy as np
import pytest

from pixlm.errors import CapacityError, EmptyWordError
from pixlm.render import (BitmapFont, RenderConfig, render_text, render_words)


def small_cfg(**kw):
    defaults = dict(max_patches=16)
    defaults.update(kw)
    return RenderConfig(**defaults)


def packing_oracle(word, patch_size=16, chars_per_patch=2):
    """Independent greedy packing simulation using the built-in advances."""
    font = BitmapFont()
    groups = 0
    used = 0
    count = 0
    for ch in word:
        adv = font.char_advance(ch)
        if count and (used + adv > patch_size or count >= chars_per_patch):
            groups += 1
            used, count = 0, 0
        used += adv
        count += 1
    return groups + (1 if count else 0)


def test_empty_text_default_config():
    seq = render_text("")
    assert seq.num_text_patches == 0
    assert seq.separator_index == 0
    assert np.all(seq.pixels[0] == 0.0)
    assert int(seq.attention_mask.sum()) == 1
    assert seq.word_spans == []
    assert np.all(seq.pixels[1:] == 1.0)
    assert seq.num_patches == 529


def test_two_short_words():
    seq = render_text("hi ok")
    # oracle: ceil(len/2) patches per word under the 8px fixed-advance font
    assert seq.word_spans == [(0, 1), (1, 2)]
    assert seq.separator_index == 2
    assert np.all(seq.pixels[2] == 0.0)


def test_long_word_truncated():
    seq = render_text("x" * 2000)
    assert seq.truncated_words == 1
    attended = int(seq.attention_mask.sum())
    assert attended <= 529
    assert np.all(seq.pixels[seq.separator_index] == 0.0)
    assert seq.attention_mask[seq.separator_index]


def test_truncation_against_packing_simulation():
    words = ["alpha", "beta", "gamma", "delta"] * 3
    cfg = small_cfg(max_patches=8)
    seq = render_words(words, cfg)
    # greedy oracle: words fit while cumulative patches <= budget
    budget = cfg.max_patches - 1
    fit = 0
    used = 0
    for w in words:
        need = packing_oracle(w)
        if used + need > budget:
            break
        used += need
        fit += 1
    assert len(seq.word_spans) == fit
    assert seq.truncated_words == len(words) - fit


def test_render_words_single_letter():
    seq = render_words(["a"])
    assert seq.word_spans == [(0, 1)]


def test_render_words_three_bigrams():
    seq = render_words(["ab", "cd", "ef"])
    assert seq.word_spans == [(0, 1), (1, 2), (2, 3)]


def test_render_words_empty_list_matches_empty_text():
    a = render_text("")
    b = render_words([])
    assert np.array_equal(a.pixels, b.pixels)
    assert np.array_equal(a.attention_mask, b.attention_mask)
    assert a.word_spans == b.word_spans


def test_empty_word_rejected():
    with pytest.raises(EmptyWordError):
        render_words([""])
    with pytest.raises(EmptyWordError):
        render_words(["a b"])


def test_capacity_error():
    with pytest.raises(CapacityError):
        RenderConfig(max_patches=1)


MULTISCRIPT = ["hello world", "привіт світ", "नमस्ते दुनिया", "你好 世界",
               "mixed список 你 123", "a", "", "punctuation, marks! (etc)"]


def test_determinism_byte_identical():
    for text in MULTISCRIPT:
        a = render_text(text, small_cfg())
        b = render_text(text, small_cfg())
        assert a.pixels.tobytes() == b.pixels.tobytes()
        assert np.array_equal(a.attention_mask, b.attention_mask)
        assert a.word_spans == b.word_spans


def test_alignment_soundness():
    for text in MULTISCRIPT:
        seq = render_text(text, small_cfg())
        sep = seq.separator_index
        covered = []
        prev_end = 0
        for start, end in seq.word_spans:
            assert start == prev_end  # spans partition the text prefix
            assert end <= sep
            covered.extend(range(start, end))
            prev_end = end
        assert prev_end == sep
        assert covered == sorted(set(covered))


def test_render_text_matches_render_words():
    words = ["alpha", "бета", "c3", "你好"]
    a = render_text(" ".join(words), small_cfg())
    b = render_words(words, small_cfg())
    assert a.word_spans == b.word_spans
    assert np.array_equal(a.pixels, b.pixels)


def test_monotone_truncation():
    words = [f"word{i}" for i in range(30)]
    cfg = small_cfg(max_patches=24)
    full = render_text(" ".join(words), cfg)
    for cut in (1, 5, 10, 20):
        prefix = render_text(" ".join(words[:cut]), cfg)
        k = len(prefix.word_spans)
        assert prefix.word_spans == full.word_spans[:k] or k == len(full.word_spans)


def test_pixel_range_and_attention_prefix():
    for text in MULTISCRIPT:
        seq = render_text(text, small_cfg())
        assert seq.pixels.min() >= 0.0 and seq.pixels.max() <= 1.0
        mask = seq.attention_mask.astype(int)
        # prefix of ones followed by zeros
        assert np.all(np.diff(mask) <= 0)


def test_cjk_one_glyph_per_patch():
    seq = render_words(["你好吗"])
    assert seq.word_spans == [(0, 3)]


def test_wide_then_narrow_advance_packing():
    # one CJK glyph fills a patch; two ASCII letters share one
    seq = render_words(["你ab"])
    assert seq.word_spans == [(0, 2)]


def test_unsupported_codepoint_renders_replacement():
    font = BitmapFont()
    grid = font.rasterize("￿", 8, 16)
    assert grid.min() == 0.0  # replacement glyph has ink, never fails


def test_custom_rasterizer_round_trip():
    from pixlm.render import get_rasterizer, register_rasterizer

    class FatFont(BitmapFont):
        rasterizer_id = "test-fat"

        def char_advance(self, ch):
            return 16

    register_rasterizer(FatFont())
    cfg = RenderConfig(max_patches=16, rasterizer_id="test-fat")
    seq = render_words(["abc"], cfg)
    assert seq.word_spans == [(0, 3)]  # 16px advance: one char per patch
    assert get_rasterizer("test-fat").rasterizer_id == "test-fat"
