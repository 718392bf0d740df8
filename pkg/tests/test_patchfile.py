import numpy as np
import pytest

from pixlm.errors import FormatError
from pixlm.render import (RenderConfig, read_patch_file, render_text,
                          write_patch_file)


def test_round_trip(tmp_path):
    cfg = RenderConfig(max_patches=16)
    seqs = [render_text(t, cfg) for t in ["hello world", "привіт", ""]]
    path = tmp_path / "t.pxm4"
    write_patch_file(path, seqs)
    loaded = read_patch_file(path)
    assert len(loaded) == len(seqs)
    for a, b in zip(seqs, loaded):
        assert np.array_equal(a.pixels, b.pixels)
        assert np.array_equal(a.attention_mask, b.attention_mask)
        assert a.word_spans == b.word_spans
        assert b.source_text == ""  # not part of the wire format


def test_magic_and_version(tmp_path):
    path = tmp_path / "bad.pxm4"
    path.write_bytes(b"NOPE" + b"\x00" * 16)
    with pytest.raises(FormatError):
        read_patch_file(path)
    good = tmp_path / "v9.pxm4"
    good.write_bytes(b"PXM4" + (9).to_bytes(4, "little") + (0).to_bytes(4, "little"))
    with pytest.raises(FormatError):
        read_patch_file(good)


def test_empty_file_zero_sequences(tmp_path):
    path = tmp_path / "zero.pxm4"
    write_patch_file(path, [])
    assert read_patch_file(path) == []
