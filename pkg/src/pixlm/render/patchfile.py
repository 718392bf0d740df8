"""Binary patch-tensor container.

Layout (all integers little-endian u32):
  magic "PXM4", version=1, num_sequences, then per sequence:
  num_patches, patch_size, attention mask as packed bits (LSB-first),
  pixels as little-endian f32 row-major, num_words, word spans as u32 pairs.

Source text is not part of the wire format; loaded sequences carry an empty
source_text.
"""

import struct

import numpy as np

from ..errors import FormatError
from .layout import PatchSequence, RenderConfig

MAGIC = b"PXM4"
VERSION = 1


def write_patch_file(path, sequences):
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(sequences)))
        for seq in sequences:
            n, ps = seq.num_patches, seq.patch_size
            fh.write(struct.pack("<II", n, ps))
            bits = np.packbits(seq.attention_mask.astype(np.uint8), bitorder="little")
            fh.write(bits.tobytes())
            fh.write(seq.pixels.astype("<f4").tobytes())
            fh.write(struct.pack("<I", len(seq.word_spans)))
            for start, end in seq.word_spans:
                fh.write(struct.pack("<II", start, end))


def read_patch_file(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != MAGIC:
        raise FormatError(f"bad magic {data[:4]!r}, expected {MAGIC!r}")
    pos = 4
    version, num_seqs = struct.unpack_from("<II", data, pos)
    pos += 8
    if version != VERSION:
        raise FormatError(f"unsupported patch file version {version}")
    sequences = []
    for _ in range(num_seqs):
        n, ps = struct.unpack_from("<II", data, pos)
        pos += 8
        nbytes = (n + 7) // 8
        mask = np.unpackbits(np.frombuffer(data, np.uint8, nbytes, pos),
                             count=n, bitorder="little").astype(bool)
        pos += nbytes
        pix_count = n * ps * ps
        pixels = np.frombuffer(data, "<f4", pix_count, pos).reshape(n, ps, ps).copy()
        pos += pix_count * 4
        (num_words,) = struct.unpack_from("<I", data, pos)
        pos += 4
        spans = []
        for _ in range(num_words):
            s, e = struct.unpack_from("<II", data, pos)
            pos += 8
            spans.append((s, e))
        cfg = RenderConfig(patch_size=ps, max_patches=n)
        sequences.append(PatchSequence(pixels=pixels, attention_mask=mask,
                                       word_spans=spans, source_text="", config=cfg))
    return sequences
