"""Glyph rasterizer interface and the built-in fixed-advance bitmap font.

The built-in font exists so every test and smoke experiment runs without
external font files. Glyph bitmaps are procedurally derived from the
codepoint with a splitmix-style hash, which makes them deterministic,
visually distinct, and free of any bundled font data. Coverage is explicit:
ASCII plus small Cyrillic, Devanagari and CJK ranges; anything else renders
the replacement glyph (a hollow box). Narrow glyphs advance 8 px, CJK glyphs
advance a full 16 px so they occupy one patch each under the default layout.
"""

import numpy as np

_NARROW_RANGES = (
    (0x0020, 0x007E),  # printable ASCII
    (0x0400, 0x045F),  # Cyrillic sample
    (0x0900, 0x097F),  # Devanagari sample
)
_WIDE_RANGES = (
    (0x4E00, 0x4FFF),  # CJK unified sample
    (0x3000, 0x303F),  # CJK punctuation
)


class GlyphRasterizer:
    """Deterministic glyph backend.

    rasterize(text_run, width_px, height_px) returns a float grid in [0, 1]
    with 0 = ink and 1 = background; advance(text_run) reports the horizontal
    pixels the run consumes. Implementations must never fail on unsupported
    codepoints: they render the replacement glyph instead.
    """

    rasterizer_id = "abstract"

    def advance(self, text_run):
        raise NotImplementedError

    def rasterize(self, text_run, width_px, height_px):
        raise NotImplementedError


def _mix(x):
    # splitmix64 finalizer; stable across platforms
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return x ^ (x >> 31)


def _covered(cp):
    for lo, hi in _NARROW_RANGES + _WIDE_RANGES:
        if lo <= cp <= hi:
            return True
    return False


def _is_wide(cp):
    for lo, hi in _WIDE_RANGES:
        if lo <= cp <= hi:
            return True
    return False


class BitmapFont(GlyphRasterizer):
    """Fixed-advance bitmap font: 8x16 narrow glyphs, 16x16 wide glyphs."""

    rasterizer_id = "builtin-8x16"

    def __init__(self, glyph_height=16):
        self.glyph_height = glyph_height
        self._cache = {}

    def char_advance(self, ch):
        cp = ord(ch)
        return 16 if _is_wide(cp) else 8

    def advance(self, text_run):
        return sum(self.char_advance(ch) for ch in text_run)

    def _glyph(self, ch):
        bitmap = self._cache.get(ch)
        if bitmap is not None:
            return bitmap
        cp = ord(ch)
        w = self.char_advance(ch)
        h = self.glyph_height
        if not _covered(cp):
            bitmap = self._replacement(w, h)
        elif ch == " ":
            bitmap = np.zeros((h, w), dtype=bool)
        else:
            bitmap = np.zeros((h, w), dtype=bool)
            # interior pattern keyed on the codepoint, one margin pixel all round
            for r in range(2, h - 2):
                for c in range(1, w - 1):
                    bit = _mix(cp * 0x10001 + r * 131 + c)
                    bitmap[r, c] = (bit & 0xFF) < 110
            bitmap[1, 1:w - 1] = True  # top bar anchors the glyph box
        self._cache[ch] = bitmap
        return bitmap

    def _replacement(self, w, h):
        box = np.zeros((h, w), dtype=bool)
        box[2, 1:w - 1] = True
        box[h - 3, 1:w - 1] = True
        box[2:h - 2, 1] = True
        box[2:h - 2, w - 2] = True
        return box

    def rasterize(self, text_run, width_px, height_px):
        grid = np.ones((height_px, width_px), dtype=np.float32)
        x = 0
        for ch in text_run:
            adv = self.char_advance(ch)
            if x + adv > width_px:
                break
            glyph = self._glyph(ch)
            gh = min(glyph.shape[0], height_px)
            top = max((height_px - glyph.shape[0]) // 2, 0)
            grid[top:top + gh, x:x + adv][glyph[:gh]] = 0.0
            x += adv
        return grid


_REGISTRY = {}


def register_rasterizer(rasterizer):
    _REGISTRY[rasterizer.rasterizer_id] = rasterizer
    return rasterizer


def get_rasterizer(rasterizer_id):
    try:
        return _REGISTRY[rasterizer_id]
    except KeyError:
        raise KeyError(f"no rasterizer registered under {rasterizer_id!r}") from None


register_rasterizer(BitmapFont())
