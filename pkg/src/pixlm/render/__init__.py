from .font import BitmapFont, GlyphRasterizer, get_rasterizer, register_rasterizer
from .layout import PatchSequence, RenderConfig, render_text, render_words
from .patchfile import read_patch_file, write_patch_file

__all__ = [
    "BitmapFont", "GlyphRasterizer", "get_rasterizer", "register_rasterizer",
    "PatchSequence", "RenderConfig", "render_text", "render_words",
    "read_patch_file", "write_patch_file",
]
