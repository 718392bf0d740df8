"""Versioned binary checkpoint container.

Layout: magic "PXCK", u32 version, length-prefixed UTF-8 config document
(JSON), then named tensors, each as length-prefixed name, u32 rank, u32
extents, little-endian f32 data. The config document is free-form JSON so
model, head and render settings travel together.
"""

import json
import struct

import numpy as np

from ..errors import FormatError
from .. import numerics as nx

MAGIC = b"PXCK"
VERSION = 1


def save_checkpoint(path, config_doc, tensors):
    """Write a {name: Tensor-or-ndarray} table with a JSON config document."""
    payload = json.dumps(config_doc, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        fh.write(struct.pack("<I", len(payload)))
        fh.write(payload)
        for name in sorted(tensors):
            data = tensors[name]
            if isinstance(data, nx.Tensor):
                data = data.data
            arr = np.asarray(data, dtype="<f4")
            enc = name.encode("utf-8")
            fh.write(struct.pack("<I", len(enc)))
            fh.write(enc)
            fh.write(struct.pack("<I", arr.ndim))
            fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
            fh.write(arr.tobytes())


def load_checkpoint(path):
    """Return (config_doc, {name: float32 ndarray})."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != MAGIC:
        raise FormatError(f"bad checkpoint magic {data[:4]!r}, expected {MAGIC!r}")
    pos = 4
    (version,) = struct.unpack_from("<I", data, pos)
    pos += 4
    if version != VERSION:
        raise FormatError(f"unsupported checkpoint version {version}")
    (clen,) = struct.unpack_from("<I", data, pos)
    pos += 4
    config_doc = json.loads(data[pos:pos + clen].decode("utf-8"))
    pos += clen
    tensors = {}
    while pos < len(data):
        (nlen,) = struct.unpack_from("<I", data, pos)
        pos += 4
        name = data[pos:pos + nlen].decode("utf-8")
        pos += nlen
        (rank,) = struct.unpack_from("<I", data, pos)
        pos += 4
        shape = struct.unpack_from(f"<{rank}I", data, pos)
        pos += 4 * rank
        count = int(np.prod(shape)) if rank else 1
        tensors[name] = np.frombuffer(data, "<f4", count, pos).reshape(shape).copy()
        pos += count * 4
    return config_doc, tensors
