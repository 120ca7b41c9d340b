"""Minimal deterministic PNG writer for 8-bit RGB images.

Only IHDR, IDAT and IEND are emitted: no time, gamma or text chunks, and a
fixed zlib level, so identical pixels always give identical bytes.
"""
from __future__ import annotations

import os
import struct
import zlib

import numpy as np

SIGNATURE = b"\x89PNG\r\n\x1a\n"
COMPRESSION_LEVEL = 6


def _chunk(kind: bytes, data: bytes) -> bytes:
    crc = zlib.crc32(data, zlib.crc32(kind)) & 0xFFFFFFFF
    return struct.pack(">I", len(data)) + kind + data + struct.pack(">I", crc)


def encode_png(image: np.ndarray) -> bytes:
    """Encode an ``(H, W, 3)`` uint8 array."""
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[2] != 3 or image.dtype != np.uint8:
        raise ValueError(f"expected an (H, W, 3) uint8 array, got {image.shape} {image.dtype}")
    height, width = image.shape[:2]
    if width == 0 or height == 0:
        raise ValueError("empty image")
    header = struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0)
    # filter type 0 (None) on every scanline
    raw = np.zeros((height, 1 + 3 * width), dtype=np.uint8)
    raw[:, 1:] = image.reshape(height, 3 * width)
    body = zlib.compress(raw.tobytes(), COMPRESSION_LEVEL)
    return SIGNATURE + _chunk(b"IHDR", header) + _chunk(b"IDAT", body) + _chunk(b"IEND", b"")


def write_png(image: np.ndarray, path) -> None:
    data = encode_png(image)
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise OSError(f"failed to write PNG {os.fspath(path)!r}: {exc}") from exc


def read_png(path) -> np.ndarray:
    """Read any PNG as an ``(H, W, 3)`` uint8 array."""
    from PIL import Image

    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8).copy()
