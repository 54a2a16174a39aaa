"""RGBA8 rasters, the asset store, PNG I/O and integer source-over compositing."""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(eq=False)
class Raster:
    """Row-major RGBA8 image; ``pixels`` has shape (height, width, 4)."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.dtype != np.uint8 or px.shape != (self.height, self.width, 4):
            raise ValueError(f"pixel buffer {px.shape}/{px.dtype} does not match {self.width}x{self.height} RGBA8")
        self.pixels = px

    @classmethod
    def blank(cls, width: int, height: int, color=(0, 0, 0, 0)) -> "Raster":
        px = np.empty((height, width, 4), dtype=np.uint8)
        px[:] = np.asarray(color, dtype=np.uint8)
        return cls(width, height, px)

    @classmethod
    def from_array(cls, arr) -> "Raster":
        a = np.asarray(arr)
        if a.ndim == 2:
            a = np.stack([a, a, a, np.full_like(a, 255)], axis=-1)
        elif a.shape[2] == 3:
            a = np.concatenate([a, np.full(a.shape[:2] + (1,), 255, dtype=a.dtype)], axis=-1)
        a = np.ascontiguousarray(a, dtype=np.uint8)
        return cls(a.shape[1], a.shape[0], a)

    @classmethod
    def from_bytes(cls, width: int, height: int, data: bytes) -> "Raster":
        return cls(width, height, np.frombuffer(data, dtype=np.uint8).reshape(height, width, 4).copy())

    def to_bytes(self) -> bytes:
        return self.pixels.tobytes()

    def copy(self) -> "Raster":
        return Raster(self.width, self.height, self.pixels.copy())

    def sha256(self) -> str:
        h = hashlib.sha256(f"{self.width}x{self.height}:".encode())
        h.update(self.pixels.tobytes())
        return h.hexdigest()

    def __eq__(self, other) -> bool:
        return (isinstance(other, Raster) and self.width == other.width and self.height == other.height
                and np.array_equal(self.pixels, other.pixels))

    def __repr__(self) -> str:
        return f"Raster({self.width}x{self.height}, sha256={self.sha256()[:12]})"


def asset_id_for(raster: Raster) -> str:
    """Content address of a raster."""
    return "img-" + raster.sha256()[:16]


class AssetStore(dict):
    """``asset_id -> Raster`` mapping."""

    def add(self, raster: Raster) -> str:
        aid = asset_id_for(raster)
        self[aid] = raster
        return aid

    @classmethod
    def load_dir(cls, directory) -> "AssetStore":
        store = cls()
        d = Path(directory)
        if d.is_dir():
            for p in sorted(d.glob("*.png")):
                store[p.stem] = read_png(p)
        return store

    def save_dir(self, directory) -> None:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        for aid in sorted(self):
            write_png(self[aid], d / f"{aid}.png")


def read_png(path) -> Raster:
    from PIL import Image

    with Image.open(path) as im:
        return Raster.from_array(np.asarray(im.convert("RGBA")))


def write_png(raster: Raster, path) -> None:
    from PIL import Image

    Image.fromarray(raster.pixels, "RGBA").save(path, format="PNG", optimize=False)


def round_half_up(v: float) -> int:
    return int(math.floor(v + 0.5))


def center_span(start: float, length: float) -> tuple[int, int]:
    """Pixel indices whose centres fall in ``[start, start + length)``."""
    return math.ceil(start - 0.5), math.ceil(start + length - 0.5)


def intersect(a, b):
    """Intersection of integer rectangles ``(x0, y0, x1, y1)``; may be empty."""
    return (max(a[0], b[0]), max(a[1], b[1]), min(a[2], b[2]), min(a[3], b[3]))


def rect_empty(r) -> bool:
    return r[2] <= r[0] or r[3] <= r[1]


def composite(dst: np.ndarray, src: np.ndarray) -> None:
    """Non-premultiplied source-over of ``src`` onto ``dst`` in place.

    Both are (..., 4) uint8. Integer arithmetic; every division rounds half up.
    """
    sa = src[..., 3].astype(np.int64)
    if not sa.any():
        return
    opaque = sa == 255
    if opaque.all():
        dst[...] = src
        return
    da = dst[..., 3].astype(np.int64)
    da2 = da * (255 - sa)
    num_a = sa * 255 + da2
    out = np.zeros(src.shape, dtype=np.int64)
    nz = num_a > 0
    out[..., 3] = (2 * num_a + 255) // 510
    q = np.where(nz, num_a, 1)
    for c in range(3):
        p = src[..., c].astype(np.int64) * sa * 255 + dst[..., c].astype(np.int64) * da2
        out[..., c] = np.where(nz, (2 * p + q) // (2 * q), 0)
    out[opaque] = src[opaque]
    dst[...] = out.astype(np.uint8)


def composite_color(dst: np.ndarray, mask: np.ndarray, color) -> None:
    """Source-over a flat colour onto ``dst`` wherever ``mask`` is set."""
    if not mask.any():
        return
    rgba = np.asarray(tuple(color), dtype=np.uint8)
    if rgba[3] == 0:
        return
    sel = dst[mask]
    src = np.broadcast_to(rgba, sel.shape)
    composite(sel, src)
    dst[mask] = sel
