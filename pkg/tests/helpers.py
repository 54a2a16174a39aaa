"""Seeded generators shared by the tests."""
from __future__ import annotations

import os
import random
from pathlib import Path

import numpy as np

from layerforge.model import (
    AssetRef, BBox, Color, DesignDocument, FrameLayer, GenerationPlaceholder, GraphicLayer, GroupLayer,
    HAlign, ImageLayer, TextLayer, VAlign, VectorGraphic, VectorPath,
)
from layerforge.render import Raster

GOLDEN = Path(__file__).parent / "golden"
UPDATE = os.environ.get("LAYERFORGE_UPDATE_GOLDEN") == "1"

TEXT_ALPHABET = (
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
    "   .,!?%&'-_/:;()[]{}" '<|>\\"=#' "\n\t"
    "你好世界设计海报ÄéßΩ→★"
)


def golden_check(name: str, actual: str) -> None:
    path = GOLDEN / name
    if UPDATE or not path.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(actual, encoding="utf-8")
    assert path.read_text(encoding="utf-8") == actual, f"golden mismatch: {name}"


def grid(rng: random.Random, lo: float, hi: float) -> float:
    """Random number on the 0.01 grid in [lo, hi]."""
    v = rng.randint(int(round(lo * 100)), int(round(hi * 100))) / 100
    return int(v) if v == int(v) and rng.random() < 0.5 else v


def rand_color(rng: random.Random, opaque: bool = False) -> Color:
    a = 255 if opaque or rng.random() < 0.6 else rng.randrange(256)
    return Color(rng.randrange(256), rng.randrange(256), rng.randrange(256), a)


def rand_text(rng: random.Random, lo: int = 1, hi: int = 24) -> str:
    return "".join(rng.choice(TEXT_ALPHABET) for _ in range(rng.randint(lo, hi)))


def rand_bbox(rng: random.Random, w: float, h: float) -> BBox:
    return BBox(grid(rng, -w * 0.1, w * 0.9), grid(rng, -h * 0.1, h * 0.9),
                grid(rng, 0.01, max(w, 1)), grid(rng, 0.01, max(h, 1)))


def rand_path(rng: random.Random, vw: int, vh: int) -> VectorPath:
    nodes = []
    for _ in range(rng.randint(3, 7)):
        if rng.random() < 0.3:
            nodes.append(tuple(grid(rng, 0, vw if i % 2 == 0 else vh) for i in range(6)))
        else:
            nodes.append((grid(rng, 0, vw), grid(rng, 0, vh)))
    return VectorPath(rand_color(rng), tuple(nodes))


def random_document(rng: random.Random, max_depth: int = 3, size: tuple = (16, 1024)) -> DesignDocument:
    """A valid document with all layer kinds; numbers sit on the 0.01 grid."""
    W, H = rng.randint(*size), rng.randint(*size)
    counter = [0]
    custom = [0]

    def ident(index: int) -> str:
        if rng.random() < 0.2:
            custom[0] += 1
            return f"id {custom[0]} \"q\""
        return f"L{index}"

    def name():
        return rand_text(rng, 0, 8) if rng.random() < 0.2 else None

    def make(depth: int, pw: float, ph: float):
        index = counter[0]
        counter[0] += 1
        kinds = ["graphic", "text", "image"] + (["frame", "group"] if depth < max_depth else [])
        kind = rng.choice(kinds)
        b = rand_bbox(rng, pw, ph)
        lid = ident(index)
        if kind in ("frame", "group"):
            kids = tuple(make(depth + 1, b.w, b.h) for _ in range(rng.randint(0, 3)))
            if kind == "frame":
                return FrameLayer(lid, b, kids, rand_color(rng) if rng.random() < 0.7 else None, name())
            return GroupLayer(lid, b, kids, name())
        if kind == "graphic":
            vw, vh = rng.randint(1, 300), rng.randint(1, 300)
            paths = tuple(rand_path(rng, vw, vh) for _ in range(rng.randint(0, 3)))
            return GraphicLayer(lid, b, VectorGraphic(vw, vh, paths), name())
        if kind == "text":
            return TextLayer(lid, b, rand_text(rng), font_size=grid(rng, 1, 96),
                             font_tag=rng.choice(["sans", "serif", "mono", "dis\"play", "x y"]),
                             color=rand_color(rng), h_align=rng.choice(list(HAlign)),
                             v_align=rng.choice(list(VAlign)), name=name())
        src = GenerationPlaceholder() if rng.random() < 0.4 else AssetRef(f"img-{rng.getrandbits(40):010x}")
        tag = rand_text(rng, 0, 12) if rng.random() < 0.8 else ""
        return ImageLayer(lid, b, src, tag, name())

    counter[0] = 1
    kids = tuple(make(1, W, H) for _ in range(rng.randint(0, 5)))
    root = FrameLayer("L0", BBox(0, 0, W, H), kids, rand_color(rng) if rng.random() < 0.8 else None)
    return DesignDocument(W, H, root)


def random_mask(rng: np.random.Generator, max_side: int = 128) -> np.ndarray:
    h, w = int(rng.integers(1, max_side + 1)), int(rng.integers(1, max_side + 1))
    style = int(rng.integers(0, 3))
    if style == 0:
        return rng.random((h, w)) < rng.uniform(0.1, 0.9)
    if style == 1:
        m = np.zeros((h, w), dtype=bool)
        for _ in range(int(rng.integers(1, 8))):
            y0, x0 = int(rng.integers(0, h)), int(rng.integers(0, w))
            m[y0:y0 + int(rng.integers(1, h + 1)), x0:x0 + int(rng.integers(1, w + 1))] ^= True
        return m
    yy, xx = np.mgrid[0:h, 0:w]
    m = np.zeros((h, w), dtype=bool)
    for _ in range(int(rng.integers(1, 6))):
        cy, cx, r = rng.uniform(0, h), rng.uniform(0, w), rng.uniform(1, max(h, w) / 2)
        m ^= (yy - cy) ** 2 + (xx - cx) ** 2 < r * r
    return m


def blob_image(rng: np.random.Generator, size: int = 64, colors: int = 3) -> Raster:
    """Flat-color blobs over a background, plus mild noise so k-means has work."""
    h = w = size
    pal = rng.integers(0, 256, (colors, 3))
    lab = np.zeros((h, w), dtype=np.int64)
    yy, xx = np.mgrid[0:h, 0:w]
    for _ in range(int(rng.integers(2, 7))):
        cy, cx, r = rng.uniform(0, h), rng.uniform(0, w), rng.uniform(3, size / 2.5)
        lab[(yy - cy) ** 2 + (xx - cx) ** 2 < r * r] = int(rng.integers(1, colors))
    px = pal[lab] + rng.integers(-3, 4, (h, w, 3))
    out = np.empty((h, w, 4), dtype=np.uint8)
    out[..., :3] = np.clip(px, 0, 255)
    out[..., 3] = 255
    return Raster(w, h, out)


def poster() -> DesignDocument:
    """Three-layer poster used for token and render goldens."""
    graphic = VectorGraphic(4, 4, (
        VectorPath(Color(240, 180, 40), ((0, 0), (4, 0), (4, 4), (0, 4))),
        VectorPath(Color(240, 180, 40), ((1, 1), (1, 3), (3, 3), (3, 1))),
    ))
    root = FrameLayer("L0", BBox(0, 0, 160, 120), (
        GraphicLayer("L1", BBox(10, 10, 40, 40), graphic, "badge"),
        TextLayer("L2", BBox(60, 10, 90, 40), "BIG SALE", font_size=16, color=Color(255, 255, 255),
                  h_align=HAlign.CENTER, v_align=VAlign.MIDDLE),
        TextLayer("L3", BBox(10, 70, 140, 40), "up to 50% off <|everything|>", font_size=12,
                  color=Color(250, 220, 120, 200), h_align=HAlign.LEFT, v_align=VAlign.TOP),
    ), Color(20, 30, 70))
    return DesignDocument(160, 120, root)
