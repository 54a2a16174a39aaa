"""Document rasterization.

The canvas starts fully transparent. Layers paint in flatten order. Frames
fill their background and clip their subtree to their box; groups only
offset their children.
"""
from __future__ import annotations

import numpy as np

from ..model import (
    AssetRef, DesignDocument, FrameLayer, GenerationPlaceholder, GraphicLayer, GroupLayer,
    ImageLayer, TextLayer, ensure_valid,
)
from .fill import rasterize_paths
from .raster import AssetStore, Raster, center_span, composite, composite_color, intersect, rect_empty
from .text import draw_text


class RenderError(Exception):
    pass


class UnresolvedAsset(RenderError, KeyError):
    def __init__(self, asset_id: str):
        super().__init__(asset_id)
        self.asset_id = asset_id

    def __str__(self) -> str:
        return f"unresolved asset {self.asset_id!r}"


class PlaceholderPresent(RenderError):
    def __init__(self, layer_id: str):
        super().__init__(layer_id)
        self.layer_id = layer_id

    def __str__(self) -> str:
        return f"layer {self.layer_id!r} still holds a generation placeholder"


def box_rect(box) -> tuple[int, int, int, int]:
    """Integer pixel rectangle of the pixel centres inside ``box``."""
    x0, x1 = center_span(box.x, box.w)
    y0, y1 = center_span(box.y, box.h)
    return (x0, y0, x1, y1)


def sample_bilinear(src: Raster, box, rect) -> np.ndarray:
    """Resample ``src`` stretched over ``box`` at the pixel centres of ``rect``."""
    x0, y0, x1, y1 = rect
    sw, sh = src.width, src.height
    u = (np.arange(x0, x1) + 0.5 - box.x) * (sw / box.w) - 0.5
    v = (np.arange(y0, y1) + 0.5 - box.y) * (sh / box.h) - 0.5
    u = np.clip(u, 0, sw - 1)
    v = np.clip(v, 0, sh - 1)
    ui = np.floor(u).astype(np.int64)
    vi = np.floor(v).astype(np.int64)
    fu = (u - ui)[None, :, None]
    fv = (v - vi)[:, None, None]
    u1 = np.minimum(ui + 1, sw - 1)
    v1 = np.minimum(vi + 1, sh - 1)
    p = src.pixels.astype(np.float64)
    top = p[vi][:, ui] * (1 - fu) + p[vi][:, u1] * fu
    bot = p[v1][:, ui] * (1 - fu) + p[v1][:, u1] * fu
    out = top * (1 - fv) + bot * fv
    return np.floor(out + 0.5).clip(0, 255).astype(np.uint8)


def _check_sources(doc: DesignDocument, assets) -> None:
    for layer in doc.walk():
        if isinstance(layer, ImageLayer):
            if isinstance(layer.source, GenerationPlaceholder):
                raise PlaceholderPresent(layer.id)
            if isinstance(layer.source, AssetRef) and layer.source.asset_id not in assets:
                raise UnresolvedAsset(layer.source.asset_id)


def render(doc: DesignDocument, assets: AssetStore | dict | None = None, include_text: bool = True) -> Raster:
    """Rasterize ``doc``. ``include_text=False`` skips text layers (background render)."""
    ensure_valid(doc)
    assets = {} if assets is None else assets
    _check_sources(doc, assets)
    canvas = Raster.blank(doc.canvas_width, doc.canvas_height)
    px = canvas.pixels

    def visit(layer, ox, oy, clip):
        box = layer.bbox.translated(ox, oy)
        rect = intersect(box_rect(box), clip)
        if isinstance(layer, FrameLayer):
            if layer.background is not None and not rect_empty(rect):
                x0, y0, x1, y1 = rect
                region = px[y0:y1, x0:x1]
                composite_color(region, np.ones(region.shape[:2], dtype=bool), layer.background.as_tuple())
            for child in layer.children:
                visit(child, box.x, box.y, rect)
        elif isinstance(layer, GroupLayer):
            for child in layer.children:
                visit(child, box.x, box.y, clip)
        elif rect_empty(rect):
            return
        elif isinstance(layer, GraphicLayer):
            rasterize_paths(layer.graphic, box, canvas, rect)
        elif isinstance(layer, ImageLayer):
            x0, y0, x1, y1 = rect
            composite(px[y0:y1, x0:x1], sample_bilinear(assets[layer.source.asset_id], box, rect))
        elif isinstance(layer, TextLayer):
            if include_text:
                draw_text(px, layer, box, rect)

    visit(doc.root, 0.0, 0.0, (0, 0, doc.canvas_width, doc.canvas_height))
    return canvas
