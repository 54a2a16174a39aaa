"""Deterministic RGBA8 rasterization of design documents."""
from .fill import rasterize_mask, rasterize_paths
from .raster import AssetStore, Raster, asset_id_for, composite, read_png, write_png
from .render import PlaceholderPresent, RenderError, UnresolvedAsset, render
from .text import fits, layout, wrap

__all__ = [
    "AssetStore", "PlaceholderPresent", "Raster", "RenderError", "UnresolvedAsset",
    "asset_id_for", "composite", "fits", "layout", "rasterize_mask", "rasterize_paths",
    "read_png", "render", "wrap", "write_png",
]
