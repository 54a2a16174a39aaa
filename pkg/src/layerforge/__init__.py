"""Layered graphic-design documents: model, token format, rendering,
vectorization, metrics, augmentation and a generation-session harness."""
from .model import (
    AssetRef, BBox, Color, DesignDocument, FrameLayer, GenerationPlaceholder, GraphicLayer, GroupLayer,
    HAlign, ImageLayer, InvalidDocument, Orientation, TextLayer, VAlign, ValidationReport, VectorGraphic,
    VectorPath, Violation, flatten, validate,
)
from .tokens import ParseError, parse, serialize, tokenize
from .render import AssetStore, Raster, render

__version__ = "0.1.0"

__all__ = [
    "AssetRef", "AssetStore", "BBox", "Color", "DesignDocument", "FrameLayer", "GenerationPlaceholder",
    "GraphicLayer", "GroupLayer", "HAlign", "ImageLayer", "InvalidDocument", "Orientation", "ParseError",
    "Raster", "TextLayer", "VAlign", "ValidationReport", "VectorGraphic", "VectorPath", "Violation",
    "flatten", "parse", "render", "serialize", "tokenize", "validate",
]
