"""JSON storage format for design documents (schema: ``schema/document.schema.json``).

Field names mirror the dataclasses in :mod:`layerforge.model`; colors are
``#rrggbbaa`` strings and path nodes are coordinate lists.
"""
from __future__ import annotations

import json
from importlib import resources
from typing import Any

from .model import (
    AssetRef, BBox, Color, DesignDocument, FrameLayer, GenerationPlaceholder, GraphicLayer,
    GroupLayer, HAlign, ImageLayer, TextLayer, VAlign, VectorGraphic, VectorPath,
)

SCHEMA_VERSION = 1


class DocumentFormatError(ValueError):
    pass


def _bbox(b: BBox) -> dict:
    return {"x": b.x, "y": b.y, "w": b.w, "h": b.h}


def layer_to_dict(layer) -> dict:
    d: dict[str, Any] = {"kind": layer.kind, "id": layer.id, "bbox": _bbox(layer.bbox)}
    if layer.name is not None:
        d["name"] = layer.name
    if isinstance(layer, FrameLayer):
        d["background"] = layer.background.to_hex(True) if layer.background else None
        d["children"] = [layer_to_dict(c) for c in layer.children]
    elif isinstance(layer, GroupLayer):
        d["children"] = [layer_to_dict(c) for c in layer.children]
    elif isinstance(layer, GraphicLayer):
        g = layer.graphic
        d["graphic"] = {
            "view_w": g.view_w,
            "view_h": g.view_h,
            "paths": [
                {"fill": p.fill.to_hex(True), "nodes": [list(n) for n in p.nodes], "orientation": p.orientation.value}
                for p in g.paths
            ],
        }
    elif isinstance(layer, TextLayer):
        d.update(
            content=layer.content,
            font_size=layer.font_size,
            font_tag=layer.font_tag,
            color=layer.color.to_hex(True),
            h_align=HAlign(layer.h_align).value,
            v_align=VAlign(layer.v_align).value,
        )
    elif isinstance(layer, ImageLayer):
        if isinstance(layer.source, AssetRef):
            d["source"] = {"asset_id": layer.source.asset_id}
        else:
            d["source"] = {"placeholder": True}
        d["description_tag"] = layer.description_tag
    return d


def to_dict(doc: DesignDocument) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "canvas_width": doc.canvas_width,
        "canvas_height": doc.canvas_height,
        "root": layer_to_dict(doc.root),
    }


def dumps(doc: DesignDocument, indent: int | None = 2) -> str:
    return json.dumps(to_dict(doc), indent=indent, ensure_ascii=False, sort_keys=False) + "\n"


def _req(d: dict, key: str, where: str):
    if key not in d:
        raise DocumentFormatError(f"{where}: missing key {key!r}")
    return d[key]


def _color(v, where: str) -> Color:
    if not isinstance(v, str):
        raise DocumentFormatError(f"{where}: color must be a '#rrggbb[aa]' string")
    try:
        return Color.from_hex(v)
    except ValueError as e:
        raise DocumentFormatError(f"{where}: {e}") from None


_KEYS = {
    "frame": {"kind", "id", "bbox", "name", "background", "children"},
    "group": {"kind", "id", "bbox", "name", "children"},
    "graphic": {"kind", "id", "bbox", "name", "graphic"},
    "text": {"kind", "id", "bbox", "name", "content", "font_size", "font_tag", "color", "h_align", "v_align"},
    "image": {"kind", "id", "bbox", "name", "source", "description_tag"},
}


def layer_from_dict(d: dict, where: str = "root"):
    if not isinstance(d, dict):
        raise DocumentFormatError(f"{where}: layer must be an object")
    kind = _req(d, "kind", where)
    if kind not in _KEYS:
        raise DocumentFormatError(f"{where}: unknown layer kind {kind!r}")
    extra = set(d) - _KEYS[kind]
    if extra:
        raise DocumentFormatError(f"{where}: unknown keys {sorted(extra)}")
    lid = _req(d, "id", where)
    where = f"{where}<{lid}>"
    b = _req(d, "bbox", where)
    try:
        bbox = BBox(b["x"], b["y"], b["w"], b["h"])
    except (KeyError, TypeError):
        raise DocumentFormatError(f"{where}: bbox needs x, y, w, h") from None
    name = d.get("name")
    if kind in ("frame", "group"):
        children = tuple(layer_from_dict(c, f"{where}/{i}") for i, c in enumerate(d.get("children", [])))
        if kind == "frame":
            bg = d.get("background")
            return FrameLayer(lid, bbox, children, _color(bg, where) if bg is not None else None, name)
        return GroupLayer(lid, bbox, children, name)
    if kind == "graphic":
        g = _req(d, "graphic", where)
        paths = []
        for i, p in enumerate(g.get("paths", [])):
            vp = VectorPath(_color(_req(p, "fill", where), where), tuple(tuple(n) for n in _req(p, "nodes", where)))
            if "orientation" in p and p["orientation"] != vp.orientation.value and vp.signed_area() != 0:
                raise DocumentFormatError(f"{where}: path {i} orientation does not match its vertices")
            paths.append(vp)
        return GraphicLayer(lid, bbox, VectorGraphic(_req(g, "view_w", where), _req(g, "view_h", where), tuple(paths)), name)
    if kind == "text":
        try:
            h_align = HAlign(d.get("h_align", "left"))
            v_align = VAlign(d.get("v_align", "top"))
        except ValueError as e:
            raise DocumentFormatError(f"{where}: {e}") from None
        return TextLayer(
            lid, bbox, _req(d, "content", where),
            font_size=d.get("font_size", 16),
            font_tag=d.get("font_tag", "sans"),
            color=_color(d.get("color", "#000000ff"), where),
            h_align=h_align, v_align=v_align, name=name,
        )
    src = _req(d, "source", where)
    if isinstance(src, dict) and "asset_id" in src:
        source = AssetRef(src["asset_id"])
    elif isinstance(src, dict) and src.get("placeholder") is True:
        source = GenerationPlaceholder()
    else:
        raise DocumentFormatError(f"{where}: source must be {{'asset_id': ...}} or {{'placeholder': true}}")
    return ImageLayer(lid, bbox, source, d.get("description_tag", ""), name)


def from_dict(d: dict) -> DesignDocument:
    if not isinstance(d, dict):
        raise DocumentFormatError("document must be a JSON object")
    extra = set(d) - {"version", "canvas_width", "canvas_height", "root"}
    if extra:
        raise DocumentFormatError(f"unknown top-level keys {sorted(extra)}")
    if d.get("version", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise DocumentFormatError(f"unsupported document version {d.get('version')!r}")
    root = layer_from_dict(_req(d, "root", "document"))
    return DesignDocument(_req(d, "canvas_width", "document"), _req(d, "canvas_height", "document"), root)


def loads(text: str) -> DesignDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentFormatError(f"invalid JSON: {e}") from None
    return from_dict(data)


def schema() -> dict:
    return json.loads(resources.files("layerforge").joinpath("schema/document.schema.json").read_text())

