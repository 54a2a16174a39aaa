"""In-memory design document: a tree of typed layers under a root frame.

Layers are frozen dataclasses. Child bounding boxes are relative to their
container, so moving a group moves everything in it. Stacking order is list
order: later children paint on top.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterator, Union


@dataclass(frozen=True)
class BBox:
    x: float
    y: float
    w: float
    h: float

    def translated(self, dx: float, dy: float) -> "BBox":
        return BBox(self.x + dx, self.y + dy, self.w, self.h)

    @property
    def right(self) -> float:
        return self.x + self.w

    @property
    def bottom(self) -> float:
        return self.y + self.h

    @property
    def area(self) -> float:
        return self.w * self.h

    def intersection_area(self, other: "BBox") -> float:
        iw = min(self.right, other.right) - max(self.x, other.x)
        ih = min(self.bottom, other.bottom) - max(self.y, other.y)
        if iw <= 0 or ih <= 0:
            return 0.0
        return iw * ih


@dataclass(frozen=True)
class Color:
    r: int
    g: int
    b: int
    a: int = 255

    @classmethod
    def from_hex(cls, text: str) -> "Color":
        s = text[1:] if text.startswith("#") else text
        if len(s) not in (6, 8):
            raise ValueError(f"bad color literal {text!r}")
        try:
            vals = [int(s[i:i + 2], 16) for i in range(0, len(s), 2)]
        except ValueError:
            raise ValueError(f"bad color literal {text!r}") from None
        return cls(*vals)

    def to_hex(self, always_alpha: bool = False) -> str:
        if self.a == 255 and not always_alpha:
            return "#%02x%02x%02x" % (self.r, self.g, self.b)
        return "#%02x%02x%02x%02x" % (self.r, self.g, self.b, self.a)

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.r, self.g, self.b, self.a)


class HAlign(str, Enum):
    LEFT = "left"
    CENTER = "center"
    RIGHT = "right"


class VAlign(str, Enum):
    TOP = "top"
    MIDDLE = "middle"
    BOTTOM = "bottom"


class Orientation(str, Enum):
    CLOCKWISE = "clockwise"
    COUNTERCLOCKWISE = "counterclockwise"


# A node is either a line-to endpoint (x, y) or a cubic segment
# (c1x, c1y, c2x, c2y, x, y). Paths are implicitly closed: the start point is
# the endpoint of the last node.
Node = tuple


@dataclass(frozen=True)
class VectorPath:
    fill: Color
    nodes: tuple[Node, ...]

    @property
    def points(self) -> list[tuple[float, float]]:
        return [(n[-2], n[-1]) for n in self.nodes]

    def signed_area(self) -> float:
        """Shoelace area over the node endpoints, in y-down image coordinates."""
        pts = self.points
        s = 0.0
        for i, (x0, y0) in enumerate(pts):
            x1, y1 = pts[(i + 1) % len(pts)]
            s += x0 * y1 - x1 * y0
        return s / 2.0

    @property
    def orientation(self) -> Orientation:
        # Positive shoelace area in a y-down frame is a clockwise loop on screen.
        if self.signed_area() >= 0:
            return Orientation.CLOCKWISE
        return Orientation.COUNTERCLOCKWISE

    @property
    def is_polygon(self) -> bool:
        return all(len(n) == 2 for n in self.nodes)

    def reversed(self) -> "VectorPath":
        if self.is_polygon:
            return VectorPath(self.fill, tuple(reversed(self.nodes)))
        out = []
        for i in range(len(self.nodes) - 1, -1, -1):
            seg, start = self.nodes[i], self.nodes[i - 1][-2:]
            if len(seg) == 2:
                out.append(tuple(start))
            else:
                out.append((seg[2], seg[3], seg[0], seg[1], start[0], start[1]))
        return VectorPath(self.fill, tuple(out))


@dataclass(frozen=True)
class VectorGraphic:
    """Closed paths with fills inside a ``view_w`` x ``view_h`` view box.

    Consecutive paths sharing a fill form one fill group; a group is filled
    with the even-odd rule, which is how holes are expressed.
    """

    view_w: int
    view_h: int
    paths: tuple[VectorPath, ...] = ()

    def fill_groups(self) -> list[tuple[Color, list[VectorPath]]]:
        groups: list[tuple[Color, list[VectorPath]]] = []
        for p in self.paths:
            if groups and groups[-1][0] == p.fill:
                groups[-1][1].append(p)
            else:
                groups.append((p.fill, [p]))
        return groups


@dataclass(frozen=True)
class AssetRef:
    asset_id: str


@dataclass(frozen=True)
class GenerationPlaceholder:
    pass


@dataclass(frozen=True)
class FrameLayer:
    id: str
    bbox: BBox
    children: tuple["Layer", ...] = ()
    background: Color | None = None
    name: str | None = None

    kind = "frame"


@dataclass(frozen=True)
class GroupLayer:
    id: str
    bbox: BBox
    children: tuple["Layer", ...] = ()
    name: str | None = None

    kind = "group"


@dataclass(frozen=True)
class GraphicLayer:
    id: str
    bbox: BBox
    graphic: VectorGraphic
    name: str | None = None

    kind = "graphic"


@dataclass(frozen=True)
class TextLayer:
    id: str
    bbox: BBox
    content: str
    font_size: float = 16
    font_tag: str = "sans"
    color: Color = Color(0, 0, 0)
    h_align: HAlign = HAlign.LEFT
    v_align: VAlign = VAlign.TOP
    name: str | None = None

    kind = "text"


@dataclass(frozen=True)
class ImageLayer:
    id: str
    bbox: BBox
    source: Union[AssetRef, GenerationPlaceholder]
    description_tag: str = ""
    name: str | None = None

    kind = "image"


Layer = Union[FrameLayer, GroupLayer, GraphicLayer, TextLayer, ImageLayer]
CONTAINERS = (FrameLayer, GroupLayer)


@dataclass(frozen=True)
class DesignDocument:
    canvas_width: int
    canvas_height: int
    root: FrameLayer

    @classmethod
    def empty(cls, width: int, height: int, background: Color | None = None, root_id: str = "L0") -> "DesignDocument":
        return cls(width, height, FrameLayer(root_id, BBox(0, 0, width, height), background=background))

    def walk(self) -> Iterator[Layer]:
        """Pre-order traversal, parents before children."""
        stack: list[Layer] = [self.root]
        while stack:
            layer = stack.pop()
            yield layer
            if isinstance(layer, CONTAINERS):
                stack.extend(reversed(layer.children))

    def layer_count(self) -> int:
        return sum(1 for _ in self.walk())

    def text_layers(self) -> list[TextLayer]:
        return [layer for layer in self.walk() if isinstance(layer, TextLayer)]

    def map_layers(self, fn) -> "DesignDocument":
        """Rebuild the tree bottom-up, passing every layer through ``fn``."""

        def rebuild(layer):
            if isinstance(layer, CONTAINERS):
                layer = replace(layer, children=tuple(rebuild(c) for c in layer.children))
            return fn(layer)

        return replace(self, root=rebuild(self.root))


# --- validation -----------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    rule: str
    layer_id: str | None
    detail: str = ""
    paths: tuple[str, ...] = ()

    def __str__(self) -> str:
        where = f" [{self.layer_id}]" if self.layer_id is not None else ""
        extra = f" at {', '.join(self.paths)}" if self.paths else ""
        return f"{self.rule}{where}: {self.detail}{extra}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def _finite(*vals) -> bool:
    return all(isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v) for v in vals)


def _check_color(c, lid, what, out):
    if not isinstance(c, Color):
        out.append(Violation("color_type", lid, f"{what} is not a Color"))
        return
    for ch in c.as_tuple():
        if not isinstance(ch, int) or isinstance(ch, bool) or not 0 <= ch <= 255:
            out.append(Violation("color_range", lid, f"{what} channel {ch!r} outside 0-255"))
            return


def _check_graphic(g, lid, out):
    if not isinstance(g, VectorGraphic):
        out.append(Violation("graphic_type", lid, "graphic is not a VectorGraphic"))
        return
    if not (isinstance(g.view_w, int) and isinstance(g.view_h, int)) or g.view_w < 1 or g.view_h < 1:
        out.append(Violation("graphic_viewbox", lid, f"view box {g.view_w}x{g.view_h} must be positive integers"))
        return
    for i, p in enumerate(g.paths):
        _check_color(p.fill, lid, f"path {i} fill", out)
        if len(p.nodes) < 3 and p.is_polygon:
            out.append(Violation("path_closed", lid, f"path {i} has fewer than 3 vertices"))
        for node in p.nodes:
            if len(node) not in (2, 6) or not _finite(*node):
                out.append(Violation("path_node", lid, f"path {i} has a malformed node {node!r}"))
                break
            xs, ys = node[0::2], node[1::2]
            if min(xs) < 0 or max(xs) > g.view_w or min(ys) < 0 or max(ys) > g.view_h:
                out.append(Violation("path_in_viewbox", lid, f"path {i} leaves the view box"))
                break


def validate(doc: DesignDocument) -> ValidationReport:
    """Check every structural invariant; violations are returned, never raised."""
    out: list[Violation] = []
    if not (isinstance(doc.canvas_width, int) and isinstance(doc.canvas_height, int)) or \
            doc.canvas_width < 1 or doc.canvas_height < 1:
        out.append(Violation("canvas_size", None, f"canvas {doc.canvas_width}x{doc.canvas_height} must be >= 1x1 integers"))
    root = doc.root
    if not isinstance(root, FrameLayer):
        out.append(Violation("root_frame", getattr(root, "id", None), "root must be a frame layer"))
    elif root.bbox != BBox(0, 0, doc.canvas_width, doc.canvas_height):
        out.append(Violation("root_bbox", root.id, f"root bbox {root.bbox} must cover the canvas"))

    seen: dict[str, list[str]] = {}
    on_stack: set[int] = set()

    def visit(layer, path: str):
        lid = getattr(layer, "id", None)
        if not isinstance(lid, str) or not lid:
            out.append(Violation("id_nonempty", None, "layer id must be a non-empty string", (path,)))
        else:
            seen.setdefault(lid, []).append(path)
        b = layer.bbox
        if not _finite(b.x, b.y, b.w, b.h):
            out.append(Violation("bbox_finite", lid, f"non-finite bbox {b}"))
        elif b.w <= 0 or b.h <= 0:
            out.append(Violation("bbox_positive", lid, f"bbox size {b.w}x{b.h} must be positive"))

        if isinstance(layer, FrameLayer) and layer.background is not None:
            _check_color(layer.background, lid, "background", out)
        elif isinstance(layer, TextLayer):
            if not isinstance(layer.content, str) or not layer.content:
                out.append(Violation("text_nonempty", lid, "text content is empty"))
            if not _finite(layer.font_size) or layer.font_size <= 0:
                out.append(Violation("font_size_positive", lid, f"font_size {layer.font_size!r} must be positive"))
            _check_color(layer.color, lid, "color", out)
            if not isinstance(layer.h_align, HAlign):
                out.append(Violation("h_align", lid, f"unknown h_align {layer.h_align!r}"))
            if not isinstance(layer.v_align, VAlign):
                out.append(Violation("v_align", lid, f"unknown v_align {layer.v_align!r}"))
        elif isinstance(layer, ImageLayer):
            src = layer.source
            if isinstance(src, AssetRef):
                if not src.asset_id:
                    out.append(Violation("asset_id_nonempty", lid, "asset reference has an empty id"))
            elif not isinstance(src, GenerationPlaceholder):
                out.append(Violation("image_source", lid, f"unknown image source {src!r}"))
        elif isinstance(layer, GraphicLayer):
            _check_graphic(layer.graphic, lid, out)

        if isinstance(layer, CONTAINERS):
            key = id(layer)
            if key in on_stack:
                out.append(Violation("no_cycles", lid, "layer contains itself"))
                return
            on_stack.add(key)
            for i, child in enumerate(layer.children):
                if not isinstance(child, (FrameLayer, GroupLayer, GraphicLayer, TextLayer, ImageLayer)):
                    out.append(Violation("layer_type", lid, f"child {i} is not a layer"))
                    continue
                visit(child, f"{path}/{i}:{child.id}")
            on_stack.discard(key)

    if isinstance(root, FrameLayer):
        visit(root, f"{root.id}")
    for lid, paths in seen.items():
        if len(paths) > 1:
            out.append(Violation("unique_id", lid, f"id used {len(paths)} times", tuple(paths)))
    return ValidationReport(tuple(out))


class InvalidDocument(ValueError):
    def __init__(self, report: ValidationReport):
        self.report = report
        super().__init__("; ".join(str(v) for v in report.violations))


def ensure_valid(doc: DesignDocument) -> None:
    report = validate(doc)
    if not report.ok:
        raise InvalidDocument(report)


def flatten(doc: DesignDocument) -> list[tuple[BBox, Layer]]:
    """Paint-ordered (absolute bbox, layer) pairs; container offsets accumulate."""
    ensure_valid(doc)
    out: list[tuple[BBox, Layer]] = []

    def visit(layer, ox, oy):
        absb = layer.bbox.translated(ox, oy)
        out.append((absb, layer))
        if isinstance(layer, CONTAINERS):
            for child in layer.children:
                visit(child, absb.x, absb.y)

    visit(doc.root, 0, 0)
    return out


def leaf_boxes(doc: DesignDocument) -> list[tuple[BBox, Layer]]:
    """Absolute boxes of childless non-root layers."""
    return [(b, layer) for b, layer in flatten(doc)[1:]
            if not (isinstance(layer, CONTAINERS) and layer.children)]


def text_boxes(doc: DesignDocument) -> list[tuple[BBox, TextLayer]]:
    return [(b, layer) for b, layer in flatten(doc) if isinstance(layer, TextLayer)]


__all__ = [
    "AssetRef", "BBox", "Color", "DesignDocument", "FrameLayer", "GenerationPlaceholder",
    "GraphicLayer", "GroupLayer", "HAlign", "ImageLayer", "InvalidDocument", "Layer",
    "Orientation", "TextLayer", "VAlign", "ValidationReport", "VectorGraphic", "VectorPath",
    "Violation", "ensure_valid", "flatten", "leaf_boxes", "text_boxes", "validate",
]
