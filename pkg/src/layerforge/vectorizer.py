"""Flat-color image to vector graphic.

Pipeline: pick a small palette with k-means, split the image into one mask
per palette color, trace each mask into closed boundary loops, and stack the
loops as even-odd fill groups. Without smoothing the result rasterizes back to
the palette-quantized image exactly.

Colors are clustered as RGBA; fully transparent pixels are normalized to
(0, 0, 0, 0) first and produce no paths.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .model import AssetRef, BBox, Color, GraphicLayer, ImageLayer, VectorGraphic, VectorPath
from .render.raster import AssetStore, Raster
from .tokens import format_path_d

K_MAX = 8
TAU_MSE = 25.0
TAU_COLOR = 12.0
SIMPLICITY_THRESHOLD = 0.98
KMEANS_EPS = 1e-3
KMEANS_MAX_ITER = 50
SEED = 0
SEED_SAMPLE = 1024
ALPHA_MAX = 1.0

TURN_POLICIES = {
    "black": _kernels.TURN_BLACK,
    "white": _kernels.TURN_WHITE,
    "left": _kernels.TURN_LEFT,
    "right": _kernels.TURN_RIGHT,
    "minority": _kernels.TURN_MINORITY,
    "majority": _kernels.TURN_MAJORITY,
}


@dataclass(frozen=True)
class VectorizerConfig:
    k_max: int = K_MAX
    tau_mse: float = TAU_MSE
    tau_color: float = TAU_COLOR
    simplicity_threshold: float = SIMPLICITY_THRESHOLD
    turn_policy: str = "minority"
    smooth: bool = False
    seed: int = SEED


@dataclass
class Palette:
    colors: list[Color]
    assignments: np.ndarray  # (h, w) palette index per pixel

    def quantized(self) -> Raster:
        lut = np.array([c.as_tuple() for c in self.colors], dtype=np.uint8).reshape(-1, 4)
        px = lut[self.assignments]
        return Raster(px.shape[1], px.shape[0], np.ascontiguousarray(px))

    def counts(self) -> np.ndarray:
        return np.bincount(self.assignments.ravel(), minlength=len(self.colors))


@dataclass(frozen=True)
class SimplicityScore:
    score: float
    decision: str  # "vectorize" | "keep_raster"
    centers: tuple[tuple[float, ...], ...] = ()  # RGBA k-means centers

    @property
    def vectorize(self) -> bool:
        return self.decision == "vectorize"


def _pixels(img: Raster) -> np.ndarray:
    px = img.pixels.reshape(-1, 4).copy()
    px[px[:, 3] == 0] = 0
    return px


def _seed_centers(uniq: np.ndarray, weights: np.ndarray, k: int, seed: int) -> np.ndarray:
    """Farthest-point seeding over a fixed-seed sample of the distinct colors."""
    n = len(uniq)
    if n > SEED_SAMPLE:
        rng = np.random.default_rng(seed)
        idx = np.sort(rng.choice(n, SEED_SAMPLE, replace=False))
    else:
        idx = np.arange(n)
    cand = uniq[idx].astype(np.float64)
    first = int(np.argmax(weights[idx]))
    chosen = [first]
    d2 = ((cand - cand[first]) ** 2).sum(axis=1)
    while len(chosen) < k:
        nxt = int(np.argmax(d2))
        if d2[nxt] == 0:
            break
        chosen.append(nxt)
        d2 = np.minimum(d2, ((cand - cand[nxt]) ** 2).sum(axis=1))
    return cand[chosen]


def _lloyd(uniq: np.ndarray, weights: np.ndarray, centers: np.ndarray,
           max_iter: int = KMEANS_MAX_ITER, eps: float = KMEANS_EPS) -> np.ndarray:
    pts = uniq.astype(np.float64)
    w = weights.astype(np.float64)
    for _ in range(max_iter):
        labels, _d = _kernels.nearest_center(pts, centers)
        tot = np.bincount(labels, weights=w, minlength=len(centers))
        new = centers.copy()
        nz = tot > 0
        for c in range(pts.shape[1]):
            s = np.bincount(labels, weights=w * pts[:, c], minlength=len(centers))
            new[nz, c] = s[nz] / tot[nz]
        shift = np.sqrt(((new - centers) ** 2).sum(axis=1)).max()
        centers = new
        if shift < eps:
            break
    return centers


def _kmeans_centers(img: Raster, k: int, seed: int):
    px = _pixels(img)
    uniq, inverse, counts = np.unique(px, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.reshape(-1)
    if len(uniq) <= k:
        return uniq.astype(np.float64), uniq, inverse, counts, True
    centers = _lloyd(uniq, counts, _seed_centers(uniq, counts, k, seed))
    return centers, uniq, inverse, counts, False


def kmeans_palette(img: Raster, k: int, seed: int = SEED) -> Palette:
    """Dominant-color palette of at most ``k`` colors.

    When the image has no more than ``k`` distinct colors, those colors are the
    palette. Otherwise centers are Lloyd means rounded to integers; every pixel
    is then assigned to its nearest rounded center. Palette order is by
    descending pixel count, ties by color value.
    """
    if img.width * img.height == 0:
        raise ValueError("image is empty")
    if k < 1:
        raise ValueError("k must be >= 1")
    centers, uniq, inverse, counts, exact = _kmeans_centers(img, k, seed)
    if exact:
        colors = uniq.astype(np.int64)
        ulab = np.arange(len(uniq))
    else:
        colors = np.unique(np.floor(centers + 0.5).clip(0, 255).astype(np.int64), axis=0)
        ulab, _d = _kernels.nearest_center(uniq.astype(np.float64), colors.astype(np.float64))
    used = np.bincount(ulab, weights=counts, minlength=len(colors)).astype(np.int64)
    keep = np.nonzero(used)[0]
    order = sorted(keep.tolist(), key=lambda i: (-used[i], tuple(colors[i])))
    remap = np.full(len(colors), -1, dtype=np.int64)
    remap[order] = np.arange(len(order))
    assign = remap[ulab][inverse].reshape(img.height, img.width)
    return Palette([Color(*map(int, colors[i])) for i in order], assign)


def quantization_mse(img: Raster, palette: Palette) -> float:
    """Mean per-channel squared error of the quantized image."""
    q = palette.quantized().pixels.astype(np.float64)
    return float(((q - _pixels(img).reshape(q.shape)) ** 2).mean())


def choose_palette(img: Raster, cfg: VectorizerConfig = VectorizerConfig()) -> Palette:
    """Smallest k in 1..k_max whose quantization error is within tau_mse."""
    pal = None
    for k in range(1, cfg.k_max + 1):
        pal = kmeans_palette(img, k, cfg.seed)
        if len(pal.colors) < k or quantization_mse(img, pal) <= cfg.tau_mse:
            break
    return pal


def assess_simplicity(img: Raster, cfg: VectorizerConfig = VectorizerConfig()) -> SimplicityScore:
    """Fraction of pixels within tau_color of their nearest k_max-means center."""
    if img.width * img.height == 0:
        raise ValueError("image is empty")
    centers, uniq, inverse, counts, _exact = _kmeans_centers(img, cfg.k_max, cfg.seed)
    _lab, d2 = _kernels.nearest_center(uniq.astype(np.float64), centers)
    close = (d2 <= cfg.tau_color ** 2)
    score = float(counts[close].sum() / counts.sum())
    decision = "vectorize" if score >= cfg.simplicity_threshold else "keep_raster"
    return SimplicityScore(score, decision, tuple(tuple(map(float, c)) for c in centers))


# -- boundary tracing -------------------------------------------------------

def _corners(points: np.ndarray) -> list[tuple[int, int]]:
    """Collapse a unit-step lattice loop to its direction changes."""
    n = len(points)
    nxt = np.roll(points, -1, axis=0)
    prv = np.roll(points, 1, axis=0)
    turn = np.any((nxt - points) != (points - prv), axis=1)
    return [(int(x), int(y)) for x, y in points[turn]] if n else []


def _sign(v: float) -> int:
    return (v > 0) - (v < 0)


def _ddenom(p0, p2):
    rx = -_sign(p2[1] - p0[1])
    ry = _sign(p2[0] - p0[0])
    return ry * (p2[0] - p0[0]) - rx * (p2[1] - p0[1])


def _dpara(p0, p1, p2):
    return (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1])


def smooth_polygon(vertices, alpha_max: float = ALPHA_MAX) -> tuple:
    """Corner-preserving Bezier smoothing of a closed polygon.

    Each vertex becomes either a sharp corner (two line segments through it)
    or a cubic from the midpoint of its incoming edge to the midpoint of its
    outgoing edge. Vertices flanked by long edges stay corners.
    """
    v = [tuple(map(float, p)) for p in vertices]
    m = len(v)
    if m < 3:
        return tuple(v)

    def mid(a, b):
        return ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)

    def lerp(t, a, b):
        return (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))

    nodes = []
    for j in range(m):
        i, k = v[j - 1], v[(j + 1) % m]
        vj = v[j]
        out_mid = mid(vj, k)
        denom = _ddenom(i, k)
        if denom != 0:
            dd = abs(_dpara(i, vj, k) / denom)
            alpha = (1 - 1.0 / dd if dd > 1 else 0.0) / 0.75
        else:
            alpha = 4 / 3
        if alpha >= alpha_max:
            nodes.append(vj)
            nodes.append(out_mid)
        else:
            alpha = min(max(alpha, 0.55), 1.0)
            c1 = lerp(0.5 + 0.5 * alpha, i, vj)
            c2 = lerp(0.5 + 0.5 * alpha, k, vj)
            nodes.append((*c1, *c2, *out_mid))
    return tuple(nodes)


def trace_mask(mask, turn_policy: str = "minority", smooth: bool = False) -> list[tuple[tuple, str]]:
    """Closed boundary paths of a binary mask as ``(nodes, orientation)`` pairs.

    Outer boundaries run counterclockwise on screen (y down) and holes run
    clockwise. With ``smooth=False`` the paths are polygons through the
    corners of the pixel boundary, and even-odd filling them reproduces the
    mask exactly.
    """
    m = np.asarray(mask).astype(bool)
    if m.ndim != 2:
        raise ValueError("mask must be 2-D")
    out = []
    for pts, sign in _kernels.trace_boundaries(m, TURN_POLICIES[turn_policy]):
        corners = _corners(pts)
        if sign < 0:
            corners.reverse()
        nodes = smooth_polygon(corners) if smooth else tuple(corners)
        orient = VectorPath(Color(0, 0, 0), tuple(corners)).orientation.value
        out.append((nodes, orient))
    return out


def vectorize(img: Raster, k: int | None = None, cfg: VectorizerConfig = VectorizerConfig(),
              palette: Palette | None = None) -> VectorGraphic:
    """Trace every palette region of ``img`` into one fill group.

    Regions are emitted largest first. ``k=None`` picks k by quantization
    error.
    """
    if palette is None:
        palette = choose_palette(img, cfg) if k is None else kmeans_palette(img, k, cfg.seed)
    counts = palette.counts()
    order = sorted(range(len(palette.colors)), key=lambda i: (-counts[i], i))
    paths = []
    for idx in order:
        color = palette.colors[idx]
        if color.a == 0 or counts[idx] == 0:
            continue
        for nodes, _o in trace_mask(palette.assignments == idx, cfg.turn_policy, cfg.smooth):
            paths.append(VectorPath(color, nodes))
    return VectorGraphic(img.width, img.height, tuple(paths))


def emit_svg(vg: VectorGraphic) -> str:
    """SVG 1.1 document with one even-odd ``path`` element per fill group."""
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{vg.view_w}" '
        f'height="{vg.view_h}" viewBox="0 0 {vg.view_w} {vg.view_h}">',
    ]
    for color, group in vg.fill_groups():
        d = "".join(format_path_d(p.nodes) for p in group)
        opacity = "" if color.a == 255 else f' fill-opacity="{color.a / 255:.4f}"'
        lines.append(f'<path d="{d}" fill="#{color.r:02x}{color.g:02x}{color.b:02x}"{opacity} fill-rule="evenodd"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


# -- tagging ----------------------------------------------------------------

class TaggingClient:
    """Produces a short descriptive tag for a raster image."""

    def tag(self, img: Raster) -> str:
        raise NotImplementedError


_NAMED = {
    "black": (0, 0, 0), "white": (255, 255, 255), "gray": (128, 128, 128),
    "red": (220, 40, 40), "orange": (240, 140, 30), "yellow": (240, 220, 40),
    "green": (50, 170, 60), "cyan": (40, 200, 210), "blue": (40, 80, 220),
    "purple": (130, 60, 180), "pink": (240, 130, 180), "brown": (130, 80, 40),
}


def color_name(c: Color) -> str:
    return min(_NAMED, key=lambda n: (sum((a - b) ** 2 for a, b in zip(_NAMED[n], (c.r, c.g, c.b))), n))


class MockTaggingClient(TaggingClient):
    """Dominant color name plus an aspect label, e.g. ``"blue wide"``."""

    def tag(self, img: Raster) -> str:
        pal = kmeans_palette(img, 1)
        ratio = img.width / img.height
        aspect = "wide" if ratio > 1.2 else "tall" if ratio < 1 / 1.2 else "square"
        return f"{color_name(pal.colors[0])} {aspect}"


def process_image(img: Raster, layer_id: str, bbox: BBox, assets: AssetStore,
                  tagger: TaggingClient | None = None, cfg: VectorizerConfig = VectorizerConfig()):
    """Turn an embedded image into a graphic layer if simple, else an image layer."""
    if assess_simplicity(img, cfg).vectorize:
        return GraphicLayer(layer_id, bbox, vectorize(img, cfg=cfg))
    aid = assets.add(img)
    tag = (tagger or MockTaggingClient()).tag(img)
    return ImageLayer(layer_id, bbox, AssetRef(aid), tag)


def svg_digest(vg: VectorGraphic) -> str:
    return hashlib.sha256(emit_svg(vg).encode()).hexdigest()
