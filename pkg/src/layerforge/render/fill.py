"""Vector graphic fill: paths scaled from their view box, even-odd at pixel centres."""
from __future__ import annotations

import numpy as np

from .._kernels import fill_evenodd
from ..model import BBox, VectorGraphic, VectorPath
from .raster import Raster, composite_color

CURVE_STEPS = 16


def _bezier(p0, c1, c2, p3, steps: int = CURVE_STEPS):
    t = np.arange(1, steps + 1) / steps
    mt = 1 - t
    a, b, c, d = mt ** 3, 3 * mt * mt * t, 3 * mt * t * t, t ** 3
    xs = a * p0[0] + b * c1[0] + c * c2[0] + d * p3[0]
    ys = a * p0[1] + b * c1[1] + c * c2[1] + d * p3[1]
    return list(zip(xs.tolist(), ys.tolist()))


def path_polyline(path: VectorPath) -> list[tuple[float, float]]:
    """Vertices of the closed polyline (curves flattened); first == last endpoint."""
    if not path.nodes:
        return []
    cur = tuple(path.nodes[-1][-2:])
    pts = [cur]
    for n in path.nodes:
        if len(n) == 2:
            pts.append((n[0], n[1]))
        else:
            pts.extend(_bezier(cur, n[0:2], n[2:4], n[4:6]))
        cur = (n[-2], n[-1])
    return pts


def path_edges(paths, sx: float = 1.0, sy: float = 1.0, ox: float = 0.0, oy: float = 0.0) -> np.ndarray:
    rows = []
    for p in paths:
        pts = path_polyline(p)
        if len(pts) < 3:
            continue
        a = np.asarray(pts, dtype=np.float64)
        a[:, 0] = a[:, 0] * sx + ox
        a[:, 1] = a[:, 1] * sy + oy
        rows.append(np.hstack([a[:-1], a[1:]]))
    if not rows:
        return np.zeros((0, 4))
    return np.vstack(rows)


def rasterize_mask(paths, width: int, height: int) -> np.ndarray:
    """Unscaled even-odd coverage of ``paths`` on a width x height grid."""
    return fill_evenodd(path_edges(paths), width, height).astype(bool)


def rasterize_paths(vg: VectorGraphic, target: BBox, canvas: Raster, clip=None) -> None:
    """Fill each fill group of ``vg`` into ``canvas`` within ``target``.

    ``clip`` is an integer rectangle ``(x0, y0, x1, y1)``; the canvas bounds
    always apply.
    """
    if vg.view_w <= 0 or vg.view_h <= 0:
        return
    sx, sy = target.w / vg.view_w, target.h / vg.view_h
    rect = (0, 0, canvas.width, canvas.height) if clip is None else clip
    for color, group in vg.fill_groups():
        edges = path_edges(group, sx, sy, target.x, target.y)
        if not len(edges):
            continue
        mask = fill_evenodd(edges, canvas.width, canvas.height, rect).astype(bool)
        composite_color(canvas.pixels, mask, color.as_tuple())
