"""Pure NumPy/Python versions of the hot loops; contracts match ``_ckernels``."""
from __future__ import annotations

import numpy as np

_FLIP = bytes([1, 0]) + bytes(254)

TURN_BLACK, TURN_WHITE, TURN_LEFT, TURN_RIGHT, TURN_MINORITY, TURN_MAJORITY = range(6)


def fill_evenodd(edges, width, height, clip=None):
    """Even-odd coverage of pixel centres by a set of closed-loop edges.

    ``edges`` is an (n, 4) float array of segments ``x0, y0, x1, y1`` in pixel
    units. Pixel (px, py) is inside when the number of edge crossings of the
    horizontal line ``y = py + 0.5`` at or left of ``px + 0.5`` is odd.
    Returns a (height, width) uint8 mask; ``clip`` = (x0, y0, x1, y1) zeroes
    everything outside the integer rectangle.
    """
    out = np.zeros((height, width), dtype=np.uint8)
    e = np.asarray(edges, dtype=np.float64).reshape(-1, 4)
    if len(e) == 0 or width <= 0 or height <= 0:
        return out
    x0, y0, x1, y1 = e[:, 0], e[:, 1], e[:, 2], e[:, 3]
    keep = y0 != y1
    x0, y0, x1, y1 = x0[keep], y0[keep], x1[keep], y1[keep]
    lo = np.minimum(y0, y1)
    hi = np.maximum(y0, y1)
    r0 = np.clip(np.ceil(lo - 0.5), 0, height).astype(np.int64)
    r1 = np.clip(np.ceil(hi - 0.5), 0, height).astype(np.int64)
    counts = r1 - r0
    total = int(counts.sum()) if len(counts) else 0
    if total == 0:
        return out
    idx = np.repeat(np.arange(len(r0)), counts)
    starts = np.repeat(np.cumsum(counts) - counts, counts)
    rows = r0[idx] + (np.arange(total) - starts)
    yc = rows + 0.5
    t = (yc - y0[idx]) / (y1[idx] - y0[idx])
    xc = x0[idx] + t * (x1[idx] - x0[idx])
    cols = np.clip(np.ceil(xc - 0.5), 0, width).astype(np.int64)
    acc = np.zeros((height, width + 1), dtype=np.int32)
    np.add.at(acc, (rows, cols), 1)
    parity = np.cumsum(acc[:, :width], axis=1) & 1
    out[:] = parity
    if clip is not None:
        cx0, cy0, cx1, cy1 = clip
        cx0, cy0 = max(cx0, 0), max(cy0, 0)
        cx1, cy1 = min(cx1, width), min(cy1, height)
        mask = np.zeros_like(out)
        if cx1 > cx0 and cy1 > cy0:
            mask[cy0:cy1, cx0:cx1] = 1
        out &= mask
    return out


def _majority(bm, w, h, x, y):
    def at(px, py):
        return 0 <= px < w and 0 <= py < h and bm[py][px]

    for i in range(2, 5):
        ct = 0
        for a in range(-i + 1, i):
            ct += 1 if at(x + a, y + i - 1) else -1
            ct += 1 if at(x + i - 1, y + a - 1) else -1
            ct += 1 if at(x + a - 1, y - i) else -1
            ct += 1 if at(x - i, y + a) else -1
        if ct > 0:
            return 1
        if ct < 0:
            return 0
    return 0


def trace_boundaries(mask, turnpolicy=TURN_MINORITY):
    """Decompose a binary mask into closed pixel-edge boundary loops.

    Returns ``[(points, sign), ...]`` in discovery (raster) order. ``points``
    is an (n, 2) int32 array of lattice corners, one per unit step; ``sign`` is
    +1 for a boundary enclosing set pixels and -1 for a hole. Every loop keeps
    the region it encloses on the same side, so holes come out with the same
    turning direction as outer boundaries. The XOR of all loop interiors
    equals the mask.
    """
    m = np.asarray(mask).astype(bool)
    h, w = m.shape
    orig = [bytes(row) for row in m.astype(np.uint8)]
    bm = [bytearray(row) for row in orig]
    paths = []
    sy, sx = 0, 0
    while True:
        while sy < h:
            sx = bm[sy].find(1, sx)
            if sx >= 0:
                break
            sy, sx = sy + 1, 0
        if sy >= h:
            break
        x0, y0 = sx, sy
        sign = 1 if orig[y0][x0] else -1
        pts = []
        x, y = x0, y0
        dx, dy = 0, 1
        maxx = x0
        while True:
            pts.append((x, y))
            if x > maxx:
                maxx = x
            x += dx
            y += dy
            if x == x0 and y == y0:
                break
            lx, ly = x + (dx + dy - 1) // 2, y + (dy - dx - 1) // 2
            rx, ry = x + (dx - dy - 1) // 2, y + (dy + dx - 1) // 2
            lset = 0 <= lx < w and 0 <= ly < h and bm[ly][lx]
            rset = 0 <= rx < w and 0 <= ry < h and bm[ry][rx]
            if rset and not lset:
                if (turnpolicy == TURN_RIGHT
                        or (turnpolicy == TURN_BLACK and sign > 0)
                        or (turnpolicy == TURN_WHITE and sign < 0)
                        or (turnpolicy == TURN_MAJORITY and _majority(bm, w, h, x, y))
                        or (turnpolicy == TURN_MINORITY and not _majority(bm, w, h, x, y))):
                    dx, dy = -dy, dx
                else:
                    dx, dy = dy, -dx
            elif rset:
                dx, dy = -dy, dx
            elif not lset:
                dx, dy = dy, -dx
        # Flip the loop interior row by row, from each vertical edge rightwards
        # to the loop's right extent.
        py = pts[-1][1]
        for px, qy in pts:
            if qy != py:
                row = bm[min(qy, py)]
                row[px:maxx] = row[px:maxx].translate(_FLIP)
                py = qy
        paths.append((np.asarray(pts, dtype=np.int32).reshape(-1, 2), sign))
    return paths


def nearest_center(pixels, centers):
    """Index of the nearest centre (ties -> lowest index) and squared distance."""
    p = np.asarray(pixels, dtype=np.float64)
    c = np.asarray(centers, dtype=np.float64)
    n = len(p)
    labels = np.empty(n, dtype=np.int64)
    dist = np.empty(n, dtype=np.float64)
    step = 1 << 16
    for s in range(0, n, step):
        chunk = p[s:s + step]
        d2 = ((chunk[:, None, :] - c[None, :, :]) ** 2).sum(axis=2)
        lab = np.argmin(d2, axis=1)
        labels[s:s + step] = lab
        dist[s:s + step] = d2[np.arange(len(chunk)), lab]
    return labels, dist
