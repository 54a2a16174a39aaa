"""Bitmap text: glyph lookup, greedy line wrapping and drawing.

A glyph cell is ``round(font_size)`` pixels tall and ``round(font_size / 2)``
wide; East Asian wide characters take two cells. Code points outside
printable ASCII draw the replacement glyph.
"""
from __future__ import annotations

import math
import unicodedata
from functools import lru_cache

import numpy as np

from . import _font8x16 as _font
from .raster import composite_color, round_half_up

_REPLACEMENT = _font.LAST - _font.FIRST + 1


@lru_cache(maxsize=1)
def _glyphs() -> np.ndarray:
    raw = np.frombuffer(_font.DATA, dtype=np.uint8).reshape(-1, _font.GLYPH_H)
    return np.unpackbits(raw[:, :, None], axis=2).astype(bool)


def glyph_index(ch: str) -> int:
    o = ord(ch)
    if _font.FIRST <= o <= _font.LAST:
        return o - _font.FIRST
    return _REPLACEMENT


def is_wide(ch: str) -> bool:
    return unicodedata.east_asian_width(ch) in ("W", "F")


def cell_size(font_size: float) -> tuple[int, int]:
    """(width, height) of one narrow glyph cell in pixels."""
    return max(1, round_half_up(font_size / 2)), max(1, round_half_up(font_size))


def text_width(s: str, cw: int) -> int:
    return sum(2 * cw if is_wide(c) else cw for c in s)


def _pieces(para: str) -> list[str]:
    # space runs, single wide characters, and runs of anything else
    out: list[str] = []
    word = ""
    for ch in para:
        if ch == " ":
            if word and not word.startswith(" "):
                out.append(word)
                word = ""
            word += ch
        elif is_wide(ch):
            if word:
                out.append(word)
                word = ""
            out.append(ch)
        else:
            if word.startswith(" "):
                out.append(word)
                word = ""
            word += ch
    if word:
        out.append(word)
    return out


def wrap(content: str, max_width: float, cw: int) -> list[str]:
    """Greedy wrap at spaces; wide characters may break anywhere.

    Words longer than a line are split by character. Spaces at a break are
    dropped. ``\\n`` always starts a new line.
    """
    lines: list[str] = []
    limit = max(int(math.floor(max_width)), cw)
    for para in content.split("\n"):
        line, pending = "", ""
        for piece in _pieces(para):
            if piece.startswith(" "):
                pending += piece
                continue
            cand = (line + pending + piece) if line else piece
            if text_width(cand, cw) <= limit:
                line, pending = cand, ""
                continue
            if line:
                lines.append(line)
            line, pending = "", ""
            for ch in piece:
                if line and text_width(line + ch, cw) > limit:
                    lines.append(line)
                    line = ""
                line += ch
        lines.append(line)
    return lines


def layout(content: str, font_size: float, box_w: float, box_h: float,
           h_align: str = "left", v_align: str = "top") -> list[tuple[int, int, str]]:
    """Line placements ``(dx, dy, text)`` relative to the box origin."""
    cw, ch = cell_size(font_size)
    lines = wrap(content, box_w, cw)
    total = len(lines) * ch
    if v_align == "middle":
        top = round_half_up((box_h - total) / 2)
    elif v_align == "bottom":
        top = round_half_up(box_h - total)
    else:
        top = 0
    out = []
    for i, line in enumerate(lines):
        w = text_width(line, cw)
        if h_align == "center":
            dx = round_half_up((box_w - w) / 2)
        elif h_align == "right":
            dx = round_half_up(box_w - w)
        else:
            dx = 0
        out.append((dx, top + i * ch, line))
    return out


def fits(content: str, font_size: float, box_w: float, box_h: float) -> bool:
    cw, ch = cell_size(font_size)
    lines = wrap(content, box_w, cw)
    return len(lines) * ch <= box_h and all(text_width(s, cw) <= box_w for s in lines)


@lru_cache(maxsize=64)
def _scaled_glyph(index: int, w: int, h: int) -> np.ndarray:
    g = _glyphs()[index]
    # nearest neighbour at target pixel centres
    rows = ((2 * np.arange(h) + 1) * _font.GLYPH_H) // (2 * h)
    cols = ((2 * np.arange(w) + 1) * _font.GLYPH_W) // (2 * w)
    return g[rows][:, cols]


def text_mask(content: str, font_size: float, bx: float, by: float, bw: float, bh: float,
              h_align: str, v_align: str, rect) -> np.ndarray:
    """Coverage mask over the integer rectangle ``rect = (x0, y0, x1, y1)``."""
    x0, y0, x1, y1 = rect
    mask = np.zeros((y1 - y0, x1 - x0), dtype=bool)
    cw, ch = cell_size(font_size)
    ox, oy = round_half_up(bx), round_half_up(by)
    for dx, dy, line in layout(content, font_size, bw, bh, h_align, v_align):
        gy = oy + dy
        if gy >= y1 or gy + ch <= y0:
            continue
        gx = ox + dx
        for c in line:
            w = 2 * cw if is_wide(c) else cw
            if c != " " and gx < x1 and gx + w > x0:
                g = _scaled_glyph(glyph_index(c), w, ch)
                sx0, sy0 = max(gx, x0), max(gy, y0)
                sx1, sy1 = min(gx + w, x1), min(gy + ch, y1)
                mask[sy0 - y0:sy1 - y0, sx0 - x0:sx1 - x0] |= g[sy0 - gy:sy1 - gy, sx0 - gx:sx1 - gx]
            gx += w
    return mask


def draw_text(pixels: np.ndarray, layer, box, rect) -> None:
    """Draw a text layer at absolute ``box`` clipped to integer ``rect``."""
    x0, y0, x1, y1 = rect
    m = text_mask(layer.content, layer.font_size, box.x, box.y, box.w, box.h,
                  getattr(layer.h_align, "value", layer.h_align),
                  getattr(layer.v_align, "value", layer.v_align), rect)
    composite_color(pixels[y0:y1, x0:x1], m, layer.color.as_tuple())
