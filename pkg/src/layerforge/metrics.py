"""Layout and text quality metrics.

r_ali
    Mean of ``-log10(1 - a_i)`` over leaf layers, where ``a_i`` is the
    smallest distance (in canvas-normalized units) between any of layer i's
    six alignment lines (left, center-x, right, top, center-y, bottom) and the
    same line of any other leaf layer.
r_ove
    Mean over text-layer pairs of intersection area over the smaller area.
r_com
    Mean Sobel gradient magnitude of the grayscale background render inside
    text boxes. The render passed in should exclude text layers
    (``render(doc, assets, include_text=False)``).
char P/R/F
    Multiset character overlap, micro-averaged over documents.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .model import DesignDocument, leaf_boxes, text_boxes
from .render.raster import Raster, center_span

ALI_CLAMP = 1 - 1e-6


class ResolutionMismatch(ValueError):
    pass


def _axes(b, cw: float, ch: float) -> tuple[float, ...]:
    return (
        b.x / cw, (b.x + b.w / 2) / cw, (b.x + b.w) / cw,
        b.y / ch, (b.y + b.h / 2) / ch, (b.y + b.h) / ch,
    )


def r_ali(doc: DesignDocument) -> float:
    boxes = [b for b, _ in leaf_boxes(doc)]
    n = len(boxes)
    if n < 2:
        return 0.0
    ax = np.array([_axes(b, doc.canvas_width, doc.canvas_height) for b in boxes])  # (n, 6)
    diff = np.abs(ax[:, None, :] - ax[None, :, :])  # (n, n, 6)
    diff[np.arange(n), np.arange(n), :] = np.inf
    a = diff.min(axis=(1, 2))
    a = np.clip(a, 0.0, ALI_CLAMP)
    return float(np.mean(-np.log10(1 - a)))


def r_ove(doc: DesignDocument) -> float:
    boxes = [b for b, _ in text_boxes(doc)]
    vals = []
    for i in range(len(boxes)):
        for j in range(i + 1, len(boxes)):
            m = min(boxes[i].area, boxes[j].area)
            vals.append(boxes[i].intersection_area(boxes[j]) / m if m > 0 else 0.0)
    return float(sum(vals) / len(vals)) if vals else 0.0


def grayscale(r: Raster) -> np.ndarray:
    p = r.pixels.astype(np.float64)
    return 0.299 * p[..., 0] + 0.587 * p[..., 1] + 0.114 * p[..., 2]


def sobel_magnitude(gray: np.ndarray) -> np.ndarray:
    g = np.pad(gray, 1, mode="edge")
    tl, tc, tr = g[:-2, :-2], g[:-2, 1:-1], g[:-2, 2:]
    ml, mr = g[1:-1, :-2], g[1:-1, 2:]
    bl, bc, br = g[2:, :-2], g[2:, 1:-1], g[2:, 2:]
    gx = (tr + 2 * mr + br) - (tl + 2 * ml + bl)
    gy = (bl + 2 * bc + br) - (tl + 2 * tc + tr)
    return np.sqrt(gx * gx + gy * gy)


def text_region_mask(doc: DesignDocument) -> np.ndarray:
    """Pixels whose centers lie in some text layer's absolute box."""
    m = np.zeros((doc.canvas_height, doc.canvas_width), dtype=bool)
    for b, _ in text_boxes(doc):
        x0, x1 = center_span(b.x, b.w)
        y0, y1 = center_span(b.y, b.h)
        m[max(y0, 0):max(y1, 0), max(x0, 0):max(x1, 0)] = True
    return m


def r_com(doc: DesignDocument, rendered: Raster) -> float:
    if (rendered.width, rendered.height) != (doc.canvas_width, doc.canvas_height):
        raise ResolutionMismatch(
            f"render is {rendered.width}x{rendered.height}, canvas is {doc.canvas_width}x{doc.canvas_height}")
    m = text_region_mask(doc)
    if not m.any():
        return 0.0
    return float(sobel_magnitude(grayscale(rendered))[m].mean())


def _joined(s) -> str:
    return s if isinstance(s, str) else "".join(s)


def char_counts(predicted, reference) -> tuple[int, int, int]:
    """(matched, len(pred), len(ref)) for one document."""
    p, r = _joined(predicted), _joined(reference)
    matched = sum((Counter(p) & Counter(r)).values())
    return matched, len(p), len(r)


def _prf(matched: int, np_: int, nr: int) -> tuple[float, float, float]:
    if np_ == 0 and nr == 0:
        return 1.0, 1.0, 1.0
    p = matched / np_ if np_ else 0.0
    r = matched / nr if nr else 0.0
    f = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f


def char_prf(predicted: Sequence, reference: Sequence) -> tuple[float, float, float]:
    """Micro-averaged character precision, recall and F.

    Each element is one document: a string or a list of strings that are
    concatenated. Two single strings are accepted as one document.
    """
    if isinstance(predicted, str) and isinstance(reference, str):
        predicted, reference = [predicted], [reference]
    if len(predicted) != len(reference):
        raise ValueError("predicted and reference lists differ in length")
    if not predicted:
        return 0.0, 0.0, 0.0
    tm = tp = tr = 0
    for p, r in zip(predicted, reference):
        m, a, b = char_counts(p, r)
        tm, tp, tr = tm + m, tp + a, tr + b
    return _prf(tm, tp, tr)


def doc_text(doc: DesignDocument) -> list[str]:
    return [t.content for _, t in text_boxes(doc)]


@dataclass
class DocMetrics:
    r_ali: float
    r_ove: float
    r_com: float
    char_p: float | None = None
    char_r: float | None = None
    char_f: float | None = None
    name: str | None = None


@dataclass
class MetricsReport:
    r_ali: float = 0.0
    r_ove: float = 0.0
    r_com: float = 0.0
    char_p: float | None = 0.0
    char_r: float | None = 0.0
    char_f: float | None = 0.0
    per_document: list[DocMetrics] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def table(self) -> str:
        cols = ["Char-P", "Char-R", "Char-F", "R_ali", "R_ove", "R_com"]

        def fmt(v):
            return "-" if v is None else f"{v:.4f}"

        rows = [[""] + cols]
        for i, d in enumerate(self.per_document):
            rows.append([d.name or f"doc{i}"] + [fmt(v) for v in (d.char_p, d.char_r, d.char_f, d.r_ali, d.r_ove, d.r_com)])
        rows.append(["overall"] + [fmt(v) for v in (self.char_p, self.char_r, self.char_f, self.r_ali, self.r_ove, self.r_com)])
        widths = [max(len(r[i]) for r in rows) for i in range(len(cols) + 1)]
        lines = ["  ".join(c.rjust(widths[i]) if i else c.ljust(widths[i]) for i, c in enumerate(r)) for r in rows]
        return "\n".join(lines) + "\n"


def evaluate_set(docs: Sequence[DesignDocument], renders: Sequence[Raster], refs: Sequence | None = None,
                 names: Sequence[str] | None = None, enabled: dict | None = None) -> MetricsReport:
    """Per-document metrics and set aggregates.

    ``renders`` are background renders (text layers excluded). Layout metrics
    are averaged over documents; character metrics are micro-averaged over
    characters and stay ``None`` without references. ``enabled`` can switch
    individual metrics off (they then read 0).
    """
    if len(docs) != len(renders):
        raise ValueError(f"{len(docs)} documents but {len(renders)} renders")
    if refs is not None and len(refs) != len(docs):
        raise ValueError(f"{len(docs)} documents but {len(refs)} references")
    on = {"r_ali": True, "r_ove": True, "r_com": True, "char": True}
    on.update(enabled or {})
    use_char = refs is not None and on["char"]
    per = []
    tm = tp = tr = 0
    for i, (doc, ren) in enumerate(zip(docs, renders)):
        dm = DocMetrics(
            r_ali(doc) if on["r_ali"] else 0.0,
            r_ove(doc) if on["r_ove"] else 0.0,
            r_com(doc, ren) if on["r_com"] else 0.0,
            name=names[i] if names else None,
        )
        if use_char:
            m, a, b = char_counts(doc_text(doc), refs[i])
            dm.char_p, dm.char_r, dm.char_f = _prf(m, a, b)
            tm, tp, tr = tm + m, tp + a, tr + b
        per.append(dm)
    if not docs:
        return MetricsReport()
    n = len(docs)
    rep = MetricsReport(
        sum(d.r_ali for d in per) / n, sum(d.r_ove for d in per) / n, sum(d.r_com for d in per) / n,
        per_document=per,
    )
    if use_char:
        rep.char_p, rep.char_r, rep.char_f = _prf(tm, tp, tr)
    else:
        rep.char_p = rep.char_r = rep.char_f = None
    return rep

