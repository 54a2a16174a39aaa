"""Generation session: token stream in, document plus assets out.

A :class:`Session` pulls text chunks from a :class:`TokenSource`, tokenizes
them incrementally and feeds a :class:`~layerforge.tokens.DocumentBuilder`.
When an image layer asks for generation (``<|image_gen|>``) the session
stops emitting, reads the rest of that image layer to learn its description
tag, asks an :class:`ImageProvider` for a raster at the layer's bucket size,
stores it, and swaps the placeholder for the stored asset id.

States: ``Emitting`` -> (``AwaitingImage`` -> ``Emitting``)* -> ``Done``, or
``Failed`` from anywhere. A failed or finished session never moves again.
"""
from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .buckets import DEFAULT_TABLE, BucketTable, assign
from .model import (
    AssetRef, BBox, Color, DesignDocument, FrameLayer, GenerationPlaceholder, HAlign, ImageLayer,
    TextLayer, VAlign,
)
from .render.raster import AssetStore, Raster, round_half_up
from .render.text import fits
from .tokens import DocumentBuilder, IncrementalTokenizer, ParseError, SpecialToken, render_tokens, serialize

EMITTING = "Emitting"
AWAITING_IMAGE = "AwaitingImage"
DONE = "Done"
FAILED = "Failed"

SINGLE_MODAL = "single_modal"
MULTIMODAL = "multimodal"


class SessionError(Exception):
    def __init__(self, message: str = "", offset: int | None = None):
        super().__init__(message)
        self.offset = offset


class ProviderError(SessionError):
    pass


class Truncated(SessionError):
    pass


class ProtocolViolation(SessionError):
    pass


class OverrideTooLate(SessionError):
    pass


class UnusedOverride(SessionError):
    pass


class SessionFailed(SessionError):
    def __init__(self, reason: BaseException):
        super().__init__(f"{type(reason).__name__}: {reason}", getattr(reason, "offset", None))
        self.reason = reason


@dataclass(frozen=True)
class InstructionRequest:
    instruction: str
    mode: str = SINGLE_MODAL
    provided_texts: tuple[str, ...] = ()
    provided_assets: tuple[tuple[str, str], ...] = ()  # (asset_id, description)
    width: int = 500
    height: int = 750

    def __post_init__(self):
        if self.mode not in (SINGLE_MODAL, MULTIMODAL):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == MULTIMODAL and not (self.provided_texts or self.provided_assets):
            raise ValueError("multimodal requests need provided texts or assets")
        if self.width < 1 or self.height < 1:
            raise ValueError("canvas size must be positive")


class TokenSource:
    def next_chunk(self) -> str | None:
        """Next piece of token text, or None at end of stream."""
        raise NotImplementedError

    def accept_image_feedback(self, asset_id: str, description: str) -> None:
        pass


class ImageProvider:
    def generate(self, width: int, height: int, description_tag: str, style_context: str) -> Raster:
        raise NotImplementedError


class Session:
    def __init__(self, req: InstructionRequest, source: TokenSource, provider: ImageProvider,
                 table: BucketTable = DEFAULT_TABLE, assets: AssetStore | None = None):
        self.req = req
        self.mode = req.mode
        self.source = source
        self.provider = provider
        self.table = table
        self.assets = AssetStore(assets or {})
        self.state = EMITTING
        self.error: BaseException | None = None
        self.document: DesignDocument | None = None
        self.override_tags: dict[int, str] = {}
        self.transcript: list[dict] = []
        self.provider_calls = 0
        self._tok = IncrementalTokenizer()
        self._builder = DocumentBuilder()
        self._queue: list = []
        self._fed: list = []
        self._eos = False
        self._pauses = 0          # <|image_gen|> tokens seen
        self._pending = None      # image node waiting for its raster
        self._pending_index = -1
        self._log("start", mode=self.mode)

    # -- public -------------------------------------------------------------

    def override_tag(self, image_index: int, tag: str) -> None:
        if image_index < self._pauses:
            raise OverrideTooLate(f"image {image_index} was already reached")
        self.override_tags[image_index] = tag
        self._log("override", image_index=image_index, tag=tag)

    @property
    def finished(self) -> bool:
        return self.state in (DONE, FAILED)

    def step(self) -> str:
        """Advance by one token (or one chunk read); returns the new state."""
        if self.finished:
            return self.state
        try:
            self._step()
        except (ParseError, SessionError) as e:
            self._fail(e)
        return self.state

    def run(self) -> DesignDocument:
        while not self.finished:
            self.step()
        if self.state == FAILED:
            raise SessionFailed(self.error)
        return self.document

    def transcript_jsonl(self) -> str:
        return "".join(json.dumps(e, sort_keys=True, ensure_ascii=False) + "\n" for e in self.transcript)

    # -- internals ----------------------------------------------------------

    def _log(self, event: str, **kw) -> None:
        self.transcript.append({"seq": len(self.transcript), "event": event, **kw})

    def _goto(self, state: str, offset: int | None = None, **kw) -> None:
        self._log("transition", frm=self.state, to=state, offset=offset, **kw)
        self.state = state

    def _fail(self, err: BaseException) -> None:
        self.error = err
        self._goto(FAILED, getattr(err, "offset", None), error=type(err).__name__, message=str(err))

    def _next_token(self):
        while not self._queue:
            if self._eos:
                return None
            chunk = self.source.next_chunk()
            if chunk is None:
                self._eos = True
                self._queue.extend(self._tok.flush())
            else:
                self._queue.extend(self._tok.feed(chunk))
        return self._queue.pop(0)

    def _step(self) -> None:
        tok = self._next_token()
        if tok is None:
            self._finalize()
            return
        self._builder.feed(tok)
        self._fed.append(tok)
        if isinstance(tok, SpecialToken) and tok.name == "image_gen":
            if self.mode == MULTIMODAL:
                raise ProtocolViolation("<|image_gen|> in multimodal mode", tok.offset)
            self._pending = self._builder.current
            self._pending_index = self._pauses
            self._pauses += 1
            self._goto(AWAITING_IMAGE, tok.offset, image_index=self._pending_index)
            return
        if self.state == AWAITING_IMAGE and self._pending not in self._builder.open_nodes:
            self._generate(tok.offset)
            self._goto(EMITTING, tok.offset)

    def _generate(self, offset: int) -> None:
        node = self._pending
        idx = self._pending_index
        bbox = node.bbox()
        w, h = max(1, round_half_up(bbox.w)), max(1, round_half_up(bbox.h))
        bucket = self.table[assign(w, h, self.table)]
        tag = self.override_tags.pop(idx, node.tag or "")
        node.tag = tag
        context = render_tokens(self._fed)
        self.provider_calls += 1
        try:
            img = self.provider.generate(bucket.width, bucket.height, tag, context)
        except Exception as e:  # provider implementations are untrusted
            raise ProviderError(f"provider failed for image {idx}: {e}", offset) from e
        if not isinstance(img, Raster) or (img.width, img.height) != (bucket.width, bucket.height):
            got = f"{img.width}x{img.height}" if isinstance(img, Raster) else type(img).__name__
            raise ProviderError(f"provider returned {got}, expected {bucket.width}x{bucket.height}", offset)
        aid = self.assets.add(img)
        node.source = aid
        self._pending = None
        self._log("provider_call", image_index=idx, layer_w=w, layer_h=h, bucket=bucket.id,
                  width=bucket.width, height=bucket.height, tag=tag, asset_id=aid, offset=offset)
        if self.mode == SINGLE_MODAL:
            self.source.accept_image_feedback(aid, tag)

    def _finalize(self) -> None:
        end = self._builder.last_offset
        if self.state == AWAITING_IMAGE or not self._builder.complete:
            raise Truncated(f"stream ended inside open blocks {self._builder.open_kinds}", end)
        if self.override_tags:
            raise UnusedOverride(f"overrides for images {sorted(self.override_tags)} were never used")
        self.document = self._builder.finish(end)
        self._goto(DONE, end, layers=self.document.layer_count(), assets=len(self.assets))


def run_session(req: InstructionRequest, source: TokenSource, provider: ImageProvider,
                table: BucketTable = DEFAULT_TABLE, assets: AssetStore | None = None,
                overrides: dict[int, str] | None = None) -> tuple[DesignDocument, AssetStore]:
    s = Session(req, source, provider, table, assets)
    for i, tag in sorted((overrides or {}).items()):
        s.override_tag(i, tag)
    doc = s.run()
    return doc, s.assets


# -- mock sources and providers ----------------------------------------------

class ScriptedSource(TokenSource):
    def __init__(self, chunks: Sequence[str]):
        self.chunks = list(chunks)
        self.pos = 0
        self.feedback: list[tuple[str, str]] = []

    def next_chunk(self) -> str | None:
        if self.pos >= len(self.chunks):
            return None
        self.pos += 1
        return self.chunks[self.pos - 1]

    def accept_image_feedback(self, asset_id: str, description: str) -> None:
        self.feedback.append((asset_id, description))


class RecordingProvider(ImageProvider):
    def __init__(self):
        self.calls: list[tuple[int, int, str]] = []
        self.contexts: list[str] = []

    def generate(self, width, height, description_tag, style_context):
        self.calls.append((width, height, description_tag))
        self.contexts.append(style_context)
        return self.draw(width, height, description_tag)

    def draw(self, width: int, height: int, tag: str) -> Raster:
        raise NotImplementedError


def tag_color(tag: str) -> tuple[int, int, int]:
    d = hashlib.sha256(tag.encode("utf-8")).digest()
    return d[0], d[1], d[2]


class SolidTagProvider(RecordingProvider):
    """Solid fill whose color is a hash of the description tag."""

    def draw(self, width, height, tag):
        return Raster.blank(width, height, (*tag_color(tag), 255))


class GradientProvider(RecordingProvider):
    """Vertical gradient between two seeded colors."""

    def __init__(self, seed: int = 0):
        super().__init__()
        self.seed = seed

    def draw(self, width, height, tag):
        rng = random.Random(f"{self.seed}:{tag}")
        a = np.array([rng.randrange(256) for _ in range(3)], dtype=np.int64)
        b = np.array([rng.randrange(256) for _ in range(3)], dtype=np.int64)
        t = np.arange(height, dtype=np.int64)[:, None]
        den = max(height - 1, 1)
        rows = (a * (den - t) + b * t + den // 2) // den
        px = np.empty((height, width, 4), dtype=np.uint8)
        px[..., :3] = rows[:, None, :]
        px[..., 3] = 255
        return Raster(width, height, px)


class CheckerboardProvider(RecordingProvider):
    def __init__(self, cell: int = 32, colors=((0, 0, 0), (255, 255, 255))):
        super().__init__()
        self.cell = cell
        self.colors = colors

    def draw(self, width, height, tag):
        yy, xx = np.mgrid[0:height, 0:width]
        odd = ((yy // self.cell + xx // self.cell) % 2).astype(bool)
        px = np.empty((height, width, 4), dtype=np.uint8)
        px[~odd, :3] = self.colors[0]
        px[odd, :3] = self.colors[1]
        px[..., 3] = 255
        return Raster(width, height, px)


class FailingProvider(ImageProvider):
    def generate(self, width, height, description_tag, style_context):
        raise RuntimeError("backend unavailable")


# -- template source ----------------------------------------------------------

_FONT_SIZES = (64, 56, 48, 40, 36, 32, 28, 24, 20, 18, 16, 14, 12, 10, 8, 6, 4)
_BACKGROUNDS = ((245, 240, 230), (30, 40, 60), (250, 250, 250), (20, 20, 20), (235, 225, 245), (210, 230, 220))


def _template_texts(req: InstructionRequest) -> list[str]:
    if req.provided_texts:
        return list(req.provided_texts)
    words = req.instruction.split()
    if not words:
        return ["Untitled"]
    if len(words) <= 3:
        return [" ".join(words)]
    return [" ".join(words[:3]), " ".join(words[3:])]


def _tag_from(instruction: str) -> str:
    words = [w.strip(".,;:!?").lower() for w in instruction.split()]
    words = [w for w in words if w]
    return " ".join(words[:4]) or "background"


def _fit_size(text: str, w: float, h: float, rng: random.Random) -> int:
    ok = [s for s in _FONT_SIZES if fits(text, s, w, h)]
    if not ok:
        return _FONT_SIZES[-1]
    # the largest that fits, or occasionally one step down
    return ok[min(len(ok) - 1, rng.choice((0, 0, 1)))]


def template_document(req: InstructionRequest, seed: int = 0) -> DesignDocument:
    """Document the template source would emit (placeholders unresolved)."""
    rng = random.Random(seed)
    W, H = req.width, req.height
    bg = rng.choice(_BACKGROUNDS)
    dark = sum(bg) < 384
    ink = Color(250, 250, 250) if dark else Color(20, 20, 30)
    margin = max(1, round_half_up(min(W, H) * 0.06))
    children = []
    band_top = margin
    if req.mode == SINGLE_MODAL:
        children.append(ImageLayer("L1", BBox(0, 0, W, H), GenerationPlaceholder(), _tag_from(req.instruction)))
    elif req.provided_assets:
        n = len(req.provided_assets)
        area_h = round_half_up((H - 2 * margin) * 0.4)
        gap = margin // 2
        col_w = (W - 2 * margin - gap * (n - 1)) / n
        for i, (aid, desc) in enumerate(req.provided_assets):
            x = round_half_up(margin + i * (col_w + gap))
            children.append(ImageLayer("", BBox(x, margin, max(1, round_half_up(col_w)), area_h), AssetRef(aid), desc))
        band_top = margin + area_h + gap
    texts = _template_texts(req) if (req.mode == SINGLE_MODAL or req.provided_texts) else []
    if texts:
        band_h = H - margin - band_top
        row_h = band_h / len(texts)
        pad = max(1, round_half_up(row_h * 0.08))
        for i, t in enumerate(texts):
            y0 = round_half_up(band_top + i * row_h)
            y1 = round_half_up(band_top + (i + 1) * row_h) - pad
            bw, bh = W - 2 * margin, max(1, y1 - y0)
            size = _fit_size(t, bw, bh, rng)
            children.append(TextLayer("", BBox(margin, y0, bw, bh), t, font_size=size, color=ink,
                                      h_align=HAlign.CENTER, v_align=VAlign.MIDDLE))
    # default ids follow preorder numbering
    children = [replace(c, id=f"L{i + 1}") for i, c in enumerate(children)]
    root = FrameLayer("L0", BBox(0, 0, W, H), tuple(children), Color(*bg))
    return DesignDocument(W, H, root)


def template_stream(req: InstructionRequest, seed: int = 0) -> str:
    return serialize(template_document(req, seed))


def chunked(text: str, seed: int, lo: int = 1, hi: int = 24) -> list[str]:
    rng = random.Random(seed ^ 0x5EED)
    out, i = [], 0
    while i < len(text):
        n = rng.randint(lo, hi)
        out.append(text[i:i + n])
        i += n
    return out


def template_source(req: InstructionRequest, seed: int = 0) -> ScriptedSource:
    """Deterministic stand-in generator: a centered vertical text grid over a
    generated background (single-modal) or the provided assets (multimodal)."""
    return ScriptedSource(chunked(template_stream(req, seed), seed))


__all__ = [
    "AWAITING_IMAGE", "DONE", "EMITTING", "FAILED", "MULTIMODAL", "SINGLE_MODAL",
    "CheckerboardProvider", "FailingProvider", "GradientProvider", "ImageProvider", "InstructionRequest",
    "OverrideTooLate", "ProtocolViolation", "ProviderError", "RecordingProvider", "ScriptedSource",
    "Session", "SessionError", "SessionFailed", "SolidTagProvider", "TokenSource", "Truncated",
    "UnusedOverride", "chunked", "run_session", "tag_color", "template_document", "template_source",
    "template_stream",
]
