"""Standardized token text for design documents.

A document is written as a flat, whitespace-separated sequence of reserved
special tokens (``<|frame|>`` ...), ``key=value`` attribute pairs and
escaped text spans::

    <|doc|> w=100 h=100 <|frame|> x=0 y=0 w=100 h=100 <|/frame|> <|/doc|>

``FORMAT.md`` in the repository holds the grammar and escaping table.
"""
from __future__ import annotations

import codecs
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Union

from .model import (
    AssetRef, BBox, Color, DesignDocument, FrameLayer, GenerationPlaceholder, GraphicLayer,
    GroupLayer, HAlign, ImageLayer, TextLayer, VAlign, ValidationReport,
    VectorGraphic, VectorPath, ensure_valid, validate,
)

VOCABULARY = frozenset({
    "doc", "/doc", "frame", "/frame", "group", "/group", "graphic",
    "text", "/text", "image", "image_gen", "image_des", "/image",
})
_TEXT_CONTEXTS = frozenset({"text", "image", "image_des"})
_NAME_CHARS = frozenset("abcdefghijklmnopqrstuvwxyz_/")
_KEY_CHARS = frozenset("abcdefghijklmnopqrstuvwxyz_")
_ESCAPABLE = frozenset('\\"<|=')
_MAX_NAME = 16


# --- tokens ---------------------------------------------------------------

@dataclass(frozen=True)
class SpecialToken:
    name: str
    offset: int = field(default=0, compare=False)

    def render(self) -> str:
        return f"<|{self.name}|>"


@dataclass(frozen=True)
class AttrPair:
    key: str
    value: str
    quoted: bool = False
    offset: int = field(default=0, compare=False)

    def render(self) -> str:
        if self.quoted:
            return f'{self.key}="{escape_quoted(self.value)}"'
        return f"{self.key}={self.value}"


@dataclass(frozen=True)
class TextSpan:
    text: str
    offset: int = field(default=0, compare=False)

    def render(self) -> str:
        return escape_text(self.text)


Token = Union[SpecialToken, AttrPair, TextSpan]


def render_tokens(tokens: Iterable[Token]) -> str:
    return " ".join(t.render() for t in tokens)


# --- errors ---------------------------------------------------------------

class ParseError(ValueError):
    """Base for codec errors; ``offset`` is a UTF-8 byte offset into the input."""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} (at byte {offset})")


class UnbalancedToken(ParseError):
    pass


class UnknownToken(ParseError):
    pass


class UnknownAttribute(ParseError):
    pass


class UnexpectedToken(ParseError):
    pass


class IncompleteToken(ParseError):
    pass


class MalformedValue(ParseError):
    pass


class MalformedNumber(MalformedValue):
    pass


class MissingAttribute(ParseError):
    def __init__(self, kind: str, key: str, offset: int):
        self.kind = kind
        self.key = key
        super().__init__(f"{kind} layer is missing attribute {key!r}", offset)


class InvariantViolation(ParseError):
    def __init__(self, report: ValidationReport, offset: int):
        self.report = report
        super().__init__("document violates invariants: " + "; ".join(str(v) for v in report.violations), offset)


# --- escaping -------------------------------------------------------------

_ATTR_LIKE = re.compile(r"[a-z_]+=")


def _escape_core(s: str, quote: bool) -> str:
    out = []
    n = len(s)
    for i, ch in enumerate(s):
        nxt = s[i + 1] if i + 1 < n else ""
        if ch == "\\" or (quote and ch == '"') or (ch == "<" and nxt == "|") or (ch == "|" and nxt == ">"):
            out.append("\\")
        out.append(ch)
    return "".join(out)


def escape_text(s: str) -> str:
    """Escape a text span so it lexes back to ``s``."""
    out = _escape_core(s, quote=False)
    m = _ATTR_LIKE.match(out)
    if m:
        # A span that starts like ``key=`` would be read as an attribute.
        out = out[:m.end() - 1] + "\\" + out[m.end() - 1:]
    return out


def escape_quoted(s: str) -> str:
    return _escape_core(s, quote=True)


def _unescape(raw: str, offset_of) -> str:
    if "\\" not in raw:
        return raw
    out = []
    i = 0
    while i < len(raw):
        ch = raw[i]
        if ch == "\\":
            if i + 1 >= len(raw) or raw[i + 1] not in _ESCAPABLE:
                raise MalformedValue("invalid escape sequence", offset_of(i))
            out.append(raw[i + 1])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


# --- lexer ----------------------------------------------------------------

class IncrementalTokenizer:
    """Chunk-fed lexer that emits each token once its bytes are complete.

    A token is held back while a longer continuation could still change it
    (a bare value or a text span at the end of the buffer, a half-seen
    ``<|``). Feed ``str`` or ``bytes`` chunks; bytes are decoded as UTF-8
    incrementally, so multi-byte characters may be split across chunks.
    Single consumer only.
    """

    def __init__(self):
        self._buf = ""
        self._base = 0          # byte offset of _buf[0]
        self._ctx = ""          # last special token name
        self._sep_pending = False
        self._decoder = codecs.getincrementaldecoder("utf-8")()
        self._done = False

    @property
    def context(self) -> str:
        return self._ctx

    def _off(self, i: int) -> int:
        return self._base + len(self._buf[:i].encode("utf-8"))

    def _consume(self, i: int) -> None:
        self._base += len(self._buf[:i].encode("utf-8"))
        self._buf = self._buf[i:]

    def feed(self, chunk: Union[str, bytes]) -> list[Token]:
        if self._done:
            raise RuntimeError("tokenizer already flushed")
        if isinstance(chunk, (bytes, bytearray)):
            chunk = self._decoder.decode(bytes(chunk))
        self._buf += chunk
        return self._drain(final=False)

    def flush(self) -> list[Token]:
        """Emit what remains; raise ``IncompleteToken`` on a dangling partial token."""
        tail = self._decoder.decode(b"", final=True)
        self._buf += tail
        toks = self._drain(final=True)
        self._done = True
        rest = self._buf
        stripped = rest.lstrip()
        if stripped:
            raise IncompleteToken("input ends inside a token", self._off(len(rest) - len(stripped)))
        return toks

    def _drain(self, final: bool) -> list[Token]:
        out: list[Token] = []
        while True:
            tok = self._next(final)
            if tok is None:
                return out
            out.append(tok)

    def _next(self, final: bool):
        buf = self._buf
        text_ok = self._ctx in _TEXT_CONTEXTS
        i = 0
        if text_ok:
            if self._sep_pending:
                if not buf:
                    return None
                if buf[0].isspace():
                    self._consume(1)
                    buf = self._buf
                self._sep_pending = False
            if not buf:
                return None
        else:
            while i < len(buf) and buf[i].isspace():
                i += 1
            if i:
                self._consume(i)
                buf = self._buf
                i = 0
            if not buf:
                return None

        if buf.startswith("<|"):
            return self._special(final)
        if buf == "<" and not final:
            return None
        j = 0
        while j < len(buf) and buf[j] in _KEY_CHARS:
            j += 1
        if j == len(buf) and not final:
            return None
        if j > 0 and j < len(buf) and buf[j] == "=":
            return self._attr(j, final)
        if text_ok:
            return self._text(final)
        end = j if j else 1
        while end < len(buf) and not buf[end].isspace() and not buf.startswith("<|", end):
            end += 1
        raise UnexpectedToken(f"unexpected text {buf[:end][:20]!r} outside a text span", self._off(0))

    def _special(self, final: bool):
        buf = self._buf
        j = 2
        while j < len(buf) and buf[j] in _NAME_CHARS:
            j += 1
        if j - 2 > _MAX_NAME:
            raise UnknownToken(f"malformed special token {buf[:12]!r}...", self._off(0))
        if j >= len(buf) or (buf[j] == "|" and j + 1 >= len(buf)):
            return None
        if buf.startswith("|>", j):
            name = buf[2:j]
            if name not in VOCABULARY:
                raise UnknownToken(f"unknown special token <|{name}|>", self._off(0))
            tok = SpecialToken(name, self._off(0))
            self._consume(j + 2)
            self._ctx = name
            self._sep_pending = True
            return tok
        raise UnknownToken(f"malformed special token {buf[:j + 1]!r}", self._off(0))

    def _attr(self, eq: int, final: bool):
        buf = self._buf
        key = buf[:eq]
        start = eq + 1
        if start < len(buf) and buf[start] == '"':
            k = start + 1
            while k < len(buf):
                c = buf[k]
                if c == "\\":
                    k += 2
                    continue
                if c == '"':
                    break
                if c == "<" and buf.startswith("<|", k):
                    raise MalformedValue(f"unterminated string value for {key!r}", self._off(start))
                k += 1
            if k >= len(buf):
                return None
            base = self._off(start + 1)
            raw = buf[start + 1:k]
            value = _unescape(raw, lambda p: base + len(raw[:p].encode("utf-8")))
            tok = AttrPair(key, value, True, self._off(0))
            self._consume(k + 1)
        else:
            k = start
            while k < len(buf) and not buf[k].isspace() and not buf.startswith("<|", k):
                k += 1
            if k >= len(buf):
                # More input could still extend a bare value.
                return None
            tok = AttrPair(key, buf[start:k], False, self._off(0))
            self._consume(k)
        self._sep_pending = True
        return tok

    def _text(self, final: bool):
        buf = self._buf
        k = 0
        while k < len(buf):
            c = buf[k]
            if c == "\\":
                if k + 1 >= len(buf):
                    return None
                k += 2
                continue
            if c == "<":
                if k + 1 >= len(buf):
                    return None
                if buf[k + 1] == "|":
                    break
            k += 1
        if k >= len(buf):
            return None
        raw = buf[:k]
        if raw and raw[-1].isspace():
            raw = raw[:-1]
        base = self._off(0)
        text = _unescape(raw, lambda p: base + len(raw[:p].encode("utf-8")))
        tok = TextSpan(text, base)
        self._consume(k)
        return tok


def tokenize(text: Union[str, bytes]) -> list[Token]:
    t = IncrementalTokenizer()
    toks = t.feed(text)
    toks.extend(t.flush())
    return toks


def tokenize_incremental(chunks: Iterable[Union[str, bytes]]):
    """Yield tokens as the chunks that complete them arrive."""
    t = IncrementalTokenizer()
    for chunk in chunks:
        yield from t.feed(chunk)
    yield from t.flush()


# --- values ---------------------------------------------------------------

_NUM = re.compile(r"-?\d+(\.\d+)?\Z")
_INT = re.compile(r"\d+\Z")
_COLOR = re.compile(r"#[0-9a-fA-F]{6}([0-9a-fA-F]{2})?\Z")


def fmt_num(v: float) -> str:
    """Base-10, at most two decimals, trailing zeros stripped."""
    if isinstance(v, int) and not isinstance(v, bool):
        return str(v)
    if not math.isfinite(v):
        raise ValueError(f"cannot serialize non-finite number {v!r}")
    s = f"{v:.2f}"
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    if s in ("-0", ""):
        s = "0"
    return s


def _num(tok: AttrPair) -> float:
    if tok.quoted or not _NUM.match(tok.value):
        raise MalformedNumber(f"{tok.key}={tok.value!r} is not a number", tok.offset)
    v = float(tok.value)
    if not math.isfinite(v) or abs(v) > 1e9:
        raise MalformedNumber(f"{tok.key}={tok.value!r} out of range", tok.offset)
    return int(tok.value) if "." not in tok.value else v


def _int(tok: AttrPair) -> int:
    if tok.quoted or not _INT.match(tok.value):
        raise MalformedNumber(f"{tok.key}={tok.value!r} is not a non-negative integer", tok.offset)
    v = int(tok.value)
    if v > 1_000_000:
        raise MalformedNumber(f"{tok.key}={tok.value!r} out of range", tok.offset)
    return v


def _color(tok: AttrPair) -> Color:
    if tok.quoted or not _COLOR.match(tok.value):
        raise MalformedValue(f"{tok.key}={tok.value!r} is not a #rrggbb[aa] color", tok.offset)
    return Color.from_hex(tok.value)


def _string(tok: AttrPair) -> str:
    if not tok.quoted:
        raise MalformedValue(f"{tok.key} expects a quoted string", tok.offset)
    return tok.value


def _enum(enum_cls):
    def conv(tok: AttrPair):
        try:
            return enum_cls(tok.value)
        except ValueError:
            allowed = "|".join(e.value for e in enum_cls)
            raise MalformedValue(f"{tok.key}={tok.value!r} not in {allowed}", tok.offset) from None
    return conv


_PATH_TOKEN = re.compile(r"[MLCZ]|-?\d+(?:\.\d+)?")


def format_path_d(nodes) -> str:
    """SVG-style path data for one closed loop."""
    if not nodes:
        return ""
    start = nodes[-1][-2:]
    parts = [f"M{fmt_num(start[0])} {fmt_num(start[1])}"]
    body = nodes[:-1] if len(nodes[-1]) == 2 else nodes
    for n in body:
        if len(n) == 2:
            parts.append(f"L{fmt_num(n[0])} {fmt_num(n[1])}")
        else:
            parts.append("C" + " ".join(fmt_num(v) for v in n))
    parts.append("Z")
    return "".join(parts)


def parse_path_d(d: str, offset: int = 0) -> tuple:
    items = _PATH_TOKEN.findall(d)
    if "".join(items) != re.sub(r"[\s,]+", "", d):
        raise MalformedValue(f"bad path data {d[:40]!r}", offset)
    cmds: list = []
    for it in items:
        if it in "MLCZ":
            cmds.append([it])
        else:
            if not cmds:
                raise MalformedValue("path data must start with M", offset)
            v = float(it)
            cmds[-1].append(int(it) if "." not in it else v)
    if not cmds or cmds[0][0] != "M" or len(cmds[0]) != 3 or cmds[-1] != ["Z"]:
        raise MalformedValue(f"path must be 'M x y ... Z': {d[:40]!r}", offset)
    start = (cmds[0][1], cmds[0][2])
    nodes = []
    for c in cmds[1:-1]:
        arity = {"L": 2, "C": 6}.get(c[0])
        if arity is None or len(c) != arity + 1:
            raise MalformedValue(f"bad path command {c[0]} in {d[:40]!r}", offset)
        nodes.append(tuple(c[1:]))
    if not nodes or tuple(nodes[-1][-2:]) != start:
        nodes.append(start)
    return tuple(nodes)


def format_paths(paths) -> str:
    return ";".join(f"{p.fill.to_hex()} {format_path_d(p.nodes)}" for p in paths)


def parse_paths(value: str, offset: int = 0) -> tuple[VectorPath, ...]:
    if not value.strip():
        return ()
    out = []
    for part in value.split(";"):
        part = part.strip()
        color, _, d = part.partition(" ")
        if not _COLOR.match(color):
            raise MalformedValue(f"bad path fill {color!r}", offset)
        out.append(VectorPath(Color.from_hex(color), parse_path_d(d, offset)))
    return tuple(out)


# --- attribute tables -----------------------------------------------------

_BOX = ("x", "y", "w", "h")
_COMMON_OPT = {"id": _string, "name": _string}
_ATTRS = {
    "frame": ({}, {"background": _color}),
    "group": ({}, {}),
    "graphic": ({"paths": _string, "view_h": _int, "view_w": _int}, {}),
    "text": ({"color": _color, "font_size": _num, "font_tag": _string,
              "h_align": _enum(HAlign), "v_align": _enum(VAlign)}, {}),
    "image": ({}, {}),
}


def _converter(kind: str, key: str):
    if kind == "doc":
        return _int
    if key in _BOX:
        return _num
    if key in _COMMON_OPT:
        return _COMMON_OPT[key]
    req, opt = _ATTRS[kind]
    return req.get(key) or opt[key]


# --- serializer -----------------------------------------------------------

def _kind_attrs(layer) -> dict:
    if isinstance(layer, FrameLayer):
        return {"background": AttrPair("background", layer.background.to_hex())} if layer.background else {}
    if isinstance(layer, GraphicLayer):
        g = layer.graphic
        return {
            "paths": AttrPair("paths", format_paths(g.paths), True),
            "view_h": AttrPair("view_h", str(g.view_h)),
            "view_w": AttrPair("view_w", str(g.view_w)),
        }
    if isinstance(layer, TextLayer):
        return {
            "color": AttrPair("color", layer.color.to_hex()),
            "font_size": AttrPair("font_size", fmt_num(layer.font_size)),
            "font_tag": AttrPair("font_tag", layer.font_tag, True),
            "h_align": AttrPair("h_align", HAlign(layer.h_align).value),
            "v_align": AttrPair("v_align", VAlign(layer.v_align).value),
        }
    return {}


def default_id(index: int) -> str:
    """Id given to the ``index``-th layer (pre-order) when none is written."""
    return f"L{index}"


def to_tokens(doc: DesignDocument) -> list[Token]:
    ensure_valid(doc)
    toks: list[Token] = [SpecialToken("doc"), AttrPair("w", str(doc.canvas_width)), AttrPair("h", str(doc.canvas_height))]
    counter = [0]

    def emit(layer):
        index = counter[0]
        counter[0] += 1
        kind = layer.kind
        toks.append(SpecialToken(kind))
        b = layer.bbox
        toks.extend(AttrPair(k, fmt_num(v)) for k, v in zip(_BOX, (b.x, b.y, b.w, b.h)))
        extra = _kind_attrs(layer)
        if layer.id != default_id(index):
            extra["id"] = AttrPair("id", layer.id, True)
        if layer.name is not None:
            extra["name"] = AttrPair("name", layer.name, True)
        toks.extend(extra[k] for k in sorted(extra))
        if isinstance(layer, (FrameLayer, GroupLayer)):
            for child in layer.children:
                emit(child)
            toks.append(SpecialToken("/" + kind))
        elif isinstance(layer, TextLayer):
            toks.append(TextSpan(layer.content))
            toks.append(SpecialToken("/text"))
        elif isinstance(layer, ImageLayer):
            if isinstance(layer.source, AssetRef):
                toks.append(TextSpan(layer.source.asset_id))
            else:
                toks.append(SpecialToken("image_gen"))
            toks.append(SpecialToken("image_des"))
            toks.append(TextSpan(layer.description_tag))
            toks.append(SpecialToken("/image"))

    emit(doc.root)
    toks.append(SpecialToken("/doc"))
    return toks


def serialize(doc: DesignDocument) -> str:
    """Canonical token text of ``doc``; byte-identical for equal documents."""
    return render_tokens(to_tokens(doc))


# --- parser ---------------------------------------------------------------

class _Node:
    __slots__ = ("kind", "attrs", "children", "phase", "text", "source", "tag", "index", "offset", "stage")

    def __init__(self, kind: str, index: int, offset: int):
        self.kind = kind
        self.attrs: dict[str, AttrPair] = {}
        self.children: list = []
        self.phase = "attrs"
        self.text: str | None = None
        self.source = None          # asset id str, or GenerationPlaceholder()
        self.tag: str | None = None
        self.index = index
        self.offset = offset
        self.stage = 0              # image: 0 source, 1 des seen, 2 tag seen; text: 0/1

    def bbox(self) -> BBox:
        return BBox(*(_num(self.attrs[k]) for k in _BOX))


class DocumentBuilder:
    """Push parser: feed tokens one at a time, then ``finish()``.

    Exposes the partially built tree so a generation session can inspect the
    image layer that is waiting for content.
    """

    def __init__(self):
        self._stack: list[_Node] = []
        self._doc: _Node | None = None
        self._closed = False
        self._count = 0
        self.last_offset = 0
        self.images: list[_Node] = []

    @property
    def current(self) -> _Node | None:
        return self._stack[-1] if self._stack else None

    @property
    def complete(self) -> bool:
        return self._closed

    @property
    def open_nodes(self) -> list[_Node]:
        return list(self._stack)

    @property
    def open_kinds(self) -> list[str]:
        return [n.kind for n in self._stack]

    def _end_attrs(self, node: _Node, offset: int) -> None:
        if node.phase != "attrs":
            return
        node.phase = "body"
        if node.kind == "doc":
            for k in ("w", "h"):
                if k not in node.attrs:
                    raise MissingAttribute("doc", k, offset)
            return
        required, _ = _ATTRS[node.kind]
        for k in (*_BOX, *sorted(required)):
            if k not in node.attrs:
                raise MissingAttribute(node.kind, k, offset)

    def _close_graphic(self, offset: int) -> None:
        top = self.current
        if top is not None and top.kind == "graphic":
            self._end_attrs(top, offset)
            self._stack.pop()

    def feed(self, tok: Token) -> None:
        self.last_offset = tok.offset
        if self._closed:
            raise UnexpectedToken("content after <|/doc|>", tok.offset)
        if isinstance(tok, AttrPair):
            self._attr(tok)
            return
        self._close_graphic(tok.offset)
        top = self.current
        if isinstance(tok, TextSpan):
            self._text(top, tok)
        else:
            self._special(top, tok)

    def _attr(self, tok: AttrPair) -> None:
        top = self.current
        if top is None:
            raise UnexpectedToken(f"attribute {tok.key!r} before <|doc|>", tok.offset)
        if top.phase != "attrs":
            raise UnexpectedToken(f"attribute {tok.key!r} after {top.kind} content", tok.offset)
        if top.kind == "doc":
            allowed = {"w", "h"}
        else:
            req, opt = _ATTRS[top.kind]
            allowed = set(_BOX) | set(req) | set(opt) | set(_COMMON_OPT)
        if tok.key not in allowed:
            raise UnknownAttribute(f"unknown attribute {tok.key!r} on {top.kind}", tok.offset)
        if tok.key in top.attrs:
            raise UnexpectedToken(f"duplicate attribute {tok.key!r}", tok.offset)
        _converter(top.kind, tok.key)(tok)
        top.attrs[tok.key] = tok

    def _text(self, top, tok: TextSpan) -> None:
        if top is not None and top.kind == "text" and top.stage == 0:
            self._end_attrs(top, tok.offset)
            top.text = tok.text
            top.stage = 1
            return
        if top is not None and top.kind == "image":
            self._end_attrs(top, tok.offset)
            if top.stage == 0 and top.source is None:
                top.source = tok.text
                return
            if top.stage == 1:
                top.tag = tok.text
                top.stage = 2
                return
        raise UnexpectedToken("text span not allowed here", tok.offset)

    def _special(self, top, tok: SpecialToken) -> None:
        name = tok.name
        if name.startswith("/"):
            kind = name[1:]
            if top is None or top.kind != kind:
                expected = f"<|/{top.kind}|>" if top is not None else "nothing open"
                raise UnbalancedToken(f"<|{name}|> does not close the open block ({expected})", tok.offset)
            self._end_attrs(top, tok.offset)
            if kind == "text" and top.stage != 1:
                raise UnexpectedToken("text block has no content", tok.offset)
            if kind == "image":
                if top.source is None:
                    raise UnexpectedToken("image block has no asset id or <|image_gen|>", tok.offset)
                if top.stage == 0:
                    raise UnexpectedToken("image block is missing <|image_des|>", tok.offset)
            if kind == "doc" and not top.children:
                raise UnexpectedToken("document has no root frame", tok.offset)
            self._stack.pop()
            if kind == "doc":
                self._closed = True
            return

        if name == "doc":
            if self._doc is not None or top is not None:
                raise UnexpectedToken("nested <|doc|>", tok.offset)
            self._doc = _Node("doc", -1, tok.offset)
            self._stack.append(self._doc)
            return
        if top is None:
            raise UnexpectedToken(f"<|{name}|> before <|doc|>", tok.offset)

        if name == "image_gen":
            if top.kind != "image" or top.stage != 0 or top.source is not None:
                raise UnexpectedToken("<|image_gen|> outside an image block", tok.offset)
            self._end_attrs(top, tok.offset)
            top.source = GenerationPlaceholder()
            return
        if name == "image_des":
            if top.kind != "image" or top.stage != 0:
                raise UnexpectedToken("<|image_des|> outside an image block", tok.offset)
            self._end_attrs(top, tok.offset)
            if top.source is None:
                raise UnexpectedToken("<|image_des|> before the image source", tok.offset)
            top.stage = 1
            return

        # opening a layer
        if top.kind == "doc":
            if name != "frame" or top.children:
                raise UnexpectedToken("a document holds exactly one root <|frame|>", tok.offset)
        elif top.kind not in ("frame", "group"):
            raise UnexpectedToken(f"<|{name}|> cannot appear inside {top.kind}", tok.offset)
        self._end_attrs(top, tok.offset)
        node = _Node(name, self._count, tok.offset)
        self._count += 1
        top.children.append(node)
        self._stack.append(node)
        if name == "image":
            self.images.append(node)

    def finish(self, end_offset: int | None = None) -> DesignDocument:
        end = self.last_offset if end_offset is None else end_offset
        if self._doc is None:
            raise UnexpectedToken("empty token stream", end)
        if not self._closed:
            raise UnbalancedToken(f"stream ends with open blocks {self.open_kinds}", end)
        doc = self.build()
        report = validate(doc)
        if not report.ok:
            raise InvariantViolation(report, self._doc.offset)
        return doc

    def build(self) -> DesignDocument:
        d = self._doc
        root = self._layer(d.children[0])
        return DesignDocument(_int(d.attrs["w"]), _int(d.attrs["h"]), root)

    def _layer(self, n: _Node):
        a = n.attrs
        lid = a["id"].value if "id" in a else default_id(n.index)
        name = a["name"].value if "name" in a else None
        for k in ("id", "name"):
            if k in a:
                _string(a[k])
        bbox = n.bbox()
        if n.kind == "frame":
            bg = _color(a["background"]) if "background" in a else None
            return FrameLayer(lid, bbox, tuple(self._layer(c) for c in n.children), bg, name)
        if n.kind == "group":
            return GroupLayer(lid, bbox, tuple(self._layer(c) for c in n.children), name)
        if n.kind == "graphic":
            paths = parse_paths(_string(a["paths"]), a["paths"].offset)
            return GraphicLayer(lid, bbox, VectorGraphic(_int(a["view_w"]), _int(a["view_h"]), paths), name)
        if n.kind == "text":
            conv = _ATTRS["text"][0]
            return TextLayer(
                lid, bbox, n.text,
                font_size=conv["font_size"](a["font_size"]),
                font_tag=conv["font_tag"](a["font_tag"]),
                color=conv["color"](a["color"]),
                h_align=conv["h_align"](a["h_align"]),
                v_align=conv["v_align"](a["v_align"]),
                name=name,
            )
        src = n.source if isinstance(n.source, GenerationPlaceholder) else AssetRef(n.source)
        return ImageLayer(lid, bbox, src, n.tag or "", name)


def parse_tokens(tokens: Iterable[Token], end_offset: int | None = None) -> DesignDocument:
    b = DocumentBuilder()
    for t in tokens:
        b.feed(t)
    return b.finish(end_offset)


def parse(text: Union[str, bytes]) -> DesignDocument:
    """Parse token text back into a validated document."""
    raw = text.encode("utf-8") if isinstance(text, str) else bytes(text)
    return parse_tokens(tokenize(raw), len(raw))


__all__ = [
    "AttrPair", "DocumentBuilder", "IncompleteToken", "IncrementalTokenizer", "InvariantViolation",
    "MalformedNumber", "MalformedValue", "MissingAttribute", "ParseError", "SpecialToken", "TextSpan",
    "Token", "UnbalancedToken", "UnexpectedToken", "UnknownAttribute", "UnknownToken", "VOCABULARY",
    "escape_text", "fmt_num", "parse", "parse_tokens", "render_tokens", "serialize", "to_tokens",
    "tokenize", "tokenize_incremental",
]
