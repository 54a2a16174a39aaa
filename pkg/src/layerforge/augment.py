"""Length-preserving text augmentation.

Random mode swaps every CJK character for a random CJK character and every
Latin word for random letters with the same case pattern. Semantic mode asks
a text-generation client for a replacement and only accepts answers with the
exact original length (in code points), falling back to random mode when
the client keeps missing.
"""
from __future__ import annotations

import hashlib
import random
import string
import warnings
from dataclasses import dataclass, field, replace

from .model import DesignDocument, TextLayer

CJK_RANGES = ((0x4E00, 0x9FFF), (0x3400, 0x4DBF), (0xF900, 0xFAFF))
CJK_DRAW = (0x4E00, 0x9FFF)


def is_cjk(ch: str) -> bool:
    o = ord(ch)
    return any(lo <= o <= hi for lo, hi in CJK_RANGES)


def is_word_char(ch: str) -> bool:
    return ch in string.ascii_letters


@dataclass(frozen=True)
class AugmentPolicy:
    mode: str = "random"  # "random" | "semantic"
    seed: int = 0
    max_retries: int = 3
    cjk_ranges: tuple = CJK_RANGES

    def __post_init__(self):
        if self.mode not in ("random", "semantic"):
            raise ValueError(f"unknown augmentation mode {self.mode!r}")
        if self.max_retries < 1:
            raise ValueError("max_retries must be >= 1")


class ClientUnavailable(Exception):
    """The text-generation backend could not be reached."""


class TextGenClient:
    def request(self, original: str, context: str, required_length: int) -> str:
        raise NotImplementedError


def random_text(text: str, rng: random.Random) -> str:
    out = []
    for ch in text:
        if is_cjk(ch):
            out.append(chr(rng.randint(*CJK_DRAW)))
        elif is_word_char(ch):
            c = rng.choice(string.ascii_lowercase)
            out.append(c.upper() if ch.isupper() else c)
        else:
            out.append(ch)
    return "".join(out)


def _layer_rng(seed: int, index: int, layer_id: str) -> random.Random:
    # one stream per text layer so results don't depend on other layers' retries
    h = hashlib.sha256(f"{seed}:{index}:{layer_id}".encode()).digest()
    return random.Random(int.from_bytes(h[:8], "big"))


def _replace_texts(doc: DesignDocument, fn) -> DesignDocument:
    counter = iter(range(1 << 30))

    def visit(layer):
        if isinstance(layer, TextLayer):
            i = next(counter)
            return replace(layer, content=fn(i, layer))
        return layer

    return doc.map_layers(visit)


def augment_random(doc: DesignDocument, policy: AugmentPolicy = AugmentPolicy()) -> DesignDocument:
    return _replace_texts(doc, lambda i, t: random_text(t.content, _layer_rng(policy.seed, i, t.id)))


@dataclass
class AugmentLog:
    accepted: list = field(default_factory=list)   # layer ids replaced by the client
    fallback: list = field(default_factory=list)   # layer ids that fell back to random
    attempts: dict = field(default_factory=dict)   # layer id -> client calls


def _request(client: TextGenClient, original: str, ctx: str, want: int, tries: int) -> str:
    # transport failures are retried; only the last one propagates
    for t in range(tries):
        try:
            return client.request(original, ctx, want)
        except ClientUnavailable:
            if t == tries - 1:
                raise
    raise AssertionError("unreachable")


def augment_semantic(doc: DesignDocument, policy: AugmentPolicy, client: TextGenClient,
                     log: AugmentLog | None = None) -> DesignDocument:
    log = log if log is not None else AugmentLog()
    texts = [t.content for t in doc.text_layers()]

    def ask(i, layer):
        want = len(layer.content)
        ctx = " | ".join(texts)
        for attempt in range(policy.max_retries):
            if attempt:
                ctx = f"{ctx}\n[required length: exactly {want} characters]"
            log.attempts[layer.id] = attempt + 1
            cand = _request(client, layer.content, ctx, want, policy.max_retries)
            if isinstance(cand, str) and len(cand) == want:
                log.accepted.append(layer.id)
                return cand
        log.fallback.append(layer.id)
        return random_text(layer.content, _layer_rng(policy.seed, i, layer.id))

    try:
        return _replace_texts(doc, ask)
    except ClientUnavailable as e:
        warnings.warn(f"text generation unavailable, document left unchanged: {e}", RuntimeWarning, stacklevel=2)
        return doc


def augment(doc: DesignDocument, policy: AugmentPolicy, client: TextGenClient | None = None) -> DesignDocument:
    if policy.mode == "semantic":
        if client is None:
            raise ValueError("semantic augmentation needs a client")
        return augment_semantic(doc, policy, client)
    return augment_random(doc, policy)


# -- mock clients -----------------------------------------------------------

class MockParaphraseClient(TextGenClient):
    """Seeded stand-in that always answers with the requested length."""

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.calls = 0

    def request(self, original: str, context: str, required_length: int) -> str:
        self.calls += 1
        rng = _layer_rng(self.seed, self.calls, original)
        return random_text(original, rng)


class WrongLengthClient(TextGenClient):
    """Always answers one character too long."""

    def __init__(self):
        self.calls = 0

    def request(self, original: str, context: str, required_length: int) -> str:
        self.calls += 1
        return original + "x"


class FlakyClient(TextGenClient):
    """Raises ClientUnavailable for the first ``failures`` calls, then delegates."""

    def __init__(self, failures: int, inner: TextGenClient | None = None):
        self.failures = failures
        self.inner = inner or MockParaphraseClient()
        self.calls = 0

    def request(self, original: str, context: str, required_length: int) -> str:
        self.calls += 1
        if self.calls <= self.failures:
            raise ClientUnavailable(f"transport failure {self.calls}")
        return self.inner.request(original, context, required_length)
