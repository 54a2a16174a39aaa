import random
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import TEXT_ALPHABET, poster, random_document
from layerforge.augment import (
    AugmentLog, AugmentPolicy, ClientUnavailable, FlakyClient, MockParaphraseClient, TextGenClient,
    WrongLengthClient, augment, augment_random, augment_semantic, is_cjk, random_text,
)
from layerforge.model import BBox, DesignDocument, FrameLayer, TextLayer


def one_text(content):
    return DesignDocument(50, 50, FrameLayer("L0", BBox(0, 0, 50, 50), (TextLayer("L1", BBox(0, 0, 9, 9), content),)))


def text_of(doc):
    return [t.content for t in doc.text_layers()]


def case_shape(s):
    return ["U" if c.isupper() else "l" if c.islower() else "c" if is_cjk(c) else c for c in s]


def test_latin_case_and_punctuation():
    (out,) = text_of(augment_random(one_text("AB cd!"), AugmentPolicy(seed=4)))
    assert len(out) == 6 and out[2] == " " and out[5] == "!"
    assert case_shape(out) == ["U", "U", " ", "l", "l", "!"]


def test_cjk_stays_cjk():
    (out,) = text_of(augment_random(one_text("你好"), AugmentPolicy(seed=1)))
    assert len(out) == 2 and all(is_cjk(c) for c in out)


def test_same_seed_same_output():
    d = random_document(random.Random(7))
    p = AugmentPolicy(seed=9)
    assert augment_random(d, p) == augment_random(d, p)


def test_structure_is_untouched():
    d = poster()
    out = augment_random(d, AugmentPolicy(seed=2))
    assert [type(x) for x in out.walk()] == [type(x) for x in d.walk()]
    assert [x.bbox for x in out.walk()] == [x.bbox for x in d.walk()]


@given(st.text(alphabet=TEXT_ALPHABET, max_size=30), st.integers(0, 2 ** 32))
@settings(max_examples=200)
def test_random_text_invariants(s, seed):
    out = random_text(s, random.Random(seed))
    assert len(out) == len(s)
    assert case_shape(out) == case_shape(s)


def test_semantic_replaces_all_layers():
    d = poster()
    log = AugmentLog()
    out = augment_semantic(d, AugmentPolicy("semantic", 3), MockParaphraseClient(3), log)
    assert [len(t) for t in text_of(out)] == [len(t) for t in text_of(d)]
    assert sorted(log.accepted) == ["L2", "L3"] and log.fallback == []


def test_wrong_length_falls_back_to_random():
    d = poster()
    client = WrongLengthClient()
    log = AugmentLog()
    out = augment_semantic(d, AugmentPolicy("semantic", 3, max_retries=3), client, log)
    assert client.calls == 6
    assert sorted(log.fallback) == ["L2", "L3"]
    assert text_of(out) == text_of(augment_random(d, AugmentPolicy(seed=3)))


def test_flaky_transport_is_retried():
    log = AugmentLog()
    out = augment_semantic(poster(), AugmentPolicy("semantic", 0), FlakyClient(2), log)
    assert sorted(log.accepted) == ["L2", "L3"]
    assert [len(t) for t in text_of(out)] == [len(t) for t in text_of(poster())]


def test_unreachable_client_leaves_doc_unchanged():
    class Down(TextGenClient):
        def request(self, original, context, required_length):
            raise ClientUnavailable("down")

    d = poster()
    with pytest.warns(RuntimeWarning):
        out = augment(d, AugmentPolicy("semantic"), Down())
    assert out == d


def test_no_text_layers_is_noop():
    d = DesignDocument(10, 10, FrameLayer("L0", BBox(0, 0, 10, 10)))
    assert augment(d, AugmentPolicy("semantic"), WrongLengthClient()) == d
    assert augment(d, AugmentPolicy()) == d


def test_policy_validation():
    with pytest.raises(ValueError):
        AugmentPolicy("other")
    with pytest.raises(ValueError):
        AugmentPolicy(max_retries=0)
    with pytest.raises(ValueError):
        augment(poster(), AugmentPolicy("semantic"))


def test_retry_prompt_mentions_length():
    seen = []

    class Spy(TextGenClient):
        def request(self, original, context, required_length):
            seen.append((context, required_length))
            return original + "!!"

    with warnings.catch_warnings():
        warnings.simplefilter("error")
        augment_semantic(one_text("abc"), AugmentPolicy("semantic", max_retries=2), Spy())
    assert seen[0][1] == 3 and "exactly 3" in seen[1][0]
