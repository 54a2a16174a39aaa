import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import golden_check, random_document
from layerforge.buckets import DEFAULT_TABLE, assign
from layerforge.metrics import r_ove
from layerforge.model import AssetRef, GenerationPlaceholder, ImageLayer, validate
from layerforge.render import AssetStore, Raster, render
from layerforge.render.raster import round_half_up
from layerforge.session import (
    AWAITING_IMAGE, DONE, EMITTING, FAILED, MULTIMODAL, SINGLE_MODAL, CheckerboardProvider, FailingProvider,
    GradientProvider, InstructionRequest, OverrideTooLate, ProtocolViolation, ProviderError, RecordingProvider,
    ScriptedSource, Session, SessionFailed, SolidTagProvider, Truncated, UnusedOverride, chunked, run_session,
    template_source, template_stream,
)
from layerforge.tokens import ParseError, serialize


def img(x, y, w, h, tag=""):
    return f"<|image|> x={x} y={y} w={w} h={h} <|image_gen|> <|image_des|> {tag} <|/image|>"


def asset(x, y, w, h, aid, tag=""):
    return f"<|image|> x={x} y={y} w={w} h={h} {aid} <|image_des|> {tag} <|/image|>"


def text(x, y, w, h, s):
    return (f'<|text|> x={x} y={y} w={w} h={h} color=#000000 font_size=12 font_tag="sans" '
            f"h_align=left v_align=top {s} <|/text|>")


def doc(w, h, *body):
    return " ".join([f"<|doc|> w={w} h={h} <|frame|> x=0 y=0 w={w} h={h}", *body, "<|/frame|> <|/doc|>"])


def pieces(s, n):
    return [s[i:i + n] for i in range(0, len(s), n)]


class WrongSizeProvider(RecordingProvider):
    def draw(self, width, height, tag):
        return Raster.blank(width + 1, height, (0, 0, 0, 255))


PROVIDED = AssetStore()
PROVIDED_ID = PROVIDED.add(Raster.blank(8, 8, (9, 99, 199, 255)))

SINGLE = InstructionRequest("spring sale poster")
MULTI = InstructionRequest("use my photo", MULTIMODAL, ("Hello",), ((PROVIDED_ID, "photo"),))

THREE = doc(1000, 800, img(0, 0, 500, 750, "sky"), text(10, 10, 100, 20, "hi"), img(600, 0, 300, 300, "sun"),
            img(0, 760, 1000, 40, "strip"))

# name -> (request, chunks, provider, overrides, final state, expected provider calls)
SCRIPTS = {
    "no_images": (SINGLE, [doc(100, 100)], SolidTagProvider, {}, DONE, []),
    "no_images_bytewise": (SINGLE, list(doc(60, 40, text(0, 0, 60, 20, "a b"))), SolidTagProvider, {}, DONE, []),
    "one_image": (SINGLE, [doc(500, 750, img(0, 0, 500, 750, "object"))], SolidTagProvider, {}, DONE,
                  [(512, 768, "object")]),
    "one_image_split_marker": (SINGLE, ["<|doc|> w=500 h=750 <|frame|> x=0 y=0 w=500 h=750 <|image|> x=0 y=0 ",
                                        "w=500 h=750 <|image_g", "en|> <|image_", "des|> tall thing <|/ima",
                                        "ge|> <|/frame|> <|/doc|>"], SolidTagProvider, {}, DONE,
                               [(512, 768, "tall thing")]),
    "one_image_empty_tag": (SINGLE, [doc(300, 300, img(0, 0, 300, 300))], SolidTagProvider, {}, DONE,
                            [(512, 512, "")]),
    "one_image_nested": (SINGLE, [doc(400, 400, "<|group|> x=10 y=10 w=300 h=300", img(5, 5, 200, 100, "deep"),
                                      "<|/group|>")], GradientProvider, {}, DONE, [(704, 384, "deep")]),
    "three_images": (SINGLE, pieces(THREE, 7), SolidTagProvider, {}, DONE,
                     [(512, 768, "sky"), (512, 512, "sun"), (704, 384, "strip")]),
    "three_images_checkerboard": (SINGLE, [THREE], CheckerboardProvider, {}, DONE,
                                  [(512, 768, "sky"), (512, 512, "sun"), (704, 384, "strip")]),
    "override_first": (SINGLE, [doc(500, 750, img(0, 0, 500, 750, "object"))], SolidTagProvider,
                       {0: "landscape"}, DONE, [(512, 768, "landscape")]),
    "override_two": (SINGLE, [THREE], SolidTagProvider, {0: "night sky", 2: "ribbon"}, DONE,
                     [(512, 768, "night sky"), (512, 512, "sun"), (704, 384, "ribbon")]),
    "override_unused": (SINGLE, [doc(500, 750, img(0, 0, 500, 750, "object"))], SolidTagProvider,
                        {1: "never"}, FAILED, [(512, 768, "object")]),
    "stray_close_frame": (SINGLE, ["<|doc|> w=10 h=10 <|/frame|>"], SolidTagProvider, {}, FAILED, []),
    "unknown_token": (SINGLE, [doc(10, 10, "<|circle|>")], SolidTagProvider, {}, FAILED, []),
    "bad_attribute": (SINGLE, ["<|doc|> w=10 h=10 <|frame|> x=0 y=0 w=ten h=10 <|/frame|> <|/doc|>"],
                      SolidTagProvider, {}, FAILED, []),
    "incomplete_attribute": (SINGLE, ["<|doc|> w=10 h=10 <|frame|> x=0 y=0 w=10 h=10"], SolidTagProvider, {},
                             FAILED, []),
    "truncated_in_doc": (SINGLE, [doc(10, 10)[:-len(" <|/doc|>")]], SolidTagProvider, {}, FAILED, []),
    "truncated_awaiting_image": (SINGLE, ["<|doc|> w=10 h=10 <|frame|> x=0 y=0 w=10 h=10 <|image|> x=0 y=0 "
                                          "w=10 h=10 <|image_gen|> <|image_des|>"], SolidTagProvider, {},
                                 FAILED, []),
    "empty_stream": (SINGLE, [], SolidTagProvider, {}, FAILED, []),
    "invariant_at_end": (SINGLE, ["<|doc|> w=10 h=10 <|frame|> x=0 y=0 w=12 h=10 <|/frame|> <|/doc|>"],
                         SolidTagProvider, {}, FAILED, []),
    "provider_failure": (SINGLE, [doc(500, 750, img(0, 0, 500, 750, "object"))], FailingProvider, {}, FAILED,
                         None),
    "provider_wrong_size": (SINGLE, [doc(500, 750, img(0, 0, 500, 750, "object"))], WrongSizeProvider, {},
                            FAILED, [(512, 768, "object")]),
    "multimodal_assets_only": (MULTI, [doc(200, 200, asset(0, 0, 100, 100, PROVIDED_ID, "photo"),
                                           text(0, 120, 200, 40, "Hello"))], SolidTagProvider, {}, DONE, []),
    "multimodal_image_gen": (MULTI, [doc(200, 200, img(0, 0, 100, 100, "x"))], SolidTagProvider, {}, FAILED, []),
    "template_single": (InstructionRequest("Summer music festival tonight", width=500, height=750),
                        None, SolidTagProvider, {}, DONE, [(512, 768, "summer music festival tonight")]),
    "template_multimodal": (MULTI, None, GradientProvider, {}, DONE, []),
}


def run_script(name):
    req, chunks, make_provider, overrides, _state, _calls = SCRIPTS[name]
    source = template_source(req, 7) if chunks is None else ScriptedSource(chunks)
    provider = make_provider()
    s = Session(req, source, provider, assets=PROVIDED if req.mode == MULTIMODAL else None)
    for i, tag in overrides.items():
        s.override_tag(i, tag)
    while not s.finished:
        s.step()
    return s, provider, source


def test_script_count():
    assert len(SCRIPTS) >= 20


@pytest.mark.parametrize("name", sorted(SCRIPTS))
def test_script_matches_golden(name):
    _req, _chunks, _p, _o, state, calls = SCRIPTS[name]
    s, provider, source = run_script(name)
    assert s.state == state, s.error
    if calls is not None:
        assert provider.calls == calls
        assert s.provider_calls == len(calls)
    golden_check(f"session/{name}.jsonl", s.transcript_jsonl())
    if state == DONE:
        assert validate(s.document).ok
        render(s.document, s.assets)
        if s.req.mode == SINGLE_MODAL:
            assert [d for _, d in source.feedback] == [c[2] for c in calls]
        else:
            assert source.feedback == []


def test_expected_sizes_follow_bucket_table():
    for name, (_r, _c, _p, _o, _s, calls) in SCRIPTS.items():
        for w, h, _t in calls or []:
            assert assign(w, h) == f"{w}x{h}", name


def test_failure_reasons():
    reasons = {
        "stray_close_frame": ParseError, "unknown_token": ParseError, "bad_attribute": ParseError,
        "incomplete_attribute": ParseError, "truncated_in_doc": Truncated, "truncated_awaiting_image": Truncated, "empty_stream": Truncated,
        "override_unused": UnusedOverride, "provider_failure": ProviderError,
        "provider_wrong_size": ProviderError, "multimodal_image_gen": ProtocolViolation,
        "invariant_at_end": ParseError,
    }
    for name, exc in reasons.items():
        s, _p, _src = run_script(name)
        assert isinstance(s.error, exc), (name, s.error)
    s, _p, _src = run_script("stray_close_frame")
    assert s.error.offset == 18


def test_states_pause_and_resume():
    s = Session(SINGLE, ScriptedSource([doc(500, 750, img(0, 0, 500, 750, "a"))]), SolidTagProvider())
    seen = []
    while not s.finished:
        seen.append(s.step())
    assert AWAITING_IMAGE in seen
    i = seen.index(AWAITING_IMAGE)
    assert seen[i:].count(EMITTING) >= 1 and seen[-1] == DONE
    assert s.step() == DONE  # finished sessions stay put


def test_override_too_late():
    s = Session(SINGLE, ScriptedSource([THREE]), SolidTagProvider())
    while s.state != AWAITING_IMAGE:
        s.step()
    with pytest.raises(OverrideTooLate):
        s.override_tag(0, "late")
    s.override_tag(1, "fine")
    assert s.run() is not None


def test_override_changes_output():
    base, assets = run_session(SINGLE, ScriptedSource([doc(500, 750, img(0, 0, 500, 750, "object"))]),
                               SolidTagProvider())
    over, assets2 = run_session(SINGLE, ScriptedSource([doc(500, 750, img(0, 0, 500, 750, "object"))]),
                                SolidTagProvider(), overrides={0: "landscape"})
    assert render(base, assets).sha256() != render(over, assets2).sha256()
    assert over.root.children[0].description_tag == "landscape"


def test_run_raises_on_failure():
    with pytest.raises(SessionFailed) as ei:
        run_session(SINGLE, ScriptedSource(["<|doc|> w=10 h=10 <|/frame|>"]), SolidTagProvider())
    assert isinstance(ei.value.reason, ParseError)


def test_style_context_is_prefix_of_stream():
    p = SolidTagProvider()
    run_session(SINGLE, ScriptedSource([THREE]), p)
    assert len(p.contexts) == 3
    for ctx in p.contexts:
        assert ctx.startswith("<|doc|> w=1000 h=800")
        assert "<|image_gen|>" in ctx
    assert len(p.contexts[0]) < len(p.contexts[1]) < len(p.contexts[2])


def test_template_contracts():
    req = InstructionRequest("x", provided_texts=("One", "Two"))
    s = template_stream(req, 3)
    assert s == template_stream(req, 3)
    assert s.count("<|image_gen|>") == 1 and s.count("<|text|>") == 2
    m = template_stream(MULTI, 3)
    assert PROVIDED_ID in m and "<|image_gen|>" not in m
    assert "".join(chunked(s, 5)) == s


@pytest.mark.parametrize("provider", [SolidTagProvider, GradientProvider, CheckerboardProvider])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_template_end_to_end(provider, seed):
    req = InstructionRequest("Grand opening this weekend only", provided_texts=("Grand opening", "This weekend"))
    doc_, assets = run_session(req, template_source(req, seed), provider())
    assert validate(doc_).ok and r_ove(doc_) == 0
    img_ = doc_.root.children[0]
    assert isinstance(img_.source, AssetRef) and img_.source.asset_id in assets
    again, assets2 = run_session(req, template_source(req, seed), provider())
    assert render(doc_, assets).sha256() == render(again, assets2).sha256()


def test_multimodal_requires_content():
    with pytest.raises(ValueError):
        InstructionRequest("x", MULTIMODAL)


@given(st.integers(0, 2 ** 20), st.integers(1, 30))
@settings(max_examples=40, deadline=None)
def test_liveness_and_one_call_per_marker(seed, chunk):
    d = random_document(random.Random(seed))
    stream = serialize(d)
    p = SolidTagProvider()
    s = Session(SINGLE, ScriptedSource(pieces(stream, chunk)), p)
    out = s.run()
    markers = [layer for layer in d.walk() if isinstance(layer, ImageLayer)
               and isinstance(layer.source, GenerationPlaceholder)]
    assert len(p.calls) == stream.count("<|image_gen|>") == len(markers)
    for (w, h, tag), layer in zip(p.calls, markers):
        b = DEFAULT_TABLE[assign(max(1, round_half_up(layer.bbox.w)), max(1, round_half_up(layer.bbox.h)))]
        assert (w, h, tag) == (b.width, b.height, layer.description_tag)
    assert not any(isinstance(layer, ImageLayer) and isinstance(layer.source, GenerationPlaceholder)
                   for layer in out.walk())
    assert s.step() == DONE


def test_multimodal_never_calls_provider():
    for seed in range(20):
        p = SolidTagProvider()
        run_session(MULTI, template_source(MULTI, seed), p, assets=PROVIDED)
        assert p.calls == []
