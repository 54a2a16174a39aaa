import random

import pytest

from helpers import random_document
from layerforge.model import (
    AssetRef, BBox, Color, DesignDocument, FrameLayer, GraphicLayer, GroupLayer, ImageLayer,
    InvalidDocument, Orientation, TextLayer, VectorGraphic, VectorPath, ensure_valid, flatten,
    leaf_boxes, text_boxes, validate,
)


def doc_with(*children, w=100, h=80):
    return DesignDocument(w, h, FrameLayer("L0", BBox(0, 0, w, h), tuple(children)))


def rules(doc):
    return sorted(v.rule for v in validate(doc).violations)


def test_minimal_document_is_valid():
    assert validate(DesignDocument.empty(50, 50)).ok


def test_flatten_accumulates_container_offsets():
    t = TextLayer("t", BBox(1, 2, 3, 4), "hi")
    g = GroupLayer("g", BBox(10, 20, 50, 50), (t,))
    f = FrameLayer("f", BBox(5, 5, 60, 60), (g,))
    out = flatten(doc_with(f))
    assert [layer.id for _, layer in out] == ["L0", "f", "g", "t"]
    assert out[-1][0] == BBox(16, 27, 3, 4)


def test_leaf_and_text_boxes():
    t = TextLayer("t", BBox(0, 0, 10, 10), "x")
    empty = GroupLayer("g", BBox(0, 0, 5, 5))
    full = GroupLayer("h", BBox(0, 0, 5, 5), (t,))
    d = doc_with(empty, full)
    assert [layer.id for _, layer in leaf_boxes(d)] == ["g", "t"]
    assert [layer.id for _, layer in text_boxes(d)] == ["t"]


@pytest.mark.parametrize("layer, rule", [
    (TextLayer("t", BBox(0, 0, 0, 5), "x"), "bbox_positive"),
    (TextLayer("t", BBox(0, float("nan"), 1, 5), "x"), "bbox_finite"),
    (TextLayer("t", BBox(0, 0, 1, 5), ""), "text_nonempty"),
    (TextLayer("t", BBox(0, 0, 1, 5), "x", font_size=0), "font_size_positive"),
    (TextLayer("t", BBox(0, 0, 1, 5), "x", color=Color(0, 0, 300)), "color_range"),
    (TextLayer("t", BBox(0, 0, 1, 5), "x", h_align="middle"), "h_align"),
    (ImageLayer("i", BBox(0, 0, 1, 1), AssetRef("")), "asset_id_nonempty"),
    (ImageLayer("i", BBox(0, 0, 1, 1), "file.png"), "image_source"),
    (GraphicLayer("p", BBox(0, 0, 1, 1), VectorGraphic(0, 4)), "graphic_viewbox"),
    (GraphicLayer("p", BBox(0, 0, 1, 1), VectorGraphic(4, 4, (VectorPath(Color(0, 0, 0), ((0, 0), (1, 1))),))),
     "path_closed"),
    (GraphicLayer("p", BBox(0, 0, 1, 1), VectorGraphic(4, 4, (VectorPath(Color(0, 0, 0), ((0, 0), (5, 1), (1, 2))),))),
     "path_in_viewbox"),
    (TextLayer("", BBox(0, 0, 1, 5), "x"), "id_nonempty"),
])
def test_each_rule_reports(layer, rule):
    assert rule in rules(doc_with(layer))


def test_duplicate_ids_list_every_path():
    a = TextLayer("dup", BBox(0, 0, 1, 1), "a")
    b = TextLayer("dup", BBox(0, 0, 1, 1), "b")
    rep = validate(doc_with(a, GroupLayer("g", BBox(0, 0, 9, 9), (b,))))
    (v,) = [v for v in rep.violations if v.rule == "unique_id"]
    assert v.layer_id == "dup"
    assert v.paths == ("L0/0:dup", "L0/1:g/0:dup")


def test_root_rules():
    d = DesignDocument(10, 10, FrameLayer("L0", BBox(0, 0, 9, 10)))
    assert rules(d) == ["root_bbox"]
    assert "canvas_size" in rules(DesignDocument(0, 10, FrameLayer("L0", BBox(0, 0, 0, 10))))
    assert "root_frame" in rules(DesignDocument(10, 10, GroupLayer("L0", BBox(0, 0, 10, 10))))


def test_cycle_detected_without_recursion_blowup():
    g = GroupLayer("g", BBox(0, 0, 1, 1), ())
    object.__setattr__(g, "children", (g,))
    assert "no_cycles" in rules(doc_with(g))


def test_ensure_valid_raises_with_report():
    with pytest.raises(InvalidDocument) as ei:
        ensure_valid(doc_with(TextLayer("t", BBox(0, 0, 1, 1), "")))
    assert not ei.value.report.ok


def test_orientation_and_reverse():
    sq = VectorPath(Color(0, 0, 0), ((1, 0), (1, 1), (0, 1), (0, 0)))
    assert sq.signed_area() == 1.0
    assert sq.orientation is Orientation.CLOCKWISE
    assert sq.reversed().orientation is Orientation.COUNTERCLOCKWISE
    curve = VectorPath(Color(0, 0, 0), ((0, 0), (1, 0, 2, 1, 2, 2), (0, 2)))
    assert curve.reversed().reversed() == curve


def test_fill_groups_merge_consecutive_same_fill():
    red, blue = Color(255, 0, 0), Color(0, 0, 255)
    tri = ((0, 0), (1, 0), (0, 1))
    vg = VectorGraphic(2, 2, tuple(VectorPath(c, tri) for c in (red, red, blue, red)))
    assert [(c, len(ps)) for c, ps in vg.fill_groups()] == [(red, 2), (blue, 1), (red, 1)]


def test_color_hex():
    assert Color.from_hex("#112233").as_tuple() == (17, 34, 51, 255)
    assert Color.from_hex("11223344").to_hex() == "#11223344"
    with pytest.raises(ValueError):
        Color.from_hex("#12345")


def test_map_layers_keeps_structure():
    d = random_document(random.Random(3))
    same = d.map_layers(lambda layer: layer)
    assert same == d
    assert d.layer_count() == len(flatten(d))


def test_random_documents_validate():
    for s in range(50):
        assert validate(random_document(random.Random(s))).ok


def test_three_level_offsets_sum():
    leaf = TextLayer("t", BBox(0, 0, 1, 1), "x")
    g3 = GroupLayer("c", BBox(30, 0, 5, 5), (leaf,))
    g2 = GroupLayer("b", BBox(20, 0, 50, 5), (g3,))
    g1 = GroupLayer("a", BBox(10, 0, 90, 5), (g2,))
    assert flatten(doc_with(g1))[-1][0].x == 60
