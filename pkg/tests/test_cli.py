import json

import numpy as np
import pytest

from helpers import poster
from layerforge import docjson, tokens
from layerforge.cli import main
from layerforge.render import Raster, read_png, write_png

MINIMAL = "<|doc|> w=100 h=100 <|frame|> x=0 y=0 w=100 h=100 <|/frame|> <|/doc|>"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_bucket(capsys):
    assert run(capsys, "bucket", 500, 750) == (0, "512x768\n", "")
    code, out, _ = run(capsys, "bucket", 500, 750, "--table")
    assert code == 0 and "512x768" in out
    assert run(capsys, "bucket", 0, 5)[0] == 2


def test_tokens_roundtrip(tmp_path, capsys):
    src = tmp_path / "m.tokens"
    src.write_text(MINIMAL + "\n")
    js = tmp_path / "m.json"
    assert run(capsys, "tokens", "decode", src, "-o", js)[0] == 0
    assert docjson.loads(js.read_text()).canvas_width == 100
    code, out, _ = run(capsys, "tokens", "encode", js)
    assert code == 0 and out == MINIMAL + "\n"


def test_validate(tmp_path, capsys):
    good = tmp_path / "g.tokens"
    good.write_text(tokens.serialize(poster()))
    code, out, _ = run(capsys, "validate", good)
    assert code == 0 and out.startswith("ok 4")
    bad = tmp_path / "b.tokens"
    bad.write_text("<|doc|> w=10 h=10 <|/frame|>")
    code, _, err = run(capsys, "validate", bad)
    assert code == 1 and err.startswith("error:parse: offset 18")
    inv = tmp_path / "i.tokens"
    inv.write_text("<|doc|> w=10 h=10 <|frame|> x=0 y=0 w=11 h=10 <|/frame|> <|/doc|>")
    code, _, err = run(capsys, "validate", inv)
    assert code == 1 and err.startswith("violation:root_bbox")
    assert run(capsys, "validate", tmp_path / "missing")[0] == 1


def test_render(tmp_path, capsys):
    p = tmp_path / "p.json"
    p.write_text(docjson.dumps(poster()))
    code, out, _ = run(capsys, "render", p, "-o", tmp_path / "p.png")
    assert code == 0 and out.strip() == read_png(tmp_path / "p.png").sha256()
    code, _, _ = run(capsys, "render", p, "-o", tmp_path / "bg.png", "--no-text")
    assert code == 0 and read_png(tmp_path / "bg.png") != read_png(tmp_path / "p.png")


def test_vectorize(tmp_path, capsys):
    img = Raster.blank(10, 10, (255, 0, 0, 255))
    img.pixels[:, 5:] = (0, 0, 255, 255)
    write_png(img, tmp_path / "a.png")
    code, out, err = run(capsys, "vectorize", tmp_path / "a.png")
    assert code == 0 and out.count("<path") == 2 and "decision=vectorize" in err
    noise = np.random.default_rng(0).integers(0, 256, (20, 20, 4)).astype(np.uint8)
    noise[..., 3] = 255
    write_png(Raster(20, 20, noise), tmp_path / "n.png")
    code, _, err = run(capsys, "vectorize", tmp_path / "n.png")
    assert code == 1 and "error:not_simple" in err
    assert run(capsys, "vectorize", tmp_path / "n.png", "--force", "-k", 3, "-o", tmp_path / "n.svg")[0] == 0


def test_augment(tmp_path, capsys):
    p = tmp_path / "p.json"
    p.write_text(docjson.dumps(poster()))
    for mode in ("random", "semantic"):
        code, out, _ = run(capsys, "augment", p, "--mode", mode, "--seed", 3)
        assert code == 0
        got = [t.content for t in docjson.loads(out).text_layers()]
        assert [len(t) for t in got] == [len(t.content) for t in poster().text_layers()]
    code, out, _ = run(capsys, "augment", p, "--mode", "semantic", "--client", "wrong-length", "--format", "tokens")
    assert code == 0 and out.startswith("<|doc|>")


def test_generate_and_evaluate(tmp_path, capsys):
    out = tmp_path / "run"
    code, h, _ = run(capsys, "generate", "--instruction", "Summer fair", "--text", "Summer fair",
                     "--text", "Saturday", "--provider", "gradient", "--seed", 2, "-o", out)
    assert code == 0
    for name in ("stream.txt", "document.json", "render.png", "transcript.jsonl"):
        assert (out / name).exists()
    assert read_png(out / "render.png").sha256() == h.strip()
    code, h2, _ = run(capsys, "generate", "--instruction", "Summer fair", "--text", "Summer fair",
                      "--text", "Saturday", "--provider", "gradient", "--seed", 2, "-o", tmp_path / "again")
    assert h2 == h
    code, rep, _ = run(capsys, "evaluate", out)
    data = json.loads(rep)
    assert code == 0 and data["r_ove"] == 0 and len(data["per_document"]) == 1


def test_generate_multimodal_with_asset(tmp_path, capsys):
    write_png(Raster.blank(16, 16, (10, 20, 30, 255)), tmp_path / "photo.png")
    code, _, _ = run(capsys, "generate", "--instruction", "x", "--mode", "multimodal", "--asset",
                     tmp_path / "photo.png", "--text", "Hi", "-o", tmp_path / "mm")
    assert code == 0
    assert "<|image_gen|>" not in (tmp_path / "mm" / "stream.txt").read_text()


def test_generate_override_failures(tmp_path, capsys):
    code, _, err = run(capsys, "generate", "--instruction", "x", "--override", "3=sky", "-o", tmp_path / "o")
    assert code == 1 and "UnusedOverride" in err
    assert run(capsys, "generate", "--instruction", "x", "--override", "a=sky", "-o", tmp_path / "o")[0] == 2
    assert run(capsys, "generate", "--instruction", "x", "--mode", "multimodal", "-o", tmp_path / "o")[0] == 2


def test_evaluate_empty_dir_and_refs(tmp_path, capsys):
    code, out, _ = run(capsys, "evaluate", tmp_path)
    assert code == 0 and json.loads(out)["per_document"] == []
    (tmp_path / "a.json").write_text(docjson.dumps(poster()))
    (tmp_path / "refs.json").write_text(json.dumps({"a.json": ["BIG SALE"]}))
    code, out, _ = run(capsys, "evaluate", tmp_path, "-o", tmp_path / "r.json")
    assert code == 0 and "Char-F" in out
    assert json.loads((tmp_path / "r.json").read_text())["char_p"] is not None


def test_usage_errors(capsys, tmp_path):
    assert run(capsys)[0] == 2
    assert run(capsys, "nope")[0] == 2
    bad = tmp_path / "c.json"
    bad.write_text('{"x": 1}')
    code, _, err = run(capsys, "--config", bad, "bucket", 5, 5)
    assert code == 2 and err.startswith("error:config")


@pytest.mark.parametrize("argv", [["--help"], ["render", "--help"]])
def test_help_exits_zero(capsys, argv):
    assert run(capsys, *argv)[0] == 0
