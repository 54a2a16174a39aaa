"""``layerforge`` command line.

Exit codes: 0 success, 1 invalid input (parse or validation failure, failed
session), 2 usage error. Diagnostics go to stderr as ``error:<kind>: message``.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import config as config_mod
from . import docjson, tokens
from .augment import AugmentPolicy, MockParaphraseClient, WrongLengthClient, augment
from .buckets import assign, format_assignments
from .metrics import evaluate_set
from .model import InvalidDocument, validate
from .render import AssetStore, read_png, render, write_png
from .render.render import RenderError
from .session import (
    MULTIMODAL, SINGLE_MODAL, CheckerboardProvider, GradientProvider, InstructionRequest, Session,
    SolidTagProvider, template_source,
)
from .vectorizer import assess_simplicity, emit_svg, vectorize

PROVIDERS = {
    "solid": lambda seed: SolidTagProvider(),
    "gradient": lambda seed: GradientProvider(seed),
    "checkerboard": lambda seed: CheckerboardProvider(),
}


class CliError(Exception):
    def __init__(self, kind: str, message: str, code: int = 1):
        super().__init__(message)
        self.kind = kind
        self.code = code


def load_document(path: str):
    """JSON document or token text, chosen by content."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise CliError("io", f"{path}: {e.strerror}") from None
    try:
        if text.lstrip().startswith("{"):
            return docjson.loads(text)
        return tokens.parse(text)
    except docjson.DocumentFormatError as e:
        raise CliError("format", f"{path}: {e}") from None
    except tokens.InvariantViolation as e:
        raise CliError("validation", f"{path}: {e}") from None
    except tokens.ParseError as e:
        raise CliError("parse", f"{path}: offset {e.offset}: {e}") from None


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_validate(a, cfg):
    try:
        text = Path(a.doc).read_text(encoding="utf-8")
        doc = docjson.loads(text) if text.lstrip().startswith("{") else tokens.parse(text)
    except OSError as e:
        raise CliError("io", f"{a.doc}: {e.strerror}") from None
    except tokens.InvariantViolation as e:
        for v in e.report.violations:
            print(f"violation:{v.rule}: {v}", file=sys.stderr)
        return 1
    except docjson.DocumentFormatError as e:
        raise CliError("format", str(e)) from None
    except tokens.ParseError as e:
        raise CliError("parse", f"offset {e.offset}: {e}") from None
    report = validate(doc)
    if not report.ok:
        for v in report.violations:
            print(f"violation:{v.rule}: {v}", file=sys.stderr)
        return 1
    print(f"ok {doc.layer_count()} layers")
    return 0


def cmd_tokens(a, cfg):
    src = sys.stdin.read() if a.input == "-" else None
    if a.action == "encode":
        doc = docjson.loads(src) if src is not None else load_document(a.input)
        _write(tokens.serialize(doc) + "\n", a.output)
    else:
        try:
            doc = tokens.parse(src.strip("\n")) if src is not None else load_document(a.input)
        except tokens.ParseError as e:
            raise CliError("parse", f"offset {e.offset}: {e}") from None
        _write(docjson.dumps(doc), a.output)
    return 0


def cmd_render(a, cfg):
    doc = load_document(a.doc)
    assets = AssetStore.load_dir(a.assets) if a.assets else AssetStore.load_dir(Path(a.doc).parent / "assets")
    try:
        img = render(doc, assets, include_text=not a.no_text)
    except RenderError as e:
        raise CliError("render", str(e)) from None
    write_png(img, a.output)
    print(img.sha256())
    return 0


def cmd_vectorize(a, cfg):
    try:
        img = read_png(a.image)
    except OSError as e:
        raise CliError("io", f"{a.image}: {e}") from None
    vcfg = cfg.vectorizer
    if a.smooth:
        vcfg = replace(vcfg, smooth=True)
    s = assess_simplicity(img, vcfg)
    print(f"score={s.score:.6f} decision={s.decision}", file=sys.stderr)
    if not s.vectorize and not a.force:
        raise CliError("not_simple", "image is not simple enough to vectorize (use --force)")
    vg = vectorize(img, a.k, vcfg)
    _write(emit_svg(vg), a.output)
    return 0


def cmd_augment(a, cfg):
    doc = load_document(a.doc)
    policy = AugmentPolicy(a.mode, a.seed if a.seed is not None else cfg.seed, cfg.max_retries)
    client = None
    if a.mode == "semantic":
        client = WrongLengthClient() if a.client == "wrong-length" else MockParaphraseClient(policy.seed)
    out = augment(doc, policy, client)
    text = tokens.serialize(out) + "\n" if a.format == "tokens" else docjson.dumps(out)
    _write(text, a.output)
    return 0


def cmd_bucket(a, cfg):
    if a.w < 1 or a.h < 1:
        raise CliError("usage", "width and height must be >= 1", 2)
    if a.table:
        sys.stdout.write(format_assignments([("input", a.w, a.h)], cfg.buckets))
    else:
        print(assign(a.w, a.h, cfg.buckets))
    return 0


def cmd_generate(a, cfg):
    seed = a.seed if a.seed is not None else cfg.seed
    store = AssetStore()
    provided = []
    for p in a.asset or []:
        aid = store.add(read_png(p))
        provided.append((aid, Path(p).stem))
    try:
        req = InstructionRequest(a.instruction, a.mode, tuple(a.text or ()), tuple(provided), a.width, a.height)
    except ValueError as e:
        raise CliError("usage", str(e), 2) from None
    sess = Session(req, template_source(req, seed), PROVIDERS[a.provider](seed), cfg.buckets, store)
    for item in a.override or []:
        idx, _, tag = item.partition("=")
        if not idx.isdigit():
            raise CliError("usage", f"--override expects INDEX=TAG, got {item!r}", 2)
        sess.override_tag(int(idx), tag)
    out = Path(a.output)
    out.mkdir(parents=True, exist_ok=True)
    while not sess.finished:
        sess.step()
    (out / "transcript.jsonl").write_text(sess.transcript_jsonl(), encoding="utf-8")
    if sess.state != "Done":
        raise CliError("session", f"{type(sess.error).__name__}: {sess.error}")
    doc = sess.document
    (out / "stream.txt").write_text(tokens.serialize(doc) + "\n", encoding="utf-8")
    (out / "document.json").write_text(docjson.dumps(doc), encoding="utf-8")
    sess.assets.save_dir(out / "assets")
    img = render(doc, sess.assets)
    write_png(img, out / "render.png")
    print(img.sha256())
    return 0


def cmd_evaluate(a, cfg):
    d = Path(a.dir)
    if not d.is_dir():
        raise CliError("io", f"{a.dir} is not a directory")
    paths = sorted(p for p in d.glob("*.json") if p.name != "refs.json")
    assets = AssetStore.load_dir(d / "assets")
    docs = [load_document(str(p)) for p in paths]
    try:
        renders = [render(doc, assets, include_text=False) for doc in docs]
    except RenderError as e:
        raise CliError("render", str(e)) from None
    refs = None
    if (d / "refs.json").exists():
        table = json.loads((d / "refs.json").read_text(encoding="utf-8"))
        missing = [p.name for p in paths if p.name not in table]
        if missing:
            raise CliError("format", f"refs.json has no entry for {missing}")
        refs = [table[p.name] for p in paths]
    rep = evaluate_set(docs, renders, refs, names=[p.stem for p in paths], enabled=cfg.metrics)
    if a.output:
        Path(a.output).write_text(rep.to_json(), encoding="utf-8")
        sys.stdout.write(rep.table())
    else:
        sys.stdout.write(rep.to_json())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="layerforge", description="Layered design document tools.")
    p.add_argument("--config", help=f"JSON config file (default: ${config_mod.ENV_VAR})")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check a document")
    s.add_argument("doc")
    s.set_defaults(fn=cmd_validate)

    s = sub.add_parser("tokens", help="convert between JSON and token text")
    s.add_argument("action", choices=["encode", "decode"])
    s.add_argument("input", help="file or - for stdin")
    s.add_argument("-o", "--output")
    s.set_defaults(fn=cmd_tokens)

    s = sub.add_parser("render", help="rasterize a document to PNG")
    s.add_argument("doc")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--assets", help="directory of <asset_id>.png (default: <doc dir>/assets)")
    s.add_argument("--no-text", action="store_true", help="skip text layers")
    s.set_defaults(fn=cmd_render)

    s = sub.add_parser("vectorize", help="trace a flat-color PNG to SVG")
    s.add_argument("image")
    s.add_argument("-o", "--output")
    s.add_argument("-k", type=int, help="palette size (default: smallest k within tau_mse)")
    s.add_argument("--force", action="store_true", help="vectorize even if the image is not simple")
    s.add_argument("--smooth", action="store_true", help="Bezier smoothing (not exact)")
    s.set_defaults(fn=cmd_vectorize)

    s = sub.add_parser("augment", help="length-preserving text augmentation")
    s.add_argument("doc")
    s.add_argument("--mode", choices=["random", "semantic"], default="random")
    s.add_argument("--seed", type=int)
    s.add_argument("--client", choices=["mock", "wrong-length"], default="mock")
    s.add_argument("--format", choices=["json", "tokens"], default="json")
    s.add_argument("-o", "--output")
    s.set_defaults(fn=cmd_augment)

    s = sub.add_parser("bucket", help="resolution bucket for an image size")
    s.add_argument("w", type=int)
    s.add_argument("h", type=int)
    s.add_argument("--table", action="store_true", help="tabular output")
    s.set_defaults(fn=cmd_bucket)

    s = sub.add_parser("generate", help="run a generation session with the template source")
    s.add_argument("--instruction", required=True)
    s.add_argument("--mode", choices=[SINGLE_MODAL, MULTIMODAL], default=SINGLE_MODAL)
    s.add_argument("--seed", type=int)
    s.add_argument("--provider", choices=sorted(PROVIDERS), default="solid")
    s.add_argument("--text", action="append", help="provided text (repeatable)")
    s.add_argument("--asset", action="append", help="provided image PNG (repeatable)")
    s.add_argument("--override", action="append", help="INDEX=TAG description override")
    s.add_argument("--width", type=int, default=500)
    s.add_argument("--height", type=int, default=750)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(fn=cmd_generate)

    s = sub.add_parser("evaluate", help="metrics over a directory of documents")
    s.add_argument("dir")
    s.add_argument("-o", "--output")
    s.set_defaults(fn=cmd_evaluate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        cfg = config_mod.load(a.config)
    except config_mod.ConfigError as e:
        print(f"error:config: {e}", file=sys.stderr)
        return 2
    try:
        return a.fn(a, cfg)
    except CliError as e:
        print(f"error:{e.kind}: {e}", file=sys.stderr)
        return e.code
    except InvalidDocument as e:
        for v in e.report.violations:
            print(f"violation:{v.rule}: {v}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
