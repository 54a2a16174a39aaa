"""Regenerate ``layerforge/render/_font8x16.py`` from a monospace TrueType font.

Run once; the output module is checked in so rendering never touches a font file.

    python tools/make_font.py /usr/share/fonts/truetype/dejavu/DejaVuSansMono.ttf
"""
import sys
from pathlib import Path

from PIL import Image, ImageDraw, ImageFont

W, H = 8, 16
SCALE = 8


def glyph_rows(font, ch):
    big = Image.new("L", (W * SCALE, H * SCALE), 0)
    draw = ImageDraw.Draw(big)
    draw.text((W * SCALE / 2, H * SCALE * 0.78), ch, fill=255, font=font, anchor="ms")
    small = big.resize((W, H), Image.BOX)
    rows = []
    for y in range(H):
        bits = 0
        for x in range(W):
            if small.getpixel((x, y)) >= 100:
                bits |= 0x80 >> x
        rows.append(bits)
    return rows


def replacement_rows():
    rows = [0x00, 0x00, 0x7E, 0x42, 0x42, 0x42, 0x42, 0x42,
            0x42, 0x42, 0x42, 0x42, 0x7E, 0x00, 0x00, 0x00]
    return rows


def main(path):
    font = ImageFont.truetype(path, 13 * SCALE)
    data = bytearray()
    for code in range(0x20, 0x7F):
        data.extend(glyph_rows(font, chr(code)))
    data.extend(replacement_rows())
    out = Path(__file__).resolve().parents[1] / "src/layerforge/render/_font8x16.py"
    lines = [
        '"""Embedded 8x16 bitmap font: printable ASCII 0x20-0x7E, then one replacement glyph.',
        "",
        "Generated by tools/make_font.py; one byte per row, MSB is the leftmost pixel.",
        '"""',
        "",
        "GLYPH_W = 8",
        "GLYPH_H = 16",
        "FIRST = 0x20",
        "LAST = 0x7E",
        "",
        "DATA = bytes.fromhex(",
    ]
    for i in range(0, len(data), 16):
        lines.append('    "' + data[i:i + 16].hex() + '"')
    lines.append(")")
    out.write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "/usr/share/fonts/truetype/dejavu/DejaVuSansMono.ttf")
