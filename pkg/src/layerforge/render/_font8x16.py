"""Embedded 8x16 bitmap font: printable ASCII 0x20-0x7E, then one replacement glyph.

Generated by tools/make_font.py; one byte per row, MSB is the leftmost pixel.
"""

GLYPH_W = 8
GLYPH_H = 16
FIRST = 0x20
LAST = 0x7E

DATA = bytes.fromhex(
    "00000000000000000000000000000000"
    "00000018181818181800001800000000"
    "00000024242404000000000000000000"
    "0000001212167f2424fe284840000000"
    "000000083c6868381e0a0a7e18080000"
    "00000060d090720c340f090f04000000"
    "0000003c2020307049cf467e38000000"
    "00000018181800000000000000000000"
    "00000008081810101010101808080000"
    "00000010101808080808081810100000"
    "000000086e183c080000000000000000"
    "00000000001818187f18181800000000"
    "00000000000000000000001818100000"
    "00000000000000001818000000000000"
    "00000000000000000000001808000000"
    "00000006040c08081810302060400000"
    "0000003c6662425a4242663c18000000"
    "00000038080808080808083e3e000000"
    "0000007c060606040810307e7e000000"
    "0000007c0606041c0602066e38000000"
    "0000000c0c143424447e0c0404000000"
    "0000007c6060780c0606066c38000000"
    "0000003e20607c666262623e18000000"
    "0000007e06040c0c0818101000000000"
    "0000003c6666663c6642427e18000000"
    "0000003c664642663e02063c38000000"
    "00000000000018180000001808000000"
    "00000000000018180000001818100000"
    "0000000000020e7860380e0000000000"
    "0000000000007e7e007e000000000000"
    "000000000040701e071c700000000000"
    "0000003c06060c081818001810000000"
    "000000003e434fd39191d34e603c0c00"
    "00000018183c2424667e424300000000"
    "0000007c6662667c6262627e78000000"
    "0000003e206060404060603e1c000000"
    "00000078444642424242467c70000000"
    "0000007e6060607e6060607e3e000000"
    "0000007e6060607e6060606020000000"
    "0000003e606040404642623e1c000000"
    "000000424242427e4242424242000000"
    "0000007e181818181818183c3c000000"
    "0000003c040404040404047c38000000"
    "00000042444c7878684c464242000000"
    "00000060606060606060607e3e000000"
    "0000006767675f5b5b43434342000000"
    "000000626272525a4a4e464642000000"
    "0000003c664242424242663c18000000"
    "0000007c6662626e7c60606000000000"
    "0000003c664242424242663c1c060000"
    "0000007c4646467c7c46424341000000"
    "0000003e6040603c0602027e38000000"
    "000000ff181818181818181800000000"
    "00000042424242424242627e18000000"
    "0000004342666624243c1c1818000000"
    "000000c1c3c35b5a5a76666620000000"
    "0000004266341c181c34664200000000"
    "0000004366243c181818181800000000"
    "0000007f02060c081830207e7e000000"
    "000000181010101010101010101c0000"
    "000000406020301018080c0406020000"
    "00000018080808080808080808380000"
    "000000183c6642000000000000000000"
    "000000000000000000000000000000ff"
    "00003010000000000000000000000000"
    "00000000003c06023e62467e3a000000"
    "00000060607c66626262627e18000000"
    "00000000001e32606060203e1c000000"
    "00000006063e66464646467e18000000"
    "00000000003c66427e4060361c000000"
    "0000001e187e18181818181800000000"
    "00000000003a66464646663e16063c00"
    "00000060607c66666262626202000000"
    "0000001800381818181818183e000000"
    "00000008003808080808080808087800"
    "0000002020222428382c242222000000"
    "00000070101010101010101804000000"
    "0000000000765a5a5a5a5a5a40000000"
    "00000000005c66666262626202000000"
    "00000000003c66624242663e18000000"
    "00000000007c66626262627e78606000"
    "00000000003a66664242663e1e020200"
    "00000000000e38303030303000000000"
    "00000000003c2060380e067c38000000"
    "00000010107e1010101010180c000000"
    "00000000004262626262663e1a000000"
    "000000000042426624343c1818000000"
    "000000000081c3435a5a7e6624000000"
    "000000000042243c1818346642000000"
    "000000000042622624341c1818107000"
    "00000000003e060c081030603c000000"
    "0000000c181818183018181818080c00"
    "00000018181818181818181818181800"
    "00000030181818180e08181818183000"
    "00000000000000007e00000000000000"
    "00007e4242424242424242427e000000"
)
