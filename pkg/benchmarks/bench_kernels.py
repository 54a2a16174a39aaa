"""Compiled vs pure kernels on representative inputs.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import sys
import timeit
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from helpers import blob_image  # noqa: E402
from layerforge import _kernels  # noqa: E402
from layerforge._kernels import pure  # noqa: E402
from layerforge.render.fill import path_edges  # noqa: E402
from layerforge.model import Color, VectorPath  # noqa: E402
from layerforge.vectorizer import trace_mask  # noqa: E402


def cases():
    rng = np.random.default_rng(0)
    yy, xx = np.mgrid[0:512, 0:512]
    disks = np.zeros((512, 512), dtype=bool)
    for _ in range(40):
        cy, cx, r = rng.uniform(0, 512, 3)
        disks ^= (yy - cy) ** 2 + (xx - cx) ** 2 < (r / 6) ** 2
    noise = rng.random((256, 256)) < 0.5
    edges = path_edges([VectorPath(Color(0, 0, 0), n) for n, _ in trace_mask(disks)])
    px = blob_image(rng, 256, 6).pixels.reshape(-1, 4).astype(np.float64)
    centers = rng.integers(0, 256, (8, 4)).astype(np.float64)
    return {
        "trace 512x512 disks": lambda k: k.trace_boundaries(disks, 4),
        "trace 256x256 noise": lambda k: k.trace_boundaries(noise, 4),
        f"fill 512x512 ({len(edges)} edges)": lambda k: k.fill_evenodd(edges, 512, 512),
        "nearest_center 65536x8": lambda k: k.nearest_center(px, centers),
    }


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    a = ap.parse_args()
    backends = [("python", pure)]
    if _kernels.compiled is not None:
        backends.append(("cython", _kernels.compiled))
    else:
        print("compiled kernels not built; timing the pure backend only")
    print(f"{'case':32} " + " ".join(f"{n:>10}" for n, _ in backends) + "   speedup")
    for name, fn in cases().items():
        times = [min(timeit.repeat(lambda: fn(k), number=1, repeat=a.repeat)) for _, k in backends]
        speed = f"{times[0] / times[1]:8.1f}x" if len(times) == 2 else ""
        print(f"{name:32} " + " ".join(f"{t * 1000:8.1f}ms" for t in times) + f"  {speed}")


if __name__ == "__main__":
    main()
