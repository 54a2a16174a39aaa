"""Resolution buckets for image generation.

An image request of any size is mapped to the bucket with the closest log
aspect ratio; batches never mix buckets.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class Bucket:
    id: str
    width: int
    height: int

    @property
    def log_aspect(self) -> float:
        return math.log(self.width / self.height)


class BucketTable:
    def __init__(self, buckets: Iterable):
        bs = []
        for b in buckets:
            if not isinstance(b, Bucket):
                if len(b) == 2:
                    b = Bucket(f"{b[0]}x{b[1]}", int(b[0]), int(b[1]))
                else:
                    b = Bucket(str(b[0]), int(b[1]), int(b[2]))
            bs.append(b)
        if not bs:
            raise ValueError("bucket table is empty")
        for b in bs:
            if b.width <= 0 or b.height <= 0 or b.width % 64 or b.height % 64:
                raise ValueError(f"bucket {b.id}: dimensions must be positive multiples of 64")
        if len({b.id for b in bs}) != len(bs):
            raise ValueError("bucket ids must be unique")
        if len({(b.width, b.height) for b in bs}) != len(bs):
            raise ValueError("bucket sizes must be unique")
        self.buckets: tuple[Bucket, ...] = tuple(bs)

    def __iter__(self):
        return iter(self.buckets)

    def __len__(self) -> int:
        return len(self.buckets)

    def __getitem__(self, bucket_id: str) -> Bucket:
        for b in self.buckets:
            if b.id == bucket_id:
                return b
        raise KeyError(bucket_id)

    def to_list(self) -> list[list]:
        return [[b.id, b.width, b.height] for b in self.buckets]


# 1:1, 4:5, 5:4, 3:4, 4:3, 2:3, 3:2, 9:16, 16:9 near 512x512 area, sides multiples of 64.
DEFAULT_SIZES = [
    (512, 512), (448, 576), (576, 448), (448, 640), (640, 448),
    (512, 768), (768, 512), (384, 704), (704, 384),
]
DEFAULT_TABLE = BucketTable(DEFAULT_SIZES)


def _key(w: int, h: int, b: Bucket):
    return (abs(math.log(w / h) - b.log_aspect), abs(w * h - b.width * b.height), b.id)


def assign(w: int, h: int, table: BucketTable = DEFAULT_TABLE) -> str:
    """Bucket id with the nearest log aspect ratio, then nearest area, then smallest id."""
    if w < 1 or h < 1:
        raise ValueError("width and height must be >= 1")
    return min(table, key=lambda b: _key(w, h, b)).id


def group_batches(items: Sequence, table: BucketTable = DEFAULT_TABLE, batch_size: int = 4) -> list[tuple[str, list]]:
    """Split ``(id, w, h)`` items into bucket-pure batches of at most ``batch_size``.

    Buckets appear in order of their first item; items keep their input order.
    """
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    per: dict[str, list] = {}
    for item in items:
        per.setdefault(assign(item[1], item[2], table), []).append(item)
    out = []
    for bid, members in per.items():
        for i in range(0, len(members), batch_size):
            out.append((bid, members[i:i + batch_size]))
    return out


def format_assignments(items: Sequence, table: BucketTable = DEFAULT_TABLE) -> str:
    rows = [("item", "width", "height", "bucket")]
    for item in items:
        rows.append((str(item[0]), str(item[1]), str(item[2]), assign(item[1], item[2], table)))
    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    return "\n".join("  ".join(c.ljust(widths[i]) for i, c in enumerate(r)).rstrip() for r in rows) + "\n"
