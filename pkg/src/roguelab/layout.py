"""Flat binary observation buffer, described by a shipped layout file.

The layout file is the contract for out-of-process consumers: each line
names a field, its dtype and its shape; fields are packed in file order,
little-endian, with no padding. Consumers parse the file rather than
hard-coding offsets, so layout changes stay in one place.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .glyphs import data_path

LAYOUT_FILE = "LAYOUT.txt"

_DTYPES = {
    "uint8": np.uint8,
    "int16": np.dtype("<i2"),
    "int32": np.dtype("<i4"),
}


class LayoutError(ValueError):
    pass


@dataclass(frozen=True)
class Field:
    name: str
    dtype: str
    shape: tuple
    offset: int

    @property
    def count(self) -> int:
        return reduce(lambda a, b: a * b, self.shape, 1)

    @property
    def nbytes(self) -> int:
        return self.count * np.dtype(_DTYPES[self.dtype]).itemsize


class Layout:
    def __init__(self, fields: tuple):
        self.fields = fields
        self.by_name = {f.name: f for f in fields}
        last = fields[-1]
        self.total_bytes = last.offset + last.nbytes

    def pack(self, obs: dict) -> bytes:
        out = bytearray(self.total_bytes)
        for f in self.fields:
            arr = np.ascontiguousarray(obs[f.name], dtype=_DTYPES[f.dtype])
            if arr.shape != f.shape:
                raise LayoutError(
                    f"{f.name}: expected shape {f.shape}, got {arr.shape}")
            out[f.offset:f.offset + f.nbytes] = arr.tobytes()
        return bytes(out)

    def unpack(self, buf: bytes) -> dict:
        if len(buf) != self.total_bytes:
            raise LayoutError(
                f"buffer is {len(buf)} bytes, layout needs {self.total_bytes}")
        obs = {}
        for f in self.fields:
            arr = np.frombuffer(buf, dtype=_DTYPES[f.dtype],
                                count=f.count, offset=f.offset)
            obs[f.name] = arr.reshape(f.shape).copy()
        return obs


def parse_layout(path: str | None = None) -> Layout:
    path = path or data_path(LAYOUT_FILE)
    fields = []
    offset = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise LayoutError(f"line {lineno}: expected 3 columns")
            name, dtype, shape_text = parts
            if dtype not in _DTYPES:
                raise LayoutError(f"line {lineno}: unknown dtype {dtype!r}")
            try:
                shape = tuple(int(d) for d in shape_text.split("x"))
            except ValueError:
                raise LayoutError(
                    f"line {lineno}: bad shape {shape_text!r}") from None
            f = Field(name, dtype, shape, offset)
            fields.append(f)
            offset += f.nbytes
    if not fields:
        raise LayoutError("layout file has no fields")
    return Layout(tuple(fields))


_LAYOUT: Layout | None = None


def default_layout() -> Layout:
    global _LAYOUT
    if _LAYOUT is None:
        _LAYOUT = parse_layout()
    return _LAYOUT
