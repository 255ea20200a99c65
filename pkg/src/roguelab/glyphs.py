"""Glyph registry: the universe of displayable entities.

Every entity that can appear on the map (monsters, items, dungeon
features, the hero and its pet) is identified by a small integer glyph
id. The registry maps each id to its display character, color and
class. Ids are assigned by the shipped table ``data/glyphs.tsv``; the
id equal to ``MAX_GLYPH`` is a padding sentinel and maps to nothing.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from importlib import resources

GLYPH_CLASSES = ("hero", "pet-overlay", "monster", "item", "dungeon-feature")

REGISTRY_VERSION = "v1"


class GlyphError(KeyError):
    """Raised for sentinel/out-of-range glyph ids or unknown entity kinds."""


@dataclass(frozen=True)
class GlyphInfo:
    display_char: int  # ASCII byte, 0..127
    color: int  # 0..15
    glyph_class: str
    entity_kind: str


def _data_dir() -> str:
    override = os.environ.get("ROGUELAB_DATA_DIR")
    if override:
        return override
    return str(resources.files("roguelab").joinpath("data"))


def data_path(name: str) -> str:
    return os.path.join(_data_dir(), name)


def _load_table(path: str) -> list[GlyphInfo]:
    entries: list[GlyphInfo] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            ident, kind, char, color, cls = line.split("\t")
            if int(ident) != len(entries):
                raise ValueError(f"glyph table ids out of order at {ident}")
            char_i, color_i = int(char), int(color)
            if not 0 <= char_i <= 127:
                raise ValueError(f"char out of range for {kind}")
            if not 0 <= color_i <= 15:
                raise ValueError(f"color out of range for {kind}")
            if cls not in GLYPH_CLASSES:
                raise ValueError(f"unknown glyph class {cls!r}")
            entries.append(GlyphInfo(char_i, color_i, cls, kind))
    if not entries:
        raise ValueError(f"empty glyph table: {path}")
    return entries


class GlyphRegistry:
    """Immutable id <-> entity mapping loaded from the shipped table."""

    def __init__(self, path: str | None = None):
        self._entries = tuple(_load_table(path or data_path("glyphs.tsv")))
        self._by_kind = {e.entity_kind: i for i, e in enumerate(self._entries)}
        if len(self._by_kind) != len(self._entries):
            raise ValueError("duplicate entity kinds in glyph table")

    @property
    def max_glyph(self) -> int:
        return len(self._entries)

    def glyph_info(self, glyph_id: int) -> GlyphInfo:
        if not 0 <= glyph_id < len(self._entries):
            raise GlyphError(f"invalid glyph id {glyph_id}")
        return self._entries[glyph_id]

    def glyph_for(self, entity_kind: str) -> int:
        try:
            return self._by_kind[entity_kind]
        except KeyError:
            raise GlyphError(f"unknown entity kind {entity_kind!r}") from None

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)


_REGISTRY: GlyphRegistry | None = None


def registry() -> GlyphRegistry:
    """The process-wide registry (immutable, safe for concurrent reads)."""
    global _REGISTRY
    if _REGISTRY is None:
        _REGISTRY = GlyphRegistry()
    return _REGISTRY


def glyph_info(glyph_id: int) -> GlyphInfo:
    return registry().glyph_info(glyph_id)


def glyph_for(entity_kind: str) -> int:
    return registry().glyph_for(entity_kind)


def max_glyph() -> int:
    return registry().max_glyph
