"""Rendering of game state into the observation tensor bundle.

The per-step observation is a set of integer arrays: the 21x79 map
planes (glyphs, chars, colors, specials), the 25-entry stats vector,
the encoded message, and four padded inventory arrays. Tiles outside
the hero's memory render as darkness; remembered tiles render from the
terrain memory; visible tiles show the topmost entity
(monster > item > feature).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import glyphs as glyphlib

MAP_H = 21
MAP_W = 79
BLSTATS_LEN = 25
MESSAGE_LEN = 256
INV_SIZE = 55
INV_STR_LEN = 80
MAXOCLASSES = 18

# 96-symbol message alphabet: printable ASCII 32..126 map to 0..94,
# symbol 95 pads.
MSG_PAD = 95

SPECIAL_PET_BIT = 1

# object classes for the inventory observation
OCLASS_FOOD = 7
OCLASS_COIN = 12
_OCLASS_BY_KIND = {
    "food-ration": OCLASS_FOOD,
    "apple": OCLASS_FOOD,
    "orange": OCLASS_FOOD,
    "corpse": OCLASS_FOOD,
    "gold-pile": OCLASS_COIN,
}

DARK_GLYPH = 0  # "unseen" registry entry: char 32, color 0


@dataclass
class Observation:
    glyphs: np.ndarray  # (21, 79) int16
    chars: np.ndarray  # (21, 79) uint8
    colors: np.ndarray  # (21, 79) uint8
    specials: np.ndarray  # (21, 79) uint8
    blstats: np.ndarray  # (25,) int32
    message: np.ndarray  # (256,) uint8
    inv_glyphs: np.ndarray  # (55,) int16
    inv_strs: np.ndarray  # (55, 80) uint8
    inv_letters: np.ndarray  # (55,) uint8
    inv_oclasses: np.ndarray  # (55,) uint8

    def as_dict(self) -> dict:
        return self.__dict__


def update_fov(level, hy: int, hx: int) -> int:
    """Recompute visibility for the hero at (hy, hx).

    Inside a lit room the whole room plus its wall ring (and therefore
    its doorways) is visible; anywhere else only the 8-neighborhood.
    Previously visible tiles fall back to remembered, never to unseen.
    Returns the number of tiles uncovered for the first time.
    """
    rid = int(level.room_id[hy, hx])
    lit_room = rid >= 0 and level.rooms[rid].lit
    # inside a lit room the mask depends only on the room, so repeat
    # visits are free; elsewhere it depends only on the position
    key = rid if lit_room else (hy, hx)
    if key == level.fov_key:
        return 0
    level.fov_key = key

    new_mask = np.zeros((MAP_H, MAP_W), dtype=bool)
    if lit_room:
        r = level.rooms[rid]
        new_mask[r.y - 1:r.y + r.h + 1, r.x - 1:r.x + r.w + 1] = True
    new_mask[max(0, hy - 1):hy + 2, max(0, hx - 1):hx + 2] = True
    # plain rock renders blank and does not count as uncovered
    newly = int(np.count_nonzero(new_mask & (level.vis == 0)
                                 & level.nonrock))
    level.vis[level.cur_mask] = 1
    level.vis[new_mask] = 2
    level.cur_mask = new_mask
    level.unseen_count -= newly
    level.base_dirty = True
    return newly


def refresh_base(level) -> None:
    """Rebuild the cached terrain+item render planes after a change."""
    vis2 = level.vis == 2
    vis1 = level.vis == 1
    level.R_glyph = np.where(
        vis2, level.vis_glyph,
        np.where(vis1, level.rem_glyph, np.int16(DARK_GLYPH)))
    unseen_char = np.uint8(32)
    level.R_char = np.where(
        vis2, level.vis_char, np.where(vis1, level.rem_char, unseen_char))
    level.R_color = np.where(
        vis2, level.vis_color,
        np.where(vis1, level.rem_color, np.uint8(0)))
    for (y, x), stack in level.items.items():
        if stack and level.vis[y, x] == 2:
            info = glyphlib.glyph_info(stack[-1].glyph)
            level.R_glyph[y, x] = stack[-1].glyph
            level.R_char[y, x] = info.display_char
            level.R_color[y, x] = info.color
    level.base_dirty = False


def encode_blstats(state) -> np.ndarray:
    """(x, y) followed by the 23 bottom-line stats, in fixed order."""
    hero = state.hero
    return np.array([
        hero.x, hero.y,
        hero.strength_percentage, hero.strength, hero.dexterity,
        hero.constitution, hero.intelligence, hero.wisdom, hero.charisma,
        state.score, hero.hp, hero.max_hp, hero.depth, hero.gold,
        hero.energy, hero.max_energy, hero.armor_class,
        0,  # monster_level: no polymorph in scope
        hero.exp_level, hero.exp_points, state.turn, state.hunger_state(),
        hero.carrying_capacity,
        0,  # dungeon_number: single branch
        hero.depth,
    ], dtype=np.int32)


@lru_cache(maxsize=512)
def encode_message(text: str) -> np.ndarray:
    """Encoded message buffer; cached per text, treat as read-only."""
    out = np.full(MESSAGE_LEN, MSG_PAD, dtype=np.uint8)
    data = text[:MESSAGE_LEN]
    for i, ch in enumerate(data):
        code = ord(ch)
        out[i] = code - 32 if 32 <= code <= 126 else MSG_PAD
    out.setflags(write=False)
    return out


def crop_glyphs(glyph_plane: np.ndarray, center: tuple, k: int = 9) -> np.ndarray:
    """k x k egocentric window; off-map cells carry the padding glyph."""
    if k % 2 == 0:
        raise ValueError(f"crop size must be odd, got {k}")
    cx, cy = center
    half = k // 2
    out = np.full((k, k), glyphlib.max_glyph(), dtype=glyph_plane.dtype)
    y0, y1 = max(0, cy - half), min(MAP_H, cy + half + 1)
    x0, x1 = max(0, cx - half), min(MAP_W, cx + half + 1)
    out[y0 - (cy - half):y1 - (cy - half),
        x0 - (cx - half):x1 - (cx - half)] = glyph_plane[y0:y1, x0:x1]
    return out


def _inventory_arrays(state):
    if state.inv_cache is not None:
        return state.inv_cache
    sentinel = glyphlib.max_glyph()
    inv_glyphs = np.full(INV_SIZE, sentinel, dtype=np.int16)
    inv_strs = np.zeros((INV_SIZE, INV_STR_LEN), dtype=np.uint8)
    inv_letters = np.zeros(INV_SIZE, dtype=np.uint8)
    inv_oclasses = np.full(INV_SIZE, MAXOCLASSES, dtype=np.uint8)
    for i, slot in enumerate(state.inventory[:INV_SIZE]):
        inv_glyphs[i] = glyphlib.glyph_for(slot.kind)
        inv_letters[i] = ord(slot.letter)
        inv_oclasses[i] = _OCLASS_BY_KIND.get(slot.kind, MAXOCLASSES - 1)
        desc = slot.describe().encode("ascii", "replace")[:INV_STR_LEN]
        inv_strs[i, :len(desc)] = np.frombuffer(desc, dtype=np.uint8)
    state.inv_cache = (inv_glyphs, inv_strs, inv_letters, inv_oclasses)
    return state.inv_cache


def render_observation(state) -> Observation:
    """Pure snapshot of the current state; never mutates it."""
    level = state.level
    if level.base_dirty:
        refresh_base(level)
    g = level.R_glyph.copy()
    ch = level.R_char.copy()
    co = level.R_color.copy()
    specials = np.zeros((MAP_H, MAP_W), dtype=np.uint8)

    vis = level.vis
    for mon in level.monsters:
        if vis[mon.y, mon.x] == 2:
            g[mon.y, mon.x] = mon.glyph
            ch[mon.y, mon.x] = mon.char
            co[mon.y, mon.x] = mon.color
    pet = state.pet
    if pet is not None and state.pet_depth == state.hero.depth \
            and vis[pet.y, pet.x] == 2:
        g[pet.y, pet.x] = pet.glyph
        ch[pet.y, pet.x] = pet.char
        co[pet.y, pet.x] = pet.color
        specials[pet.y, pet.x] |= SPECIAL_PET_BIT
    hero = state.hero
    g[hero.y, hero.x] = state.hero_glyph
    ch[hero.y, hero.x] = ord("@")
    co[hero.y, hero.x] = 15

    if state.msg_cache is None:
        state.msg_cache = encode_message(state.message)
    inv_glyphs, inv_strs, inv_letters, inv_oclasses = _inventory_arrays(state)
    return Observation(
        glyphs=g, chars=ch, colors=co, specials=specials,
        blstats=encode_blstats(state), message=state.msg_cache.copy(),
        inv_glyphs=inv_glyphs.copy(), inv_strs=inv_strs.copy(),
        inv_letters=inv_letters.copy(), inv_oclasses=inv_oclasses.copy(),
    )
