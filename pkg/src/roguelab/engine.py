"""Turn-based world dynamics.

Owns the mutable game state: hero, pet, monsters, hunger, combat,
score and the in-game clock. One logical owner per GameState; distinct
states can be stepped concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import dungeon, glyphs as glyphlib, observe
from .actions import ActionId, IllegalActionError, MOVE_DELTAS, lookup
from .config import EngineConfig, default_config, roll
from .dungeon import (
    CORRIDOR, DOOR_CLOSED, DOOR_HIDDEN, DOOR_LOCKED, DOOR_OPEN, FLOOR,
    GRID_H, GRID_W, ROCK, STAIR_DOWN, STAIR_UP, TRAP, WALL_H, WALL_V,
    GenParams, generate_level, oracle_depth,
)
from .rng import RngStreams, stream

MAX_INVENTORY = 55
CORPSE_FRESH_TURNS = 30
ROTTEN_POISON_PROB = 0.5
SEARCH_FIND_PROB = 1.0 / 3.0
SPAWN_PERIOD = 40
MOVE_FAR_LIMIT = 60

HUNGER_SATIATED = 0
HUNGER_NOT_HUNGRY = 1
HUNGER_HUNGRY = 2
HUNGER_WEAK = 3
HUNGER_FAINTING = 4


class EpisodeOverError(RuntimeError):
    pass


class InedibleError(ValueError):
    pass


@dataclass
class StepOutcome:
    time_advanced: bool
    events: list = field(default_factory=list)
    message: str = ""


@dataclass
class Item:
    kind: str
    count: int = 1
    gold: int = 0
    corpse_species: str | None = None
    created_turn: int = 0

    @property
    def glyph(self) -> int:
        return glyphlib.glyph_for(self.kind)


@dataclass
class InvSlot:
    letter: str
    kind: str
    count: int
    corpse_species: str | None = None
    created_turn: int = 0

    def describe(self) -> str:
        name = self.kind.replace("-", " ")
        if self.kind == "corpse":
            name = f"{self.corpse_species.replace('-', ' ')} corpse"
        if self.count == 1:
            article = "an" if name[0] in "aeiou" else "a"
            return f"{article} {name}"
        plural = name + ("s" if not name.endswith("s") else "")
        return f"{self.count} {plural}"


class Monster:
    __slots__ = ("kind", "y", "x", "level", "hp", "max_hp", "ac",
                 "dmg_dice", "exp_value", "poisonous", "acidic",
                 "immobile", "glyph", "char", "color")

    def __init__(self, spec, y, x, rng, immobile=False):
        self.kind = spec.kind
        self.y, self.x = y, x
        self.level = spec.level
        self.max_hp = max(1, roll(rng, spec.hp_dice))
        self.hp = self.max_hp
        self.ac = spec.ac
        self.dmg_dice = spec.dmg_dice
        self.exp_value = spec.exp_value
        self.poisonous = spec.poisonous
        self.acidic = spec.acidic
        self.immobile = immobile
        self.glyph = glyphlib.glyph_for(spec.kind)
        info = glyphlib.glyph_info(self.glyph)
        self.char = info.display_char
        self.color = info.color


class Pet:
    __slots__ = ("kind", "y", "x", "level", "hp", "max_hp", "ac",
                 "dmg_dice", "glyph", "char", "color")

    def __init__(self, spec, y, x, rng):
        self.kind = spec.kind
        self.y, self.x = y, x
        self.level = spec.level
        self.max_hp = max(1, roll(rng, spec.hp_dice))
        self.hp = self.max_hp
        self.ac = spec.ac
        self.dmg_dice = spec.dmg_dice
        self.glyph = glyphlib.glyph_for(spec.kind)
        info = glyphlib.glyph_info(self.glyph)
        self.char = info.display_char
        self.color = info.color


class Hero:
    __slots__ = ("y", "x", "depth", "hp", "max_hp", "strength",
                 "strength_percentage", "dexterity", "constitution",
                 "intelligence", "wisdom", "charisma", "exp_level",
                 "exp_points", "energy", "max_energy", "armor_class",
                 "gold", "nutrition", "carrying_capacity", "weapon_dice",
                 "alive")

    def __init__(self, char_spec):
        self.y = self.x = 0
        self.depth = 1
        self.hp = self.max_hp = char_spec.hp
        self.strength = char_spec.strength
        self.strength_percentage = 0
        self.dexterity = char_spec.dexterity
        self.constitution = char_spec.constitution
        self.intelligence = char_spec.intelligence
        self.wisdom = char_spec.wisdom
        self.charisma = char_spec.charisma
        self.exp_level = 1
        self.exp_points = 0
        self.energy = self.max_energy = char_spec.energy
        self.armor_class = char_spec.armor_class
        self.gold = 0
        self.nutrition = 900
        self.carrying_capacity = 25 * char_spec.strength + 50
        self.weapon_dice = char_spec.weapon_dice
        self.alive = True


_TERRAIN_KIND = {
    ROCK: "unseen",
    CORRIDOR: "corridor",
    WALL_H: "wall-horizontal",
    WALL_V: "wall-vertical",
    DOOR_OPEN: "door-open",
    DOOR_CLOSED: "door-closed",
    DOOR_LOCKED: "door-closed",  # locked looks closed until tried
    STAIR_UP: "staircase-up",
    STAIR_DOWN: "staircase-down",
    TRAP: "trap",
}

# terrain code -> glyph id; floor and hidden doors are special-cased
_TERRAIN_GLYPH_LUT = np.array(
    [glyphlib.glyph_for(_TERRAIN_KIND.get(code, "unseen"))
     for code in range(TRAP + 1)], dtype=np.int64)
_GLYPH_CHAR_LUT = np.array(
    [glyphlib.glyph_info(i).display_char
     for i in range(glyphlib.max_glyph())], dtype=np.uint8)
_GLYPH_COLOR_LUT = np.array(
    [glyphlib.glyph_info(i).color
     for i in range(glyphlib.max_glyph())], dtype=np.uint8)

_HERO_WALKABLE = frozenset({FLOOR, CORRIDOR, DOOR_OPEN, STAIR_UP,
                            STAIR_DOWN, TRAP})
_MONSTER_WALKABLE = frozenset({FLOOR, CORRIDOR, DOOR_OPEN, STAIR_UP,
                               STAIR_DOWN, TRAP})


class Level:
    """A materialized floor: blueprint terrain plus live entities."""

    def __init__(self, state, blueprint):
        cfg = state.config
        depth = blueprint.depth
        self.depth = depth
        self.terrain = blueprint.terrain.copy()
        self.rooms = blueprint.rooms
        self.doors = dict(blueprint.doors)
        self.boulders = set(blueprint.boulders)
        self.stairs_up = blueprint.staircase_up
        self.stairs_down = blueprint.staircase_down
        self.room_id = np.full((GRID_H, GRID_W), -1, dtype=np.int16)
        for i, r in enumerate(self.rooms):
            self.room_id[r.y:r.y + r.h, r.x:r.x + r.w] = i

        self.items: dict = {}
        self.monsters: list = []
        self.occupancy: dict = {}
        self.oracle_pos = None
        self.spent_traps: set = set()

        items_rng = stream(state.rng.game_seed, f"item-placement:{depth}")
        spawn_rng = stream(state.rng.episode_seed, f"monster-spawn:{depth}")
        floor_tiles = [(int(p[0]), int(p[1]))
                       for p in np.argwhere(self.terrain == FLOOR)]

        def pick_floor(rng):
            return floor_tiles[rng.randrange(len(floor_tiles))] \
                if floor_tiles else None

        n_gold = 1 + dungeon._poisson(items_rng, 1.0)
        for _ in range(n_gold):
            pos = pick_floor(items_rng)
            if pos:
                amount = items_rng.randint(5, 15 * depth + 10)
                self.add_item(pos, Item("gold-pile", gold=amount))
        for _ in range(dungeon._poisson(items_rng, 0.8)):
            pos = pick_floor(items_rng)
            if pos:
                kind = items_rng.choice(("food-ration", "apple", "orange"))
                self.add_item(pos, Item(kind))

        if depth == oracle_depth(state.rng.game_seed):
            room = self.rooms[spawn_rng.randrange(len(self.rooms))] \
                if self.rooms else None
            if room is not None:
                pos = (room.y + room.h // 2, room.x + room.w // 2)
                mon = Monster(cfg.monsters["oracle"], pos[0], pos[1],
                              spawn_rng, immobile=True)
                self.monsters.append(mon)
                self.occupancy[pos] = mon
                self.oracle_pos = pos

        avoid = blueprint.hero_start or self.stairs_up
        species = [m for m in cfg.monsters.values()
                   if not m.pet and m.kind != "oracle" and m.level <= depth + 1]
        weights = [1.0 / (1 + abs(m.level - depth)) for m in species]
        n_mon = 1 + dungeon._poisson(spawn_rng, min(0.5 + 0.3 * depth, 4.0))
        for _ in range(n_mon):
            pos = pick_floor(spawn_rng)
            if pos is None or pos in self.occupancy:
                continue
            if avoid and max(abs(pos[0] - avoid[0]), abs(pos[1] - avoid[1])) < 4:
                continue
            spec = spawn_rng.choices(species, weights)[0]
            mon = Monster(spec, pos[0], pos[1], spawn_rng)
            self.monsters.append(mon)
            self.occupancy[pos] = mon

        # visibility / render caches
        self.nonrock = self.terrain != ROCK
        self.vis = np.zeros((GRID_H, GRID_W), dtype=np.uint8)
        self.cur_mask = np.zeros((GRID_H, GRID_W), dtype=bool)
        self.fov_key = None
        self.unseen_count = int(np.count_nonzero(self.nonrock))
        self._build_glyph_planes()
        self.R_glyph = np.zeros((GRID_H, GRID_W), dtype=np.int16)
        self.R_char = np.full((GRID_H, GRID_W), 32, dtype=np.uint8)
        self.R_color = np.zeros((GRID_H, GRID_W), dtype=np.uint8)
        self.base_dirty = True

    def _tile_kind(self, y, x):
        code = int(self.terrain[y, x])
        if code == FLOOR:
            rid = self.room_id[y, x]
            lit = rid >= 0 and self.rooms[rid].lit
            return "floor-lit" if lit else "floor-dark"
        if code == DOOR_HIDDEN:
            left = self.terrain[y, x - 1] if x > 0 else ROCK
            right = self.terrain[y, x + 1] if x < GRID_W - 1 else ROCK
            horizontal = left in (WALL_H, WALL_V) or right in (WALL_H, WALL_V)
            return "wall-horizontal" if horizontal else "wall-vertical"
        return _TERRAIN_KIND[code]

    def _build_glyph_planes(self):
        t = self.terrain
        gid = _TERRAIN_GLYPH_LUT[t]
        lit = np.zeros(t.shape, dtype=bool)
        for r in self.rooms:
            if r.lit:
                lit[r.y:r.y + r.h, r.x:r.x + r.w] = True
        floor = t == FLOOR
        gid[floor & lit] = glyphlib.glyph_for("floor-lit")
        gid[floor & ~lit] = glyphlib.glyph_for("floor-dark")
        hidden = t == DOOR_HIDDEN
        if hidden.any():
            wall = (t == WALL_H) | (t == WALL_V)
            beside = np.zeros_like(hidden)
            beside[:, 1:] |= wall[:, :-1]
            beside[:, :-1] |= wall[:, 1:]
            gid[hidden & beside] = glyphlib.glyph_for("wall-horizontal")
            gid[hidden & ~beside] = glyphlib.glyph_for("wall-vertical")
        self.vis_glyph = gid.astype(np.int16)
        self.vis_char = _GLYPH_CHAR_LUT[gid]
        self.vis_color = _GLYPH_COLOR_LUT[gid]
        self._rebuild_remembered()

    def _set_tile_glyph(self, y, x):
        kind = self._tile_kind(y, x)
        gid = glyphlib.glyph_for(kind)
        info = glyphlib.glyph_info(gid)
        self.vis_glyph[y, x] = gid
        self.vis_char[y, x] = info.display_char
        self.vis_color[y, x] = info.color

    def _rebuild_remembered(self):
        lit_floor = glyphlib.glyph_for("floor-lit")
        dark_floor = glyphlib.glyph_for("floor-dark")
        dark_info = glyphlib.glyph_info(dark_floor)
        self.rem_glyph = self.vis_glyph.copy()
        self.rem_char = self.vis_char.copy()
        self.rem_color = self.vis_color.copy()
        mask = self.rem_glyph == lit_floor
        self.rem_glyph[mask] = dark_floor
        self.rem_color[mask] = dark_info.color

    def set_terrain(self, y, x, code):
        self.terrain[y, x] = code
        self.nonrock[y, x] = code != ROCK
        self._set_tile_glyph(y, x)
        lit_floor = glyphlib.glyph_for("floor-lit")
        gid = int(self.vis_glyph[y, x])
        if gid == lit_floor:
            dark = glyphlib.glyph_for("floor-dark")
            self.rem_glyph[y, x] = dark
            self.rem_char[y, x] = self.vis_char[y, x]
            self.rem_color[y, x] = glyphlib.glyph_info(dark).color
        else:
            self.rem_glyph[y, x] = gid
            self.rem_char[y, x] = self.vis_char[y, x]
            self.rem_color[y, x] = self.vis_color[y, x]
        self.base_dirty = True

    def add_item(self, pos, item):
        self.items.setdefault(pos, []).append(item)
        self.base_dirty = True

    def remove_item(self, pos, item):
        stack = self.items.get(pos, [])
        stack.remove(item)
        if not stack:
            self.items.pop(pos, None)
        self.base_dirty = True


class GameState:
    """Full mutable world; confined to one logical owner at a time."""

    def __init__(self, game_seed: int, episode_seed: int,
                 character_spec: str = "mon-hum-neu-mal",
                 config: EngineConfig | None = None,
                 gen_params: GenParams | None = None,
                 autopickup_gold: bool = False):
        self.config = config or default_config()
        if character_spec not in self.config.characters:
            raise KeyError(f"unknown character spec {character_spec!r}")
        self.character_spec = character_spec
        self.gen_params = gen_params or dungeon.DEFAULT_PARAMS
        self.autopickup_gold = autopickup_gold
        self.rng = RngStreams(game_seed, episode_seed)
        self.turn = 0
        self.score = 0
        self.death_cause: str | None = None
        self.message = ""
        self.msg_cache = None
        self.inv_cache = None
        self.total_uncovered = 0
        self.visited_depths = {1}
        self.hero_glyph = glyphlib.glyph_for("hero")

        char = self.config.characters[character_spec]
        self.hero = Hero(char)
        self.inventory: list[InvSlot] = []
        for kind, count in char.inventory:
            self._add_to_inventory(kind, count)

        self.levels: dict[int, Level] = {}
        bp = generate_level(game_seed, 1, self.gen_params)
        self.levels[1] = Level(self, bp)
        start = bp.hero_start
        self.hero.y, self.hero.x = start

        pet_spec = self.config.monsters[char.pet]
        pos = self._free_tile_near(self.levels[1], start)
        self.pet = Pet(pet_spec, *pos, self.rng.combat) if pos else None
        self.pet_depth = 1

        self.total_uncovered += observe.update_fov(
            self.levels[1], self.hero.y, self.hero.x)

    # -- helpers -------------------------------------------------------

    @property
    def level(self) -> Level:
        return self.levels[self.hero.depth]

    def ensure_level(self, depth: int) -> Level:
        if depth not in self.levels:
            bp = generate_level(self.rng.game_seed, depth, self.gen_params)
            self.levels[depth] = Level(self, bp)
        return self.levels[depth]

    def hunger_state(self) -> int:
        n = self.hero.nutrition
        if n > 1000:
            return HUNGER_SATIATED
        if n >= 150:
            return HUNGER_NOT_HUNGRY
        if n >= 50:
            return HUNGER_HUNGRY
        if n >= 1:
            return HUNGER_WEAK
        return HUNGER_FAINTING

    def set_message(self, text: str) -> None:
        self.message = text
        self.msg_cache = None

    def _add_to_inventory(self, kind, count=1, corpse_species=None,
                          created_turn=0):
        for slot in self.inventory:
            if slot.kind == kind and slot.corpse_species == corpse_species:
                slot.count += count
                self.inv_cache = None
                return slot
        if len(self.inventory) >= MAX_INVENTORY:
            return None
        used = {s.letter for s in self.inventory}
        for code in list(range(97, 123)) + list(range(65, 91)):
            if chr(code) not in used:
                slot = InvSlot(chr(code), kind, count, corpse_species,
                               created_turn)
                self.inventory.append(slot)
                self.inv_cache = None
                return slot
        return None

    def _free_tile_near(self, level, pos):
        y0, x0 = pos
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                if dy == dx == 0:
                    continue
                y, x = y0 + dy, x0 + dx
                if 0 <= y < GRID_H and 0 <= x < GRID_W \
                        and level.terrain[y, x] in _HERO_WALKABLE \
                        and (y, x) not in level.occupancy \
                        and (y, x) not in level.boulders:
                    return (y, x)
        return None

    def _die(self, cause: str, events: list) -> None:
        if not self.hero.alive:
            return
        self.hero.alive = False
        self.hero.hp = min(self.hero.hp, 0)
        self.death_cause = cause
        events.append({"type": "died", "cause": cause})
        self.set_message("You die...")


def score_delta(event: dict) -> int:
    """In-game score granted by one event (monotone accumulation)."""
    kind = event["type"]
    if kind == "monster_killed" and event.get("by_hero"):
        return 4 * event["exp_value"]
    if kind == "descended" and event.get("first_visit"):
        return 50 * event["depth"]
    if kind == "gold_collected":
        return event["amount"]
    return 0


def resolve_combat(state: GameState, attacker, defender) -> list:
    """One melee exchange; d20 to-hit against an armor-class target."""
    rng = state.rng.combat
    events = []
    if isinstance(attacker, Hero):
        to_hit = attacker.exp_level + attacker.strength // 4
        dmg_dice = attacker.weapon_dice
        dmg_bonus = max(0, (attacker.strength - 10) // 3)
    else:
        to_hit = attacker.level
        dmg_dice = attacker.dmg_dice
        dmg_bonus = 0
    roll_ = rng.randint(1, 20)
    defender_ac = defender.armor_class if isinstance(defender, Hero) \
        else defender.ac
    target = 10 + (10 - defender_ac) // 2
    if roll_ != 20 and roll_ + to_hit < target:
        events.append({"type": "missed",
                       "attacker": _combatant_name(attacker),
                       "defender": _combatant_name(defender)})
        return events
    damage = max(1, roll(rng, dmg_dice) + dmg_bonus)
    defender.hp -= damage
    events.append({"type": "hit", "attacker": _combatant_name(attacker),
                   "defender": _combatant_name(defender), "damage": damage})
    if isinstance(defender, Hero):
        events.append({"type": "damage_taken", "amount": damage,
                       "source": attacker.kind})
        if defender.hp <= 0:
            state._die(f"monster:{attacker.kind}", events)
    elif defender.hp <= 0:
        _kill_monster(state, defender, by_hero=isinstance(attacker, Hero),
                      events=events)
    return events


def _combatant_name(c) -> str:
    return "hero" if isinstance(c, Hero) else c.kind


def _kill_monster(state, mon, by_hero, events):
    level = state.level
    if isinstance(mon, Pet):
        state.pet = None
        events.append({"type": "pet_died"})
        return
    level.monsters.remove(mon)
    level.occupancy.pop((mon.y, mon.x), None)
    level.add_item((mon.y, mon.x),
                   Item("corpse", corpse_species=mon.kind,
                        created_turn=state.turn))
    events.append({"type": "monster_killed", "species": mon.kind,
                   "level": mon.level, "exp_value": mon.exp_value,
                   "by_hero": by_hero})
    if by_hero:
        hero = state.hero
        hero.exp_points += mon.exp_value
        new_level = state.config.experience_level(hero.exp_points)
        if new_level > hero.exp_level:
            hero.exp_level = new_level
            gain = roll(state.rng.combat, (1, 8))
            hero.max_hp += gain
            hero.hp += gain
            state.set_message("Welcome to experience level "
                             f"{new_level}.")
            events.append({"type": "level_up", "level": new_level})


def _hero_enter_tile(state, events):
    hero = state.hero
    level = state.level
    pos = (hero.y, hero.x)
    code = level.terrain[pos]
    if code == TRAP and pos not in level.spent_traps:
        # one shot: a sprung trap is known and harmless afterwards
        level.spent_traps.add(pos)
        damage = roll(state.rng.combat, (1, 6))
        hero.hp -= damage
        events.append({"type": "damage_taken", "amount": damage,
                       "source": "trap"})
        state.set_message("You step on a trap!")
        if hero.hp <= 0:
            state._die("trap", events)
            return
    if state.autopickup_gold:
        stack = level.items.get(pos, [])
        for item in [i for i in stack if i.kind == "gold-pile"]:
            hero.gold += item.gold
            level.remove_item(pos, item)
            events.append({"type": "gold_collected", "amount": item.gold})
    if code == STAIR_DOWN:
        state.set_message("There is a staircase down here.")
    elif code == STAIR_UP:
        state.set_message("There is a staircase up here.")


def _try_move(state, dy, dx) -> StepOutcome:
    hero = state.hero
    level = state.level
    ny, nx = hero.y + dy, hero.x + dx
    events: list = []
    if not (0 <= ny < GRID_H and 0 <= nx < GRID_W):
        return StepOutcome(False, [{"type": "bumped"}], "It's solid stone.")
    target = level.occupancy.get((ny, nx))
    if target is not None:
        if target.immobile:
            state.set_message("You bump into the Oracle.")
            return StepOutcome(False, [{"type": "bumped"}], state.message)
        events += resolve_combat(state, hero, target)
        return StepOutcome(True, events, state.message)
    pet = state.pet
    if pet is not None and state.pet_depth == hero.depth \
            and (pet.y, pet.x) == (ny, nx):
        pet.y, pet.x = hero.y, hero.x  # swap places
        hero.y, hero.x = ny, nx
        events.append({"type": "moved", "to": (ny, nx)})
        _hero_enter_tile(state, events)
        return StepOutcome(True, events, state.message)
    code = level.terrain[ny, nx]
    if code in (ROCK, WALL_H, WALL_V, DOOR_HIDDEN):
        state.set_message("It's solid stone." if code == ROCK else "Ouch!")
        return StepOutcome(False, [{"type": "bumped"}], state.message)
    if code in (DOOR_CLOSED, DOOR_LOCKED):
        state.set_message("This door is locked." if code == DOOR_LOCKED
                          else "The door is closed.")
        return StepOutcome(False, [{"type": "bumped"}], state.message)
    if (ny, nx) in level.boulders:
        by, bx = ny + dy, nx + dx
        can_push = (0 <= by < GRID_H and 0 <= bx < GRID_W
                    and level.terrain[by, bx] in _HERO_WALKABLE
                    and (by, bx) not in level.boulders
                    and (by, bx) not in level.occupancy)
        if not can_push:
            state.set_message("You try to move the boulder, but in vain.")
            return StepOutcome(False, [{"type": "bumped"}], state.message)
        level.boulders.discard((ny, nx))
        level.boulders.add((by, bx))
        level.base_dirty = True
        events.append({"type": "boulder_pushed", "to": (by, bx)})
    hero.y, hero.x = ny, nx
    events.append({"type": "moved", "to": (ny, nx)})
    _hero_enter_tile(state, events)
    return StepOutcome(True, events, state.message)


_KICK_ORDER = ((-1, 0), (0, 1), (1, 0), (0, -1),
               (-1, 1), (1, 1), (1, -1), (-1, -1))


def _kick(state) -> StepOutcome:
    hero = state.hero
    level = state.level
    events: list = []
    for dy, dx in _KICK_ORDER:
        y, x = hero.y + dy, hero.x + dx
        if not (0 <= y < GRID_H and 0 <= x < GRID_W):
            continue
        code = level.terrain[y, x]
        if code in (DOOR_CLOSED, DOOR_LOCKED):
            if state.rng.combat.random() < hero.strength / 25.0:
                level.set_terrain(y, x, DOOR_OPEN)
                level.doors[(y, x)] = "open"
                events.append({"type": "door_kicked", "pos": (y, x)})
                state.set_message("As you kick the door, it crashes open!")
            else:
                state.set_message("WHAMM!!!")
            return StepOutcome(True, events, state.message)
    for dy, dx in _KICK_ORDER:
        y, x = hero.y + dy, hero.x + dx
        if 0 <= y < GRID_H and 0 <= x < GRID_W \
                and level.terrain[y, x] in (WALL_H, WALL_V, ROCK):
            damage = roll(state.rng.combat, (1, 4))
            hero.hp -= damage
            events.append({"type": "damage_taken", "amount": damage,
                           "source": "kicking_a_wall"})
            state.set_message("Ouch! That hurts!")
            if hero.hp <= 0:
                state._die("trap", events)
            return StepOutcome(True, events, state.message)
    state.set_message("You kick at empty space.")
    return StepOutcome(True, events, state.message)


def _search(state) -> StepOutcome:
    hero = state.hero
    level = state.level
    events: list = []
    found = False
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            y, x = hero.y + dy, hero.x + dx
            if 0 <= y < GRID_H and 0 <= x < GRID_W \
                    and level.terrain[y, x] == DOOR_HIDDEN \
                    and state.rng.combat.random() < SEARCH_FIND_PROB:
                level.set_terrain(y, x, DOOR_CLOSED)
                level.doors[(y, x)] = "closed"
                events.append({"type": "found_hidden", "pos": (y, x)})
                found = True
    state.set_message("You find a hidden door!" if found
                      else "You search the area.")
    return StepOutcome(True, events, state.message)


def _open_door(state) -> StepOutcome:
    hero = state.hero
    level = state.level
    for dy, dx in _KICK_ORDER:
        y, x = hero.y + dy, hero.x + dx
        if not (0 <= y < GRID_H and 0 <= x < GRID_W):
            continue
        code = level.terrain[y, x]
        if code == DOOR_CLOSED:
            level.set_terrain(y, x, DOOR_OPEN)
            level.doors[(y, x)] = "open"
            state.set_message("The door opens.")
            return StepOutcome(True, [{"type": "door_opened",
                                       "pos": (y, x)}], state.message)
        if code == DOOR_LOCKED:
            state.set_message("This door is locked.")
            return StepOutcome(True, [], state.message)
    state.set_message("There is no door here.")
    return StepOutcome(False, [], state.message)


def eat_item(state: GameState, target: str | None = None) -> StepOutcome:
    """Eat a floor corpse (target None or "floor") or an inventory slot.

    Poisonous species and rotten corpses hurt; acidic species burn.
    """
    hero = state.hero
    level = state.level
    events: list = []
    pos = (hero.y, hero.x)
    if target is None or target == "floor":
        corpse = None
        for item in reversed(level.items.get(pos, [])):
            if item.kind == "corpse":
                corpse = item
                break
        if corpse is not None:
            return _eat_corpse(state, corpse, on_floor=True)
        if target == "floor":
            raise InedibleError("no corpse here")
        for slot in state.inventory:
            if slot.kind in state.config.nutrition or slot.kind == "corpse":
                return _eat_slot(state, slot)
        state.set_message("You don't have anything to eat.")
        return StepOutcome(False, events, state.message)
    for slot in state.inventory:
        if slot.letter == target:
            if slot.kind not in state.config.nutrition \
                    and slot.kind != "corpse":
                raise InedibleError(f"slot {target} is not edible")
            return _eat_slot(state, slot)
    raise InedibleError(f"no such inventory slot {target!r}")


def _eat_slot(state, slot) -> StepOutcome:
    if slot.kind == "corpse":
        fake = Item("corpse", corpse_species=slot.corpse_species,
                    created_turn=slot.created_turn)
        outcome = _eat_corpse(state, fake, on_floor=False)
        slot.count -= 1
        if slot.count <= 0:
            state.inventory.remove(slot)
        state.inv_cache = None
        return outcome
    gain = state.config.nutrition[slot.kind]
    state.hero.nutrition += gain
    slot.count -= 1
    if slot.count <= 0:
        state.inventory.remove(slot)
    state.inv_cache = None
    state.set_message(f"You eat {slot.kind.replace('-', ' ')}. Delicious!")
    return StepOutcome(True, [{"type": "ate", "nutrition": gain,
                               "kind": slot.kind}], state.message)


def _eat_corpse(state, corpse, on_floor) -> StepOutcome:
    hero = state.hero
    events: list = []
    spec = state.config.monsters[corpse.corpse_species]
    gain = state.config.corpse_nutrition(corpse.corpse_species)
    hero.nutrition += gain
    events.append({"type": "ate", "nutrition": gain,
                   "kind": f"{corpse.corpse_species} corpse"})
    age = state.turn - corpse.created_turn
    rotten = age > CORPSE_FRESH_TURNS \
        and state.rng.combat.random() < ROTTEN_POISON_PROB
    if spec.poisonous or rotten:
        damage = roll(state.rng.combat, (1, 10))
        hero.hp -= damage
        events.append({"type": "damage_taken", "amount": damage,
                       "source": "food_poisoning"})
        state.set_message("Ecch - that must have been poisonous!")
        if hero.hp <= 0:
            state._die("food_poisoning", events)
    elif spec.acidic:
        damage = roll(state.rng.combat, (1, 6))
        hero.hp -= damage
        events.append({"type": "damage_taken", "amount": damage,
                       "source": "acid"})
        state.set_message("Acid burns your stomach!")
        if hero.hp <= 0:
            state._die("food_poisoning", events)
    else:
        state.set_message(
            f"You eat the {corpse.corpse_species.replace('-', ' ')} corpse.")
    if on_floor:
        state.level.remove_item((hero.y, hero.x), corpse)
    return StepOutcome(True, events, state.message)


def _pickup(state) -> StepOutcome:
    hero = state.hero
    level = state.level
    pos = (hero.y, hero.x)
    stack = list(level.items.get(pos, []))
    if not stack:
        state.set_message("There is nothing here to pick up.")
        return StepOutcome(False, [], state.message)
    events: list = []
    for item in stack:
        if item.kind == "gold-pile":
            hero.gold += item.gold
            events.append({"type": "gold_collected", "amount": item.gold})
            level.remove_item(pos, item)
        else:
            slot = state._add_to_inventory(
                item.kind, item.count, item.corpse_species, item.created_turn)
            if slot is not None:
                level.remove_item(pos, item)
                events.append({"type": "picked_up", "kind": item.kind})
    state.set_message("You pick up the items here.")
    return StepOutcome(True, events, state.message)


def _take_stairs(state, down: bool) -> StepOutcome:
    hero = state.hero
    level = state.level
    want = STAIR_DOWN if down else STAIR_UP
    if level.terrain[hero.y, hero.x] != want:
        state.set_message("You can't go that way here.")
        return StepOutcome(False, [], state.message)
    new_depth = hero.depth + (1 if down else -1)
    pet_was_adjacent = (
        state.pet is not None and state.pet_depth == hero.depth
        and max(abs(state.pet.y - hero.y), abs(state.pet.x - hero.x)) <= 1)
    dest = state.ensure_level(new_depth)
    hero.depth = new_depth
    arrive = dest.stairs_up if down else dest.stairs_down
    if arrive is None or arrive in dest.occupancy:
        arrive = state._free_tile_near(dest, arrive or (GRID_H // 2,
                                                        GRID_W // 2))
    hero.y, hero.x = arrive
    events: list = []
    if down:
        first = new_depth not in state.visited_depths
        state.visited_depths.add(new_depth)
        events.append({"type": "descended", "depth": new_depth,
                       "first_visit": first})
        state.set_message(f"You descend to level {new_depth}.")
    else:
        events.append({"type": "ascended", "depth": new_depth})
        state.set_message(f"You climb to level {new_depth}.")
    if pet_was_adjacent and state.pet is not None:
        pos = state._free_tile_near(dest, (hero.y, hero.x))
        if pos is not None:
            state.pet.y, state.pet.x = pos
            state.pet_depth = new_depth
    state.total_uncovered += observe.update_fov(dest, hero.y, hero.x)
    return StepOutcome(True, events, state.message)


def apply_action(state: GameState, action) -> StepOutcome:
    """One hero action; does not advance the world clock by itself."""
    if not state.hero.alive:
        raise EpisodeOverError("the hero is dead")
    act = lookup(action)
    delta = MOVE_DELTAS.get(act.ascii_value)
    if delta is not None:
        dy, dx, far = delta
        if far:
            raise IllegalActionError(
                "move-far must go through play_turn")
        return _try_move(state, dy, dx)
    name = act.name
    if name == "search":
        return _search(state)
    if name == "kick":
        return _kick(state)
    if name == "open":
        return _open_door(state)
    if name == "eat":
        try:
            return eat_item(state, None)
        except InedibleError:
            state.set_message("You don't have anything to eat.")
            return StepOutcome(False, [], state.message)
    if name == "pickup":
        return _pickup(state)
    if name == "down":
        return _take_stairs(state, down=True)
    if name == "up":
        return _take_stairs(state, down=False)
    raise IllegalActionError(f"unhandled action {name}")


def _sign(v: int) -> int:
    return int(v > 0) - int(v < 0)


def _monster_step(state, mon, level):
    hero = state.hero
    dy = hero.y - mon.y
    dx = hero.x - mon.x
    dist = max(abs(dy), abs(dx))
    if dist == 1 and hero.depth == level.depth:
        return resolve_combat(state, mon, hero)
    rng = state.rng.combat
    if dist <= 10:
        sy, sx = _sign(dy), _sign(dx)
        steps = ((sy, sx), (sy, 0), (0, sx))
    elif rng.random() < 0.5:
        steps = [rng.choice(((-1, 0), (1, 0), (0, -1), (0, 1),
                             (-1, -1), (-1, 1), (1, -1), (1, 1)))]
    else:
        return []
    pet = state.pet
    for sdy, sdx in steps:
        if sdy == sdx == 0:
            continue
        y, x = mon.y + sdy, mon.x + sdx
        if not (0 <= y < GRID_H and 0 <= x < GRID_W):
            continue
        if level.terrain[y, x] not in _MONSTER_WALKABLE:
            continue
        if (y, x) in level.occupancy or (y, x) in level.boulders:
            continue
        if (y, x) == (hero.y, hero.x):
            continue
        if pet is not None and state.pet_depth == level.depth \
                and (y, x) == (pet.y, pet.x):
            continue
        level.occupancy.pop((mon.y, mon.x), None)
        mon.y, mon.x = y, x
        level.occupancy[(y, x)] = mon
        break
    return []


def _pet_step(state, level):
    pet = state.pet
    hero = state.hero
    events: list = []
    for mdy in (-1, 0, 1):
        for mdx in (-1, 0, 1):
            target = level.occupancy.get((pet.y + mdy, pet.x + mdx))
            if target is not None and not target.immobile:
                events += resolve_combat(state, pet, target)
                return events
    if max(abs(pet.y - hero.y), abs(pet.x - hero.x)) > 2:
        sdy = _sign(hero.y - pet.y)
        sdx = _sign(hero.x - pet.x)
        for dy, dx in ((sdy, sdx), (sdy, 0), (0, sdx)):
            if dy == dx == 0:
                continue
            y, x = pet.y + dy, pet.x + dx
            if 0 <= y < GRID_H and 0 <= x < GRID_W \
                    and level.terrain[y, x] in _MONSTER_WALKABLE \
                    and (y, x) not in level.occupancy \
                    and (y, x) not in level.boulders \
                    and (y, x) != (hero.y, hero.x):
                pet.y, pet.x = y, x
                break
    return events


def advance_world(state: GameState, ate: bool = False) -> list:
    """Everything that happens after a time-advancing hero action."""
    events: list = []
    hero = state.hero
    level = state.level
    for mon in list(level.monsters):
        if mon.immobile or not hero.alive:
            continue
        events += _monster_step(state, mon, level)
    if state.pet is not None and state.pet_depth == hero.depth \
            and hero.alive:
        events += _pet_step(state, level)
        if state.pet is not None and state.pet.hp <= 0:
            state.pet = None
            events.append({"type": "pet_died"})
    if hero.alive and not ate:
        hero.nutrition -= 1
        if hero.nutrition <= 0:
            state._die("starvation", events)
    # natural healing, a slow trickle
    if hero.alive and hero.hp < hero.max_hp and state.turn % 5 == 0:
        hero.hp += 1
    if hero.alive and state.turn > 0 and state.turn % SPAWN_PERIOD == 0:
        rng = state.rng.monster_spawn
        species = [m for m in state.config.monsters.values()
                   if not m.pet and m.kind != "oracle"
                   and m.level <= hero.depth + 1]
        floor = np.argwhere(level.terrain == FLOOR)
        if len(floor) and species:
            y, x = map(int, floor[rng.randrange(len(floor))])
            if (y, x) not in level.occupancy \
                    and (y, x) != (hero.y, hero.x):
                weights = [1.0 / (1 + abs(m.level - hero.depth))
                           for m in species]
                spec = rng.choices(species, weights)[0]
                mon = Monster(spec, y, x, rng)
                level.monsters.append(mon)
                level.occupancy[(y, x)] = mon
                events.append({"type": "spawned", "species": spec.kind})
    return events


_STOP_NEARBY = frozenset({DOOR_OPEN, DOOR_CLOSED, DOOR_LOCKED,
                          STAIR_UP, STAIR_DOWN, TRAP})


def _move_far_should_stop(state) -> bool:
    hero = state.hero
    level = state.level
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            y, x = hero.y + dy, hero.x + dx
            if not (0 <= y < GRID_H and 0 <= x < GRID_W):
                continue
            if (dy or dx) and ((y, x) in level.occupancy
                               or (y, x) in level.items
                               or (y, x) in level.boulders):
                return True
            if level.terrain[y, x] in _STOP_NEARBY:
                return True
    if level.terrain[hero.y, hero.x] == CORRIDOR:
        exits = 0
        for dy, dx in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            y, x = hero.y + dy, hero.x + dx
            if 0 <= y < GRID_H and 0 <= x < GRID_W \
                    and level.terrain[y, x] in _HERO_WALKABLE:
                exits += 1
        if exits > 2:
            return True
    return False


def play_turn(state: GameState, action) -> StepOutcome:
    """Hero action plus world advancement; the step path used by the env."""
    if not state.hero.alive:
        raise EpisodeOverError("the hero is dead")
    act = lookup(action)
    state.set_message("")
    delta = MOVE_DELTAS.get(act.ascii_value)
    events: list = []
    time_advanced = False
    if delta is not None and delta[2]:
        dy, dx, _ = delta
        for _ in range(MOVE_FAR_LIMIT):
            sub = _try_move(state, dy, dx)
            events += sub.events
            if not sub.time_advanced:
                break
            time_advanced = True
            state.turn += 1
            ate = any(e["type"] == "ate" for e in sub.events)
            events += advance_world(state, ate)
            state.total_uncovered += observe.update_fov(
                state.level, state.hero.y, state.hero.x)
            if not state.hero.alive:
                break
            if any(e["type"] != "moved" for e in sub.events):
                break
            if _move_far_should_stop(state):
                break
    else:
        sub = apply_action(state, act)
        events += sub.events
        time_advanced = sub.time_advanced
        if time_advanced:
            state.turn += 1
            ate = any(e["type"] == "ate" for e in sub.events)
            events += advance_world(state, ate)
        if state.hero.alive:
            state.total_uncovered += observe.update_fov(
                state.level, state.hero.y, state.hero.x)
    for event in events:
        state.score += score_delta(event)
    return StepOutcome(time_advanced, events, state.message)
