"""Deterministic procedural generation of dungeon levels.

A level blueprint is pure topology: rooms, corridors, doors, traps,
boulders and staircases on the fixed 21x79 grid. Items and monsters are
placed later, when the engine materializes a blueprint, so that the
level-topology stream is the only randomness consumed here and
(game_seed, depth) fully determine the result.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass, field

import numpy as np

from .rng import derive_seed

GRID_H = 21
GRID_W = 79

# terrain codes
ROCK = 0
FLOOR = 1
CORRIDOR = 2
WALL_H = 3
WALL_V = 4
DOOR_OPEN = 5
DOOR_CLOSED = 6
DOOR_LOCKED = 7
DOOR_HIDDEN = 8
STAIR_UP = 9
STAIR_DOWN = 10
TRAP = 11

DOOR_STATES = ("open", "closed", "locked", "hidden")
_DOOR_CODE = {
    "open": DOOR_OPEN,
    "closed": DOOR_CLOSED,
    "locked": DOOR_LOCKED,
    "hidden": DOOR_HIDDEN,
}

_DUMP_CHARS = {
    ROCK: " ",
    FLOOR: ".",
    CORRIDOR: "#",
    WALL_H: "-",
    WALL_V: "|",
    DOOR_OPEN: "'",
    DOOR_CLOSED: "+",
    DOOR_LOCKED: "L",
    DOOR_HIDDEN: "H",
    STAIR_UP: "<",
    STAIR_DOWN: ">",
    TRAP: "^",
}


class InvalidDepthError(ValueError):
    pass


@dataclass(frozen=True)
class Room:
    y: int  # top-left of the interior
    x: int
    h: int  # interior height/width
    w: int
    lit: bool

    def contains(self, y: int, x: int) -> bool:
        return self.y <= y < self.y + self.h and self.x <= x < self.x + self.w

    def tiles(self):
        for y in range(self.y, self.y + self.h):
            for x in range(self.x, self.x + self.w):
                yield y, x


@dataclass
class GenParams:
    """Tunable generation knobs; defaults give standard levels."""

    min_rooms: int = 4
    max_rooms: int = 9
    min_room_w: int = 3
    max_room_w: int = 14
    min_room_h: int = 3
    max_room_h: int = 6
    door_probs: tuple = (0.45, 0.35, 0.12, 0.08)  # open/closed/locked/hidden
    trap_rate: float = 2.0  # Poisson mean per level
    boulder_rate: float = 1.0
    lit_prob: float = 0.75
    max_depth: int = 12
    extra_corridors: int = 2


DEFAULT_PARAMS = GenParams()


@dataclass
class LevelBlueprint:
    depth: int
    rooms: list  # list[Room]
    corridors: list  # list of (y, x) tile paths
    doors: dict  # (y, x) -> state string
    traps: dict  # (y, x) -> kind string
    boulders: list  # list of (y, x)
    staircase_up: tuple | None
    staircase_down: tuple | None
    hero_start: tuple | None
    terrain: np.ndarray = field(repr=False)  # uint8 (21, 79)

    def ascii_map(self) -> str:
        """Plain-text debug dump, one char per tile."""
        rows = []
        for y in range(GRID_H):
            rows.append("".join(_DUMP_CHARS[int(c)] for c in self.terrain[y]))
        if self.hero_start is not None:
            hy, hx = self.hero_start
            rows[hy] = rows[hy][:hx] + "@" + rows[hy][hx + 1:]
        for (by, bx) in self.boulders:
            rows[by] = rows[by][:bx] + "O" + rows[by][bx + 1:]
        return "\n".join(rows)

    def content_hash(self) -> str:
        h = hashlib.blake2b(digest_size=8)
        h.update(self.ascii_map().encode())
        h.update(bytes(int(r.lit) for r in self.rooms))
        return h.hexdigest()


@dataclass
class ValidationReport:
    ok: bool
    violations: list


def _poisson(rng: random.Random, lam: float) -> int:
    # Knuth's method; lam is small here.
    limit = math.exp(-lam)
    n, p = 0, rng.random()
    while p > limit:
        n += 1
        p *= rng.random()
    return n


def _place_rooms(rng: random.Random, params: GenParams) -> list[Room]:
    target = rng.randint(params.min_rooms, params.max_rooms)
    rooms: list[Room] = []
    for _ in range(300):
        if len(rooms) >= target:
            break
        w = rng.randint(params.min_room_w, params.max_room_w)
        h = rng.randint(params.min_room_h, params.max_room_h)
        y = rng.randint(1, GRID_H - h - 2)
        x = rng.randint(1, GRID_W - w - 2)
        # keep a 2-tile margin so walls never touch or overlap
        clear = all(
            not (y - 2 < r.y + r.h and r.y - 2 < y + h
                 and x - 2 < r.x + r.w and r.x - 2 < x + w)
            for r in rooms
        )
        if clear:
            rooms.append(Room(y, x, h, w, rng.random() < params.lit_prob))
    return rooms


def _carve_room(terrain: np.ndarray, room: Room) -> None:
    terrain[room.y:room.y + room.h, room.x:room.x + room.w] = FLOOR
    terrain[room.y - 1, room.x - 1:room.x + room.w + 1] = WALL_H
    terrain[room.y + room.h, room.x - 1:room.x + room.w + 1] = WALL_H
    terrain[room.y:room.y + room.h, room.x - 1] = WALL_V
    terrain[room.y:room.y + room.h, room.x + room.w] = WALL_V


def _l_path(a: tuple, b: tuple, horizontal_first: bool) -> list[tuple]:
    (ay, ax), (by, bx) = a, b
    path = []
    if horizontal_first:
        step = 1 if bx >= ax else -1
        for x in range(ax, bx + step, step):
            path.append((ay, x))
        step = 1 if by >= ay else -1
        for y in range(ay, by + step, step):
            path.append((y, bx))
    else:
        step = 1 if by >= ay else -1
        for y in range(ay, by + step, step):
            path.append((y, ax))
        step = 1 if bx >= ax else -1
        for x in range(ax, bx + step, step):
            path.append((by, x))
    # drop consecutive duplicates at the pivot
    out = [path[0]]
    for p in path[1:]:
        if p != out[-1]:
            out.append(p)
    return out


def _sample_door_state(rng: random.Random, params: GenParams) -> str:
    r = rng.random()
    acc = 0.0
    for state, p in zip(DOOR_STATES, params.door_probs):
        acc += p
        if r < acc:
            return state
    return DOOR_STATES[-1]


def _carve_corridor(terrain, path, doors, rng, params) -> list[tuple]:
    carved = []
    for (y, x) in path:
        code = terrain[y, x]
        if code == ROCK:
            terrain[y, x] = CORRIDOR
            carved.append((y, x))
        elif code in (WALL_H, WALL_V):
            state = _sample_door_state(rng, params)
            terrain[y, x] = _DOOR_CODE[state]
            doors[(y, x)] = state
        # floor / corridor / existing doors are left alone
    return carved


def generate_level(game_seed: int, depth: int,
                   params: GenParams = DEFAULT_PARAMS) -> LevelBlueprint:
    """Build the blueprint for one floor; deterministic in (seed, depth)."""
    if not 1 <= depth <= params.max_depth:
        raise InvalidDepthError(f"depth {depth} outside 1..{params.max_depth}")
    rng = random.Random(derive_seed(game_seed, f"level-topology:{depth}"))

    terrain = np.zeros((GRID_H, GRID_W), dtype=np.uint8)
    rooms = _place_rooms(rng, params)
    for room in rooms:
        _carve_room(terrain, room)

    doors: dict = {}
    corridors: list = []
    centers = [(r.y + r.h // 2, r.x + r.w // 2) for r in rooms]
    edges = [(i, rng.randrange(i)) for i in range(1, len(rooms))]
    for _ in range(rng.randint(0, params.extra_corridors)):
        if len(rooms) >= 2:
            i = rng.randrange(len(rooms))
            j = rng.randrange(len(rooms))
            if i != j:
                edges.append((i, j))
    for i, j in edges:
        path = _l_path(centers[i], centers[j], rng.random() < 0.5)
        corridors.append(_carve_corridor(terrain, path, doors, rng, params))

    def free_floor_tile(exclude=()):
        for _ in range(500):
            room = rooms[rng.randrange(len(rooms))]
            y = rng.randint(room.y, room.y + room.h - 1)
            x = rng.randint(room.x, room.x + room.w - 1)
            if terrain[y, x] == FLOOR and (y, x) not in exclude:
                return (y, x)
        raise RuntimeError("no free floor tile")

    stair_down = None
    if depth < params.max_depth:
        stair_down = free_floor_tile()
        terrain[stair_down] = STAIR_DOWN
    stair_up = None
    if depth > 1:
        stair_up = free_floor_tile()
        terrain[stair_up] = STAIR_UP
    hero_start = None
    if depth == 1:
        hero_start = free_floor_tile()

    traps: dict = {}
    for _ in range(_poisson(rng, params.trap_rate)):
        try:
            pos = free_floor_tile(exclude={hero_start})
        except RuntimeError:
            break
        terrain[pos] = TRAP
        traps[pos] = rng.choice(("dart", "pit"))

    corridor_tiles = [t for path in corridors for t in path]
    boulders: list = []
    if corridor_tiles:
        for _ in range(_poisson(rng, params.boulder_rate)):
            pos = corridor_tiles[rng.randrange(len(corridor_tiles))]
            if pos not in boulders:
                boulders.append(pos)

    return LevelBlueprint(
        depth=depth, rooms=rooms, corridors=corridors, doors=doors,
        traps=traps, boulders=boulders, staircase_up=stair_up,
        staircase_down=stair_down, hero_start=hero_start, terrain=terrain,
    )


def oracle_depth(game_seed: int) -> int:
    """Depth at which the Oracle lives for this seed; uniform over 5..9."""
    rng = random.Random(derive_seed(game_seed, "oracle-depth"))
    return rng.randrange(5, 10)


_PASSABLE = frozenset({
    FLOOR, CORRIDOR, DOOR_OPEN, DOOR_CLOSED, DOOR_LOCKED, DOOR_HIDDEN,
    STAIR_UP, STAIR_DOWN, TRAP,
})


def validate_level(bp: LevelBlueprint,
                   params: GenParams = DEFAULT_PARAMS) -> ValidationReport:
    """Reachability and invariant audit of a blueprint.

    Hidden and locked doors count as passable: they can be revealed /
    kicked in, so they must not disconnect the level.
    """
    violations = []
    terrain = bp.terrain

    down_count = int(np.count_nonzero(terrain == STAIR_DOWN))
    expected_down = 1 if bp.depth < params.max_depth else 0
    if down_count != expected_down:
        violations.append(
            f"staircase-down multiplicity {down_count}, expected {expected_down}")
    up_count = int(np.count_nonzero(terrain == STAIR_UP))
    expected_up = 1 if bp.depth > 1 else 0
    if up_count != expected_up:
        violations.append(
            f"staircase-up multiplicity {up_count}, expected {expected_up}")
    if bp.depth == 1 and bp.hero_start is None:
        violations.append("depth-1 level lacks a hero start")

    for i, r in enumerate(bp.rooms):
        if r.y < 1 or r.x < 1 or r.y + r.h > GRID_H - 1 or r.x + r.w > GRID_W - 1:
            violations.append(f"room {i} outside grid")
        for j in range(i + 1, len(bp.rooms)):
            o = bp.rooms[j]
            if (r.y < o.y + o.h and o.y < r.y + r.h
                    and r.x < o.x + o.w and o.x < r.x + r.w):
                violations.append(f"rooms {i} and {j} overlap")

    start = bp.hero_start or bp.staircase_up
    if start is None and bp.rooms:
        r = bp.rooms[0]
        start = (r.y, r.x)
    if start is not None:
        passable = np.isin(terrain, list(_PASSABLE))
        reach = np.zeros_like(passable)
        stack = [start]
        reach[start] = True
        while stack:
            y, x = stack.pop()
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    ny, nx = y + dy, x + dx
                    if 0 <= ny < GRID_H and 0 <= nx < GRID_W \
                            and passable[ny, nx] and not reach[ny, nx]:
                        reach[ny, nx] = True
                        stack.append((ny, nx))
        for i, room in enumerate(bp.rooms):
            if not reach[room.y:room.y + room.h, room.x:room.x + room.w].all():
                violations.append(f"room {i} not fully reachable")
        for name, pos in (("staircase-down", bp.staircase_down),
                          ("staircase-up", bp.staircase_up)):
            if pos is not None and not reach[pos]:
                violations.append(f"{name} unreachable")

    return ValidationReport(ok=not violations, violations=violations)
