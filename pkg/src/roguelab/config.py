"""Loading of the shipped plain-text config tables.

All gameplay numbers (nutrition values, monster stats, experience
thresholds, character specs) live in versioned key-value files under
``data/``. Loading them is part of engine construction; their hashes
are pinned into episode records so stale-config replays are detected.
The directory can be overridden with ``ROGUELAB_DATA_DIR``.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass

from .glyphs import data_path

_DICE_RE = re.compile(r"^(\d+)d(\d+)$")


class ConfigError(ValueError):
    pass


def parse_dice(text: str) -> tuple[int, int]:
    m = _DICE_RE.match(text)
    if not m:
        raise ConfigError(f"bad dice spec {text!r}")
    return int(m.group(1)), int(m.group(2))


def roll(rng, dice: tuple[int, int]) -> int:
    n, sides = dice
    if sides <= 0:
        return 0
    return sum(rng.randint(1, sides) for _ in range(n))


def _read_kv(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out


def _fields(value: str) -> dict[str, str]:
    out = {}
    for token in value.split():
        k, _, v = token.partition(":")
        out[k] = v
    return out


def file_hash(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


@dataclass(frozen=True)
class MonsterSpec:
    kind: str
    level: int
    hp_dice: tuple
    ac: int
    dmg_dice: tuple
    exp_value: int
    poisonous: bool = False
    acidic: bool = False
    pet: bool = False


@dataclass(frozen=True)
class CharacterSpec:
    spec: str
    hp: int
    energy: int
    strength: int
    dexterity: int
    constitution: int
    intelligence: int
    wisdom: int
    charisma: int
    armor_class: int
    weapon_dice: tuple
    pet: str
    inventory: tuple  # ((kind, count), ...)


class EngineConfig:
    """All config tables, loaded once and shared read-only."""

    FILES = ("nutrition.cfg", "monsters.cfg", "experience.cfg",
             "characters.cfg", "glyphs.tsv")

    def __init__(self):
        self.nutrition = {
            k: int(v) for k, v in _read_kv(data_path("nutrition.cfg")).items()
        }
        self.monsters = {}
        for kind, value in _read_kv(data_path("monsters.cfg")).items():
            f = _fields(value)
            flags = set(filter(None, f.get("flags", "").split(",")))
            self.monsters[kind] = MonsterSpec(
                kind=kind, level=int(f["level"]),
                hp_dice=parse_dice(f["hp"]), ac=int(f["ac"]),
                dmg_dice=parse_dice(f["dmg"]), exp_value=int(f["exp"]),
                poisonous="poisonous" in flags, acidic="acidic" in flags,
                pet="pet" in flags,
            )
        self.exp_thresholds = sorted(
            (int(points), int(level))
            for level, points in _read_kv(data_path("experience.cfg")).items()
        )
        self.characters = {}
        for spec, value in _read_kv(data_path("characters.cfg")).items():
            f = _fields(value)
            inv = []
            for part in filter(None, f.get("inv", "").split(",")):
                kind, _, count = part.partition("*")
                inv.append((kind, int(count or 1)))
            self.characters[spec] = CharacterSpec(
                spec=spec, hp=int(f["hp"]), energy=int(f["energy"]),
                strength=int(f["str"]), dexterity=int(f["dex"]),
                constitution=int(f["con"]), intelligence=int(f["int"]),
                wisdom=int(f["wis"]), charisma=int(f["cha"]),
                armor_class=int(f["ac"]), weapon_dice=parse_dice(f["weapon"]),
                pet=f["pet"], inventory=tuple(inv),
            )
        self.hashes = {name: file_hash(data_path(name)) for name in self.FILES}

    def experience_level(self, points: int) -> int:
        level = 1
        for threshold, lvl in self.exp_thresholds:
            if points >= threshold:
                level = lvl
        return level

    def corpse_nutrition(self, species: str) -> int:
        return 10 * self.monsters[species].level + 20


_CONFIG: EngineConfig | None = None


def default_config() -> EngineConfig:
    global _CONFIG
    if _CONFIG is None:
        _CONFIG = EngineConfig()
    return _CONFIG
