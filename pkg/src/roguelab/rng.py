"""Named, independently seeded deterministic random streams.

A stream set derives one ``random.Random`` per named purpose from a
64-bit base seed, so consuming draws from one stream never shifts any
other. Derivation goes through blake2b rather than ``hash()`` to stay
stable across processes and interpreter runs.
"""

from __future__ import annotations

import hashlib
import random

# Streams seeded from the game seed (world content) vs. the episode
# seed (dynamics), per the seed-split contract.
GAME_STREAMS = ("level-topology", "item-placement")
EPISODE_STREAMS = ("monster-spawn", "combat")


def derive_seed(base_seed: int, name: str) -> int:
    h = hashlib.blake2b(digest_size=8)
    h.update(name.encode("utf-8"))
    h.update((base_seed & 0xFFFFFFFFFFFFFFFF).to_bytes(8, "little"))
    return int.from_bytes(h.digest(), "little")


def stream(base_seed: int, name: str) -> random.Random:
    return random.Random(derive_seed(base_seed, name))


class RngStreams:
    """The stream set carried by a game state."""

    def __init__(self, game_seed: int, episode_seed: int):
        self.game_seed = game_seed
        self.episode_seed = episode_seed
        self.item_placement = stream(game_seed, "item-placement")
        self.monster_spawn = stream(episode_seed, "monster-spawn")
        self.combat = stream(episode_seed, "combat")
