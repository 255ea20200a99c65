"""Scripted observation-driven policies for benchmarks and smoke evals.

All policies read only the observation dict (no engine internals) so
they exercise the same interface an external agent would.
"""

from __future__ import annotations

import random

import numpy as np

from .actions import BY_NAME, DEFAULT_ACTION_SET
from .rng import derive_seed

_DIR_TO_ACTION = {
    (-1, 0): "north", (1, 0): "south", (0, -1): "west", (0, 1): "east",
    (-1, 1): "northeast", (1, 1): "southeast",
    (1, -1): "southwest", (-1, -1): "northwest",
}


class RandomPolicy:
    """Uniform over the allowed action set; deterministic under its seed."""

    def __init__(self, seed: int = 0, action_set: tuple = DEFAULT_ACTION_SET):
        self._seed = seed
        self.action_set = tuple(action_set)
        self.rng = random.Random(derive_seed(seed, "random-policy"))

    def reset(self) -> None:
        self.rng = random.Random(derive_seed(self._seed, "random-policy"))

    def __call__(self, obs) -> int:
        return self.action_set[self.rng.randrange(len(self.action_set))]


_MONSTER_CHARS = frozenset(ord(c) for c in ":rdkboaG")
_WALKABLE_CHARS = frozenset(
    ord(c) for c in ".#'<>^@$%f") | _MONSTER_CHARS
_DOOR_CHAR = ord("+")
_UNSEEN_CHAR = 32

_STEPS8 = tuple(_DIR_TO_ACTION)


class GreedyDescendPolicy:
    """Pathfind to a known downward staircase and take it; while none
    is known, pathfind to the nearest unexplored frontier."""

    def __init__(self, seed: int = 0):
        self._seed = seed
        self.reset()

    def reset(self) -> None:
        self.rng = random.Random(derive_seed(self._seed, "greedy-descend"))
        self._prev_pos = None
        self._stuck = 0
        self._last_target = None
        self._blocked = set()  # cells we bumped into; mostly solid rock
        self._stairs = {}  # depth -> (y, x); the hero glyph hides '>'

    def _random_move(self) -> int:
        name = self.rng.choice(tuple(_DIR_TO_ACTION.values()))
        return BY_NAME[name].ascii_value

    def _first_step(self, chars, hy, hx, goal_mask):
        """BFS over walkable/door tiles; returns the first move of the
        shortest path to any goal cell, or None."""
        from collections import deque

        h, w = chars.shape
        seen = np.zeros((h, w), dtype=bool)
        seen[hy, hx] = True
        queue = deque()
        for dy, dx in _STEPS8:
            y, x = hy + dy, hx + dx
            if 0 <= y < h and 0 <= x < w and not seen[y, x]:
                c = int(chars[y, x])
                if goal_mask[y, x] or c in _WALKABLE_CHARS \
                        or c == _DOOR_CHAR:
                    seen[y, x] = True
                    queue.append((y, x, (dy, dx)))
        while queue:
            y, x, first = queue.popleft()
            if goal_mask[y, x]:
                return first
            for dy, dx in _STEPS8:
                ny, nx = y + dy, x + dx
                if 0 <= ny < h and 0 <= nx < w and not seen[ny, nx]:
                    c = int(chars[ny, nx])
                    if goal_mask[ny, nx] or c in _WALKABLE_CHARS \
                            or c == _DOOR_CHAR:
                        seen[ny, nx] = True
                        queue.append((ny, nx, first))
        return None

    def __call__(self, obs) -> int:
        blstats = obs["blstats"]
        hx, hy = int(blstats[0]), int(blstats[1])
        chars = obs["chars"]
        depth = int(blstats[24])
        pos = (depth, hy, hx)
        if pos == self._prev_pos:
            self._stuck += 1
            if self._last_target is not None:
                self._blocked.add(self._last_target)
        else:
            self._stuck = 0
        self._prev_pos = pos
        self._last_target = None
        if self._stuck >= 12:
            return self._random_move()

        # fight back before anything else: an adjacent monster chips
        # away every turn it is left alive
        for dy, dx in _STEPS8:
            y, x = hy + dy, hx + dx
            if 0 <= y < chars.shape[0] and 0 <= x < chars.shape[1] \
                    and int(chars[y, x]) in _MONSTER_CHARS \
                    and not (obs["specials"][y, x] & 1):
                return BY_NAME[_DIR_TO_ACTION[(dy, dx)]].ascii_value

        stairs = chars == ord(">")
        if stairs.any():
            y, x = map(int, np.argwhere(stairs)[0])
            self._stairs[depth] = (y, x)
        if self._stairs.get(depth) == (hy, hx):
            return BY_NAME["down"].ascii_value
        if depth in self._stairs:
            goal = np.zeros_like(stairs)
            goal[self._stairs[depth]] = True
        else:
            # frontier: any tile still rendered as unexplored darkness
            goal = chars == _UNSEEN_CHAR
        for (d, y, x) in self._blocked:
            if d == depth:
                goal[y, x] = False
        if not goal.any():
            return self._random_move()
        step = self._first_step(chars, hy, hx, goal)
        if step is None:
            return self._random_move()
        dy, dx = step
        ty, tx = hy + dy, hx + dx
        if int(chars[ty, tx]) == _DOOR_CHAR:
            # closed (or locked) door in the way: open it, kick if that
            # keeps failing
            if self._stuck >= 3 and self.rng.random() < 0.5:
                return BY_NAME["kick"].ascii_value
            return BY_NAME["open"].ascii_value
        self._last_target = (depth, ty, tx)
        return BY_NAME[_DIR_TO_ACTION[(dy, dx)]].ascii_value


class AlwaysSearchPolicy:
    """Repeats the search action forever; useful as a minimal baseline."""

    def __call__(self, obs) -> int:
        return BY_NAME["search"].ascii_value


POLICIES = {
    "random": RandomPolicy,
    "greedy-descend": GreedyDescendPolicy,
    "always-search": lambda seed=0: AlwaysSearchPolicy(),
}


def make_policy(name: str, seed: int = 0):
    try:
        return POLICIES[name](seed)
    except KeyError:
        raise ValueError(f"unknown policy {name!r}") from None
