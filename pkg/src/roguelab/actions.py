"""Action ids: ASCII-keyed compass moves and command actions.

The table holds the 16 compass entries (8 one-step, 8 move-far) plus
the command actions the engine implements. ASCII values are the
standard roguelike key bindings (h/j/k/l etc., Ctrl-D for kick).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass


@dataclass(frozen=True)
class ActionId:
    ascii_value: int
    name: str

    def __int__(self) -> int:
        return self.ascii_value


class IllegalActionError(ValueError):
    pass


# direction -> (dy, dx, one-step ascii, move-far ascii)
_COMPASS = {
    "north": (-1, 0, 107, 75),  # k / K
    "east": (0, 1, 108, 76),  # l / L
    "south": (1, 0, 106, 74),  # j / J
    "west": (0, -1, 104, 72),  # h / H
    "northeast": (-1, 1, 117, 85),  # u / U
    "southeast": (1, 1, 110, 78),  # n / N
    "southwest": (1, -1, 98, 66),  # b / B
    "northwest": (-1, -1, 121, 89),  # y / Y
}

_COMMANDS = {
    "kick": 4,  # C-d
    "pickup": 44,  # ,
    "up": 60,  # <
    "down": 62,  # >
    "eat": 101,  # e
    "open": 111,  # o
    "search": 115,  # s
}

ACTIONS: list[ActionId] = []
MOVE_DELTAS: dict[int, tuple] = {}  # ascii -> (dy, dx, far)
for _name, (_dy, _dx, _step, _far) in _COMPASS.items():
    ACTIONS.append(ActionId(_step, _name))
    MOVE_DELTAS[_step] = (_dy, _dx, False)
    ACTIONS.append(ActionId(_far, _name + "-far"))
    MOVE_DELTAS[_far] = (_dy, _dx, True)
for _name, _value in sorted(_COMMANDS.items(), key=lambda kv: kv[1]):
    ACTIONS.append(ActionId(_value, _name))

BY_ASCII = {a.ascii_value: a for a in ACTIONS}
BY_NAME = {a.name: a for a in ACTIONS}

DEFAULT_ACTION_SET = tuple(a.ascii_value for a in ACTIONS)


def lookup(action) -> ActionId:
    """Resolve an ActionId, ascii value, or action name."""
    if isinstance(action, ActionId):
        return action
    if isinstance(action, int):
        try:
            return BY_ASCII[action]
        except KeyError:
            raise IllegalActionError(f"unknown action value {action}") from None
    try:
        return BY_NAME[action]
    except KeyError:
        raise IllegalActionError(f"unknown action {action!r}") from None


def table_hash() -> str:
    h = hashlib.sha256()
    for a in ACTIONS:
        h.update(f"{a.name}:{a.ascii_value}\n".encode())
    return h.hexdigest()
