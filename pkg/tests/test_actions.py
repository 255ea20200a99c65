import pytest

from roguelab.actions import (
    ACTIONS, BY_ASCII, BY_NAME, DEFAULT_ACTION_SET, IllegalActionError,
    MOVE_DELTAS, lookup, table_hash,
)

EXPECTED_COMPASS = {
    "north": (107, 75), "east": (108, 76), "south": (106, 74),
    "west": (104, 72), "northeast": (117, 85), "southeast": (110, 78),
    "southwest": (98, 66), "northwest": (121, 89),
}

EXPECTED_COMMANDS = {
    "kick": 4, "pickup": 44, "up": 60, "down": 62,
    "eat": 101, "open": 111, "search": 115,
}


def test_action_count():
    assert len(ACTIONS) == 23
    assert len(DEFAULT_ACTION_SET) == 23


def test_compass_ascii_values():
    for name, (step, far) in EXPECTED_COMPASS.items():
        assert BY_NAME[name].ascii_value == step
        assert BY_NAME[name + "-far"].ascii_value == far


def test_command_ascii_values():
    for name, value in EXPECTED_COMMANDS.items():
        assert BY_NAME[name].ascii_value == value


def test_ascii_values_unique():
    values = [a.ascii_value for a in ACTIONS]
    assert len(set(values)) == len(values)


def test_move_deltas_pair_step_and_far():
    for name, (step, far) in EXPECTED_COMPASS.items():
        dy1, dx1, f1 = MOVE_DELTAS[step]
        dy2, dx2, f2 = MOVE_DELTAS[far]
        assert (dy1, dx1) == (dy2, dx2)
        assert not f1 and f2
        assert (dy1, dx1) != (0, 0)


def test_lookup_by_name_int_and_identity():
    act = BY_NAME["eat"]
    assert lookup("eat") is act
    assert lookup(101) is act
    assert lookup(act) is act


def test_lookup_rejects_unknown():
    with pytest.raises(IllegalActionError):
        lookup(1)
    with pytest.raises(IllegalActionError):
        lookup("fly")


def test_table_hash_is_stable_and_hex():
    h = table_hash()
    assert h == table_hash()
    assert len(h) == 64
    int(h, 16)


def test_int_conversion():
    assert int(BY_ASCII[62]) == 62
