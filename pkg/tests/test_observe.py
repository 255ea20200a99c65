import numpy as np
import pytest

from roguelab import glyphs
from roguelab.engine import GameState
from roguelab.observe import (
    BLSTATS_LEN, INV_SIZE, INV_STR_LEN, MAP_H, MAP_W, MAXOCLASSES,
    MESSAGE_LEN, MSG_PAD, SPECIAL_PET_BIT, crop_glyphs, encode_message,
    render_observation,
)


@pytest.fixture
def state():
    return GameState(game_seed=11, episode_seed=12)


def test_observation_shapes_and_dtypes(state):
    obs = render_observation(state)
    assert obs.glyphs.shape == (MAP_H, MAP_W)
    assert obs.glyphs.dtype == np.int16
    assert obs.chars.shape == (MAP_H, MAP_W)
    assert obs.chars.dtype == np.uint8
    assert obs.colors.shape == (MAP_H, MAP_W)
    assert obs.specials.shape == (MAP_H, MAP_W)
    assert obs.blstats.shape == (BLSTATS_LEN,)
    assert obs.blstats.dtype == np.int32
    assert obs.message.shape == (MESSAGE_LEN,)
    assert obs.inv_glyphs.shape == (INV_SIZE,)
    assert obs.inv_strs.shape == (INV_SIZE, INV_STR_LEN)
    assert obs.inv_letters.shape == (INV_SIZE,)
    assert obs.inv_oclasses.shape == (INV_SIZE,)


def test_blstats_layout(state):
    obs = render_observation(state)
    b = obs.blstats
    hero = state.hero
    assert b[0] == hero.x and b[1] == hero.y
    assert b[3] == hero.strength
    assert b[9] == state.score
    assert b[10] == hero.hp and b[11] == hero.max_hp
    assert b[12] == hero.depth
    assert b[13] == hero.gold
    assert b[18] == hero.exp_level
    assert b[20] == state.turn
    assert b[21] == state.hunger_state()
    assert b[22] == 25 * hero.strength + 50
    assert b[24] == hero.depth


def test_hero_rendered_at_position(state):
    obs = render_observation(state)
    hero = state.hero
    assert obs.chars[hero.y, hero.x] == ord("@")
    assert obs.glyphs[hero.y, hero.x] == glyphs.glyph_for("hero")


def test_unseen_tiles_render_blank(state):
    obs = render_observation(state)
    unseen = state.level.vis == 0
    assert unseen.any()
    assert (obs.chars[unseen] == 32).all()
    assert (obs.glyphs[unseen] == 0).all()


def test_pet_bit_set_when_pet_visible(state):
    pet = state.pet
    assert pet is not None
    obs = render_observation(state)
    if state.level.vis[pet.y, pet.x] == 2:
        assert obs.specials[pet.y, pet.x] & SPECIAL_PET_BIT
    assert (obs.specials & ~np.uint8(SPECIAL_PET_BIT) == 0).all()


def test_message_encoding_alphabet():
    out = encode_message("Hi!")
    assert out[0] == ord("H") - 32
    assert out[1] == ord("i") - 32
    assert out[2] == ord("!") - 32
    assert (out[3:] == MSG_PAD).all()
    # non-printable characters map to the pad symbol
    assert encode_message("\t")[0] == MSG_PAD


def test_message_truncates_at_buffer(state):
    out = encode_message("x" * 500)
    assert out.shape == (MESSAGE_LEN,)
    assert (out != MSG_PAD).all()


def test_crop_requires_odd_size(state):
    obs = render_observation(state)
    with pytest.raises(ValueError):
        crop_glyphs(obs.glyphs, (5, 5), k=8)


def test_crop_centers_and_pads(state):
    obs = render_observation(state)
    hero = state.hero
    crop = crop_glyphs(obs.glyphs, (hero.x, hero.y), k=9)
    assert crop.shape == (9, 9)
    assert crop[4, 4] == glyphs.glyph_for("hero")
    corner = crop_glyphs(obs.glyphs, (0, 0), k=9)
    assert corner[0, 0] == glyphs.max_glyph()
    assert corner[4, 4] == obs.glyphs[0, 0]


def test_inventory_arrays_padded(state):
    obs = render_observation(state)
    n = len(state.inventory)
    assert n > 0
    assert (obs.inv_glyphs[n:] == glyphs.max_glyph()).all()
    assert (obs.inv_oclasses[n:] == MAXOCLASSES).all()
    assert (obs.inv_letters[n:] == 0).all()
    assert obs.inv_letters[0] == ord("a")
    first = bytes(obs.inv_strs[0]).rstrip(b"\0").decode()
    assert "food ration" in first


def test_render_is_pure(state):
    a = render_observation(state)
    b = render_observation(state)
    for name, arr in a.as_dict().items():
        assert np.array_equal(arr, b.as_dict()[name]), name
    # mutating a returned array must not leak into the next render
    a.glyphs[:] = 0
    c = render_observation(state)
    assert c.glyphs[state.hero.y, state.hero.x] == glyphs.glyph_for("hero")
