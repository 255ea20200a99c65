import numpy as np
import pytest

from roguelab.engine import GameState
from roguelab.layout import LayoutError, default_layout, parse_layout
from roguelab.observe import render_observation


def test_default_layout_fields_and_size():
    layout = default_layout()
    names = [f.name for f in layout.fields]
    assert names == ["glyphs", "chars", "colors", "specials", "blstats",
                     "message", "inv_glyphs", "inv_strs", "inv_letters",
                     "inv_oclasses"]
    assert layout.total_bytes == 13271
    # offsets are tightly packed
    running = 0
    for f in layout.fields:
        assert f.offset == running
        running += f.nbytes


def test_pack_unpack_roundtrip():
    layout = default_layout()
    obs = render_observation(GameState(3, 4)).as_dict()
    buf = layout.pack(obs)
    assert len(buf) == layout.total_bytes
    back = layout.unpack(buf)
    for name, arr in obs.items():
        assert np.array_equal(arr, back[name]), name
        assert back[name].dtype.itemsize == arr.dtype.itemsize


def test_unpack_rejects_wrong_size():
    layout = default_layout()
    with pytest.raises(LayoutError):
        layout.unpack(b"\0" * 10)


def test_pack_rejects_wrong_shape():
    layout = default_layout()
    obs = render_observation(GameState(3, 4)).as_dict()
    obs["blstats"] = obs["blstats"][:10]
    with pytest.raises(LayoutError):
        layout.pack(obs)


def test_parse_rejects_malformed_file(tmp_path):
    bad = tmp_path / "layout.txt"
    bad.write_text("glyphs int16\n")
    with pytest.raises(LayoutError):
        parse_layout(str(bad))
    bad.write_text("glyphs float64 21x79\n")
    with pytest.raises(LayoutError):
        parse_layout(str(bad))
    bad.write_text("")
    with pytest.raises(LayoutError):
        parse_layout(str(bad))
