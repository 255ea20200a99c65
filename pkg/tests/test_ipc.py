import base64
import json
import subprocess
import sys

import numpy as np
import pytest

from roguelab.env import RoguelikeEnv, TaskConfig
from roguelab.layout import default_layout


class IpcClient:
    def __init__(self):
        self.proc = subprocess.Popen(
            [sys.executable, "-m", "roguelab.ipc"],
            stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True)

    def call(self, **req):
        self.proc.stdin.write(json.dumps(req) + "\n")
        self.proc.stdin.flush()
        return json.loads(self.proc.stdout.readline())

    def close(self):
        try:
            self.call(op="close")
        finally:
            self.proc.wait(timeout=10)


@pytest.fixture
def client():
    c = IpcClient()
    yield c
    c.close()


def test_hello_describes_interface(client):
    resp = client.call(op="hello")
    assert resp["ok"]
    assert "glyphs int16 21x79" in resp["layout"]
    assert len(resp["actions"]) == 23
    assert resp["max_glyph"] > 0
    assert len(resp["action_table"]) == 64


def test_reset_step_roundtrip_matches_native(client):
    layout = default_layout()
    resp = client.call(op="reset", task="score", game_seed=61,
                       episode_seed=62)
    assert resp["ok"]
    remote_obs = layout.unpack(base64.b64decode(resp["obs"]))

    env = RoguelikeEnv(TaskConfig(task="score"))
    native_obs = env.reset(61, 62)
    for name in native_obs:
        assert np.array_equal(remote_obs[name], native_obs[name]), name

    for action in (107, 108, 115, 106):
        r = client.call(op="step", action=action)
        assert r["ok"]
        obs_remote = layout.unpack(base64.b64decode(r["obs"]))
        obs_native, reward, done, info = env.step(action)
        assert r["reward"] == reward
        assert r["done"] == done
        assert r["info"]["time_advanced"] == info["time_advanced"]
        for name in obs_native:
            assert np.array_equal(obs_remote[name], obs_native[name]), name


def test_step_before_reset_fails(client):
    resp = client.call(op="step", action=107)
    assert not resp["ok"]


def test_unknown_op_reports_error(client):
    resp = client.call(op="dance")
    assert not resp["ok"]
    assert "unknown op" in resp["error"]


def test_bad_json_keeps_serving(client):
    client.proc.stdin.write("this is not json\n")
    client.proc.stdin.flush()
    resp = json.loads(client.proc.stdout.readline())
    assert not resp["ok"]
    assert client.call(op="hello")["ok"]
