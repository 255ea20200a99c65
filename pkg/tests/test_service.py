import base64

import numpy as np
import pytest
from fastapi.testclient import TestClient

from roguelab.env import RoguelikeEnv, TaskConfig
from roguelab.layout import default_layout
from roguelab.service import app


@pytest.fixture
def client():
    return TestClient(app)


def test_health(client):
    assert client.get("/health").json() == {"status": "ok"}


def test_meta_lists_interface(client):
    meta = client.get("/meta").json()
    assert len(meta["actions"]) == 23
    assert meta["tasks"][0] == "staircase"
    assert "glyphs int16 21x79" in meta["layout"]
    assert "random" in meta["policies"]


def test_seed_endpoint_matches_library(client):
    from roguelab.env import seed_pool
    body = client.get("/seeds", params={"master_seed": 5, "size": 10}).json()
    assert body["seeds"] == seed_pool(5, 10)


def test_session_lifecycle_matches_native(client):
    layout = default_layout()
    created = client.post("/sessions", json={
        "task": "score", "game_seed": 81, "episode_seed": 82}).json()
    sid = created["session_id"]
    native = RoguelikeEnv(TaskConfig(task="score"))
    native_obs = native.reset(81, 82)
    remote_obs = layout.unpack(base64.b64decode(created["obs"]))
    for name in native_obs:
        assert np.array_equal(remote_obs[name], native_obs[name]), name

    step = client.post(f"/sessions/{sid}/step", json={"action": 107}).json()
    obs_native, reward, done, _info = native.step(107)
    assert step["reward"] == reward
    assert step["done"] == done
    remote_obs = layout.unpack(base64.b64decode(step["obs"]))
    for name in obs_native:
        assert np.array_equal(remote_obs[name], obs_native[name]), name

    assert client.delete(f"/sessions/{sid}").status_code == 200
    assert client.delete(f"/sessions/{sid}").status_code == 404


def test_invalid_task_rejected(client):
    resp = client.post("/sessions", json={"task": "fly"})
    assert resp.status_code == 422


def test_invalid_action_rejected(client):
    sid = client.post("/sessions", json={
        "task": "score", "game_seed": 1}).json()["session_id"]
    resp = client.post(f"/sessions/{sid}/step", json={"action": 1})
    assert resp.status_code == 422
    client.delete(f"/sessions/{sid}")


def test_bench_endpoint(client):
    body = client.post("/bench", json={"duration": 0.2}).json()
    assert body["steps"] > 0
    assert body["sps"] > 0


def test_eval_endpoint(client):
    body = client.post("/eval", json={
        "task": "score", "policy": "random", "master_seed": 3,
        "pool_size": 2}).json()
    assert body["episodes"] == 2
    assert "mean_reward" in body
