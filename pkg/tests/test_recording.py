import json

import pytest

from roguelab.env import RoguelikeEnv, TaskConfig
from roguelab.policies import make_policy
from roguelab.recording import (
    MAGIC, RecordingError, extract_stats, read_recording, record_episode,
    render_replay, replay_verify,
)


@pytest.fixture
def recording(tmp_path):
    env = RoguelikeEnv(TaskConfig(task="score", max_steps=120))
    path = str(tmp_path / "episode.rec")
    footer = record_episode(env, make_policy("random", 3), 71, 72, path)
    return path, footer


def test_header_and_footer(recording):
    path, footer = recording
    header, steps, file_footer = read_recording(path)
    assert header["magic"] == MAGIC
    assert header["game_seed"] == 71
    assert header["episode_seed"] == 72
    assert set(header["config_hashes"])
    assert file_footer == footer
    assert len(steps) == footer["steps"]
    for s in steps:
        assert set(s) == {"a", "r", "t", "h"}
        assert len(s["h"]) == 16


def test_replay_verifies_clean_recording(recording):
    path, footer = recording
    report = replay_verify(path)
    assert report.ok, report.mismatches[:3]
    assert report.steps_checked == footer["steps"]


def test_replay_detects_action_mutation(recording, tmp_path):
    path, _ = recording
    lines = open(path).read().splitlines()
    step = json.loads(lines[1])
    step["a"] = 107 if step["a"] != 107 else 108
    lines[1] = json.dumps(step, sort_keys=True)
    mutated = tmp_path / "mutated.rec"
    mutated.write_text("\n".join(lines) + "\n")
    report = replay_verify(str(mutated))
    assert not report.ok
    assert report.mismatches


def test_replay_detects_reward_tampering(recording, tmp_path):
    path, _ = recording
    lines = open(path).read().splitlines()
    step = json.loads(lines[-2])
    step["r"] = step["r"] + 1.0
    lines[-2] = json.dumps(step, sort_keys=True)
    mutated = tmp_path / "tampered.rec"
    mutated.write_text("\n".join(lines) + "\n")
    report = replay_verify(str(mutated))
    assert not report.ok


def test_bad_magic_rejected(tmp_path):
    path = tmp_path / "junk.rec"
    path.write_text(json.dumps({"magic": "NOPE"}) + "\n")
    with pytest.raises(RecordingError):
        read_recording(str(path))


def test_truncated_file_rejected(recording, tmp_path):
    path, _ = recording
    lines = open(path).read().splitlines()
    truncated = tmp_path / "short.rec"
    truncated.write_text("\n".join(lines[:-1]) + "\n")
    with pytest.raises(RecordingError):
        read_recording(str(truncated))


def test_render_replay_yields_frames(recording):
    path, footer = recording
    frames = list(render_replay(path))
    assert len(frames) == footer["steps"] + 1
    idx, text, _reward = frames[0]
    assert idx == -1
    rows = text.splitlines()
    assert len(rows) == 21
    assert all(len(r) == 79 for r in rows)
    assert "@" in text


def test_extract_stats(recording):
    path, footer = recording
    stats = extract_stats(path)
    assert stats["steps"] == footer["steps"]
    assert stats["total_reward"] == footer["total_reward"]
    assert stats["end_status"] == footer["end"]
    assert sum(stats["action_counts"].values()) == stats["steps"]
    assert 0 <= stats["time_advancing_steps"] <= stats["steps"]
