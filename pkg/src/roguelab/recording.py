"""Episode recording and bit-exact replay verification.

A recording is line-delimited UTF-8 JSON: a header line pinning seeds
and config/action-table hashes, one line per step with the action, the
reward, whether game time advanced, and a short frame hash, then a
footer with episode totals. Replay re-runs the episode from the pinned
seeds and compares every line, so any engine or config drift (or a
tampered file) is detected.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .actions import table_hash
from .config import default_config
from .env import RoguelikeEnv, TaskConfig

MAGIC = "ROGUELAB-REC"
VERSION = 1


class RecordingError(ValueError):
    pass


def frame_hash(obs: dict) -> str:
    """Short content hash of the visible frame (chars + colors)."""
    h = hashlib.sha256()
    h.update(obs["chars"].tobytes())
    h.update(obs["colors"].tobytes())
    return h.digest()[:8].hex()


def _header(env: RoguelikeEnv) -> dict:
    return {
        "magic": MAGIC,
        "version": VERSION,
        "task": env.config.task,
        "character": env.config.character,
        "max_steps": env.config.max_steps,
        "game_seed": env._game_seed,
        "episode_seed": env._episode_seed,
        "config_hashes": default_config().hashes,
        "action_table": table_hash(),
    }


def record_episode(env: RoguelikeEnv, policy, game_seed: int,
                   episode_seed: int, path: str) -> dict:
    """Play one episode and write its recording; returns the footer."""
    obs = env.reset(game_seed, episode_seed)
    if hasattr(policy, "reset"):
        policy.reset()
    lines = [json.dumps(_header(env), sort_keys=True)]
    total = 0.0
    done = False
    while not done:
        action = policy(obs)
        obs, reward, done, info = env.step(action)
        total += reward
        lines.append(json.dumps({
            "a": int(action), "r": round(reward, 9),
            "t": info["time_advanced"], "h": frame_hash(obs),
        }, sort_keys=True))
    footer = {
        "end": env.end_status, "steps": env.steps, "turns": env.state.turn,
        "total_reward": round(total, 9), "score": env.state.score,
    }
    lines.append(json.dumps(footer, sort_keys=True))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return footer


def read_recording(path: str) -> tuple[dict, list, dict]:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in (l.strip() for l in fh) if ln]
    if not lines:
        raise RecordingError("empty recording")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise RecordingError(f"bad header line: {exc}") from None
    if header.get("magic") != MAGIC:
        raise RecordingError("not a recording file (bad magic)")
    if header.get("version") != VERSION:
        raise RecordingError(
            f"unsupported recording version {header.get('version')}")
    try:
        body = [json.loads(ln) for ln in lines[1:]]
    except json.JSONDecodeError as exc:
        raise RecordingError(f"corrupt step line: {exc}") from None
    if not body or "end" not in body[-1]:
        raise RecordingError("missing footer")
    return header, body[:-1], body[-1]


@dataclass
class ReplayReport:
    ok: bool
    steps_checked: int
    mismatches: list = field(default_factory=list)

    def first_mismatch(self):
        return self.mismatches[0] if self.mismatches else None


def _env_from_header(header: dict) -> RoguelikeEnv:
    cfg = TaskConfig(task=header["task"], character=header["character"],
                     max_steps=header["max_steps"])
    return RoguelikeEnv(cfg)


def replay_verify(path: str, stop_on_first: bool = False) -> ReplayReport:
    """Re-run a recording from its seeds and diff every step line."""
    header, steps, footer = read_recording(path)
    mismatches = []
    cfg_hashes = default_config().hashes
    if header["config_hashes"] != cfg_hashes:
        mismatches.append({"step": -1, "field": "config_hashes",
                           "recorded": header["config_hashes"],
                           "replayed": cfg_hashes})
    if header["action_table"] != table_hash():
        mismatches.append({"step": -1, "field": "action_table",
                           "recorded": header["action_table"],
                           "replayed": table_hash()})
    if mismatches and stop_on_first:
        return ReplayReport(False, 0, mismatches)

    env = _env_from_header(header)
    env.reset(header["game_seed"], header["episode_seed"])
    total = 0.0
    checked = 0
    for i, rec in enumerate(steps):
        if env.done:
            mismatches.append({"step": i, "field": "length",
                               "recorded": "step", "replayed": "episode end"})
            break
        obs, reward, done, info = env.step(rec["a"])
        total += reward
        checked += 1
        for fld, got in (("r", round(reward, 9)),
                         ("t", info["time_advanced"]),
                         ("h", frame_hash(obs))):
            if rec[fld] != got:
                mismatches.append({"step": i, "field": fld,
                                   "recorded": rec[fld], "replayed": got})
                if stop_on_first:
                    return ReplayReport(False, checked, mismatches)
    else:
        replayed_footer = {
            "end": env.end_status, "steps": env.steps,
            "turns": env.state.turn, "total_reward": round(total, 9),
            "score": env.state.score,
        }
        for key, got in replayed_footer.items():
            if footer.get(key) != got:
                mismatches.append({"step": len(steps), "field": key,
                                   "recorded": footer.get(key),
                                   "replayed": got})
        if not env.done:
            mismatches.append({"step": len(steps), "field": "length",
                               "recorded": "episode end",
                               "replayed": "still running"})
    return ReplayReport(not mismatches, checked, mismatches)


def render_replay(path: str):
    """Yield (step_index, frame_text, reward) tuples by re-running the
    recording; frame_text is the 21x79 character grid."""
    header, steps, _footer = read_recording(path)
    env = _env_from_header(header)
    obs = env.reset(header["game_seed"], header["episode_seed"])
    yield -1, _frame_text(obs), 0.0
    for i, rec in enumerate(steps):
        if env.done:
            break
        obs, reward, _done, _info = env.step(rec["a"])
        yield i, _frame_text(obs), reward


def _frame_text(obs: dict) -> str:
    return "\n".join(bytes(row).decode("ascii") for row in obs["chars"])


def extract_stats(path: str) -> dict:
    """Summary statistics straight from the file, without replaying."""
    header, steps, footer = read_recording(path)
    rewards = [s["r"] for s in steps]
    advancing = sum(1 for s in steps if s["t"])
    return {
        "task": header["task"],
        "character": header["character"],
        "game_seed": header["game_seed"],
        "episode_seed": header["episode_seed"],
        "steps": len(steps),
        "turns": footer["turns"],
        "time_advancing_steps": advancing,
        "total_reward": footer["total_reward"],
        "mean_reward": sum(rewards) / len(rewards) if rewards else 0.0,
        "max_step_reward": max(rewards, default=0.0),
        "end_status": footer["end"],
        "score": footer["score"],
        "action_counts": _action_counts(steps),
    }


def _action_counts(steps) -> dict:
    counts: dict = {}
    for s in steps:
        counts[s["a"]] = counts.get(s["a"], 0) + 1
    return {str(k): v for k, v in sorted(counts.items())}
