"""HTTP service exposing sessions, benchmarking and evaluation.

Each session owns one environment; observations are returned as a
base64 flat buffer in the layout served by ``GET /meta``. Benchmarks
and evals run in-process inside the request because their acceptance
numbers (throughput, determinism) must not include HTTP round-trips.
"""

from __future__ import annotations

import base64
import uuid

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .actions import ACTIONS, table_hash
from .bench import run_bench
from .config import default_config
from .env import TASKS, RoguelikeEnv, TaskConfig, run_eval, seed_pool
from .glyphs import data_path, max_glyph
from .layout import LAYOUT_FILE, default_layout
from .policies import POLICIES, make_policy

app = FastAPI(title="roguelab", version="1.0")

_SESSIONS: dict = {}


class SessionRequest(BaseModel):
    task: str = "score"
    character: str = "mon-hum-neu-mal"
    game_seed: int | None = None
    episode_seed: int | None = None
    max_steps: int | None = None


class SessionResponse(BaseModel):
    session_id: str
    obs: str
    done: bool = False


class StepRequest(BaseModel):
    action: int


class StepResponse(BaseModel):
    obs: str
    reward: float
    done: bool
    end_status: int | None
    time_advanced: bool
    turn: int
    steps: int


class BenchRequest(BaseModel):
    task: str = "score"
    policy: str = "random"
    seed: int = 0
    duration: float = Field(default=5.0, gt=0, le=120)


class EvalRequest(BaseModel):
    task: str = "score"
    policy: str = "random"
    master_seed: int = 0
    pool_size: int = Field(default=10, gt=0, le=1000)


def _pack(obs: dict) -> str:
    return base64.b64encode(default_layout().pack(obs)).decode("ascii")


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.get("/meta")
def meta() -> dict:
    with open(data_path(LAYOUT_FILE), "r", encoding="utf-8") as fh:
        layout_text = fh.read()
    return {
        "tasks": list(TASKS),
        "actions": [{"ascii": a.ascii_value, "name": a.name}
                    for a in ACTIONS],
        "action_table": table_hash(),
        "max_glyph": max_glyph(),
        "layout": layout_text,
        "config_hashes": default_config().hashes,
        "policies": sorted(POLICIES),
    }


@app.get("/seeds")
def seeds(master_seed: int = 0, size: int = 10) -> dict:
    if not 0 < size <= 1000:
        raise HTTPException(422, "size must be in 1..1000")
    return {"master_seed": master_seed, "size": size,
            "seeds": seed_pool(master_seed, size)}


@app.post("/sessions", response_model=SessionResponse)
def create_session(req: SessionRequest) -> SessionResponse:
    try:
        cfg = TaskConfig(task=req.task, character=req.character,
                         max_steps=req.max_steps)
        env = RoguelikeEnv(cfg)
        obs = env.reset(req.game_seed, req.episode_seed)
    except (ValueError, KeyError) as exc:
        raise HTTPException(422, str(exc)) from None
    session_id = uuid.uuid4().hex
    _SESSIONS[session_id] = env
    return SessionResponse(session_id=session_id, obs=_pack(obs))


def _get_session(session_id: str) -> RoguelikeEnv:
    env = _SESSIONS.get(session_id)
    if env is None:
        raise HTTPException(404, "no such session")
    return env


@app.post("/sessions/{session_id}/step", response_model=StepResponse)
def step_session(session_id: str, req: StepRequest) -> StepResponse:
    env = _get_session(session_id)
    try:
        obs, reward, done, info = env.step(req.action)
    except (ValueError, RuntimeError) as exc:
        raise HTTPException(422, str(exc)) from None
    return StepResponse(obs=_pack(obs), reward=reward, done=done,
                        end_status=info["end_status"],
                        time_advanced=info["time_advanced"],
                        turn=info["turn"], steps=info["steps"])


@app.post("/sessions/{session_id}/reset", response_model=SessionResponse)
def reset_session(session_id: str, req: SessionRequest) -> SessionResponse:
    env = _get_session(session_id)
    obs = env.reset(req.game_seed, req.episode_seed)
    return SessionResponse(session_id=session_id, obs=_pack(obs))


@app.delete("/sessions/{session_id}")
def delete_session(session_id: str) -> dict:
    if _SESSIONS.pop(session_id, None) is None:
        raise HTTPException(404, "no such session")
    return {"deleted": session_id}


@app.post("/bench")
def bench(req: BenchRequest) -> dict:
    try:
        result = run_bench(task=req.task, policy=req.policy, seed=req.seed,
                           duration=req.duration)
    except ValueError as exc:
        raise HTTPException(422, str(exc)) from None
    return result.as_dict()


@app.post("/eval")
def evaluate(req: EvalRequest) -> dict:
    try:
        policy = make_policy(req.policy, req.master_seed)
        report = run_eval(req.task, policy, req.master_seed, req.pool_size)
    except ValueError as exc:
        raise HTTPException(422, str(exc)) from None
    return report.summary()
