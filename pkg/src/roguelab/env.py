"""Episode-level environment: tasks, rewards, seed pools, evaluation.

Wraps the turn engine in a reset/step interface with seven reward
tasks. Rewards are computed from bookkeeping deltas (score, gold,
nutrition, uncovered tiles) so they stay consistent with the stats
vector by construction.
"""

from __future__ import annotations

import csv
import json
import statistics
import time
from dataclasses import dataclass, field

from .actions import DEFAULT_ACTION_SET, lookup, table_hash
from .config import default_config
from .dungeon import GenParams
from .engine import GameState, play_turn
from .observe import render_observation
from .rng import derive_seed

TASKS = ("staircase", "pet", "eat", "gold", "scout", "score", "oracle")

TIME_PENALTY = -0.001
STAIRCASE_REWARD = 100.0
ORACLE_REWARD = 1000.0

_DEFAULT_MAX_STEPS = {
    "staircase": 1000,
    "pet": 1000,
    "eat": 2000,
    "gold": 2000,
    "scout": 2000,
    "score": 2000,
    "oracle": 5000,
}

END_ABORTED = 0
END_DEATH = 1
END_SUCCESS = 2


class UnknownTaskError(ValueError):
    pass


@dataclass
class TaskConfig:
    task: str = "score"
    character: str = "mon-hum-neu-mal"
    max_steps: int | None = None
    allowed_actions: tuple = DEFAULT_ACTION_SET
    autopickup_gold: bool = True
    gen_params: GenParams = field(default_factory=GenParams)

    def __post_init__(self):
        if self.task not in TASKS:
            raise UnknownTaskError(f"unknown task {self.task!r}")
        if self.max_steps is None:
            self.max_steps = _DEFAULT_MAX_STEPS[self.task]
        self.allowed_actions = tuple(
            lookup(a).ascii_value for a in self.allowed_actions)

    @classmethod
    def from_file(cls, path: str) -> "TaskConfig":
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        gp = raw.pop("gen_params", None)
        cfg = cls(**{k: v for k, v in raw.items()})
        if gp:
            cfg.gen_params = GenParams(**gp)
        return cfg


def seed_pool(master_seed: int, size: int, label: str = "train") -> list[int]:
    """Deterministic pool of game seeds; a prefix of a larger pool from
    the same master seed and label is identical to the smaller pool."""
    if size <= 0:
        raise ValueError("pool size must be positive")
    return [derive_seed(master_seed, f"seed-pool:{label}:{i}")
            for i in range(size)]


def train_test_pools(master_seed: int, train_size: int,
                     test_size: int = 100) -> tuple[list[int], list[int]]:
    """Disjoint training and held-out seed pools from one master seed.

    Held-out candidates colliding with a training seed are skipped, so
    disjointness holds by construction for any sizes."""
    train = seed_pool(master_seed, train_size, "train")
    train_set = set(train)
    test: list[int] = []
    i = 0
    while len(test) < test_size:
        seed = derive_seed(master_seed, f"seed-pool:test:{i}")
        i += 1
        if seed not in train_set and seed not in test:
            test.append(seed)
    return train, test


class RoguelikeEnv:
    """reset/step interface over the engine with task rewards."""

    def __init__(self, config: TaskConfig | None = None):
        self.config = config or TaskConfig()
        self.engine_config = default_config()
        self.state: GameState | None = None
        self.steps = 0
        self.done = True
        self.end_status = END_ABORTED
        self._game_seed = None
        self._episode_seed = None
        self._reset_count = 0

    @property
    def action_space(self) -> tuple:
        return self.config.allowed_actions

    def seed(self, game_seed: int, episode_seed: int | None = None) -> None:
        self._game_seed = game_seed
        self._episode_seed = (episode_seed if episode_seed is not None
                              else derive_seed(game_seed, "episode"))

    def reset(self, game_seed: int | None = None,
              episode_seed: int | None = None) -> dict:
        if game_seed is not None:
            self.seed(game_seed, episode_seed)
        if self._game_seed is None:
            self.seed(int(time.time_ns()) & 0xFFFFFFFFFFFFFFFF)
        elif game_seed is None and self._reset_count > 0:
            # unseeded re-reset advances to the next derived episode
            self._episode_seed = derive_seed(
                self._episode_seed, "next-episode")
        self._reset_count += 1
        self.state = GameState(
            self._game_seed, self._episode_seed,
            character_spec=self.config.character,
            gen_params=self.config.gen_params,
            autopickup_gold=self.config.autopickup_gold,
        )
        self.steps = 0
        self.done = False
        self.end_status = END_ABORTED
        st = self.state
        self._prev = {
            "score": st.score,
            "gold": st.hero.gold,
            "nutrition": st.hero.nutrition,
            "uncovered": st.total_uncovered,
            "depth": st.hero.depth,
        }
        return render_observation(st).as_dict()

    def step(self, action) -> tuple:
        if self.done or self.state is None:
            raise RuntimeError("step() after episode end; call reset()")
        act = lookup(action)
        if act.ascii_value not in self.config.allowed_actions:
            raise ValueError(f"action {act.name} not in the allowed set")
        st = self.state
        outcome = play_turn(st, act)
        self.steps += 1

        reward = self._task_reward(outcome)
        if not outcome.time_advanced:
            reward += TIME_PENALTY

        if not st.hero.alive:
            self.done = True
            self.end_status = END_DEATH
        elif self._task_success(outcome):
            self.done = True
            self.end_status = END_SUCCESS
        elif self.steps >= self.config.max_steps:
            self.done = True
            self.end_status = END_ABORTED

        info = {
            "end_status": self.end_status if self.done else None,
            "time_advanced": outcome.time_advanced,
            "turn": st.turn,
            "steps": self.steps,
            "events": outcome.events,
            "death_cause": st.death_cause,
        }
        obs = render_observation(st).as_dict()
        self._snapshot()
        return obs, reward, self.done, info

    def _snapshot(self) -> None:
        st = self.state
        self._prev = {
            "score": st.score,
            "gold": st.hero.gold,
            "nutrition": st.hero.nutrition,
            "uncovered": st.total_uncovered,
            "depth": st.hero.depth,
        }

    def _task_reward(self, outcome) -> float:
        st = self.state
        task = self.config.task
        if task == "staircase":
            return STAIRCASE_REWARD if self._descended(outcome) else 0.0
        if task == "pet":
            return (STAIRCASE_REWARD
                    if self._descended(outcome) and self._pet_came_along()
                    else 0.0)
        if task == "eat":
            return float(max(st.hero.nutrition - self._prev["nutrition"], 0))
        if task == "gold":
            return float(st.hero.gold - self._prev["gold"])
        if task == "scout":
            return float(st.total_uncovered - self._prev["uncovered"])
        if task == "score":
            return float(st.score - self._prev["score"])
        if task == "oracle":
            return ORACLE_REWARD if self._adjacent_to_oracle() else 0.0
        raise UnknownTaskError(task)

    def _descended(self, outcome) -> bool:
        return any(e["type"] == "descended" for e in outcome.events)

    def _pet_came_along(self) -> bool:
        st = self.state
        return (st.pet is not None and st.pet_depth == st.hero.depth
                and max(abs(st.pet.y - st.hero.y),
                        abs(st.pet.x - st.hero.x)) <= 1)

    def _adjacent_to_oracle(self) -> bool:
        st = self.state
        pos = st.level.oracle_pos
        return (pos is not None
                and max(abs(pos[0] - st.hero.y),
                        abs(pos[1] - st.hero.x)) <= 1)

    def _task_success(self, outcome) -> bool:
        task = self.config.task
        if task in ("staircase", "pet"):
            return self._descended(outcome) and (
                task == "staircase" or self._pet_came_along())
        if task == "oracle":
            return self._adjacent_to_oracle()
        return False


@dataclass
class EpisodeResult:
    game_seed: int
    episode_seed: int
    task: str
    total_reward: float
    steps: int
    turns: int
    end_status: int
    death_cause: str | None
    score: int
    max_depth: int


@dataclass
class EvalReport:
    task: str
    pool_size: int
    master_seed: int
    episodes: list  # list[EpisodeResult]

    @property
    def mean_reward(self) -> float:
        return statistics.fmean(e.total_reward for e in self.episodes)

    @property
    def median_reward(self) -> float:
        return statistics.median(e.total_reward for e in self.episodes)

    @property
    def success_rate(self) -> float:
        n = sum(1 for e in self.episodes if e.end_status == END_SUCCESS)
        return n / len(self.episodes)

    def write_csv(self, path: str) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["game_seed", "episode_seed", "task", "total_reward",
                        "steps", "turns", "end_status", "death_cause",
                        "score", "max_depth"])
            for e in self.episodes:
                w.writerow([e.game_seed, e.episode_seed, e.task,
                            f"{e.total_reward:.6f}", e.steps, e.turns,
                            e.end_status, e.death_cause or "", e.score,
                            e.max_depth])

    def summary(self) -> dict:
        return {
            "task": self.task,
            "pool_size": self.pool_size,
            "master_seed": self.master_seed,
            "episodes": len(self.episodes),
            "mean_reward": self.mean_reward,
            "median_reward": self.median_reward,
            "success_rate": self.success_rate,
            "mean_steps": statistics.fmean(e.steps for e in self.episodes),
            "action_table": table_hash(),
        }


def run_episode(env: RoguelikeEnv, policy, game_seed: int,
                episode_seed: int) -> EpisodeResult:
    obs = env.reset(game_seed, episode_seed)
    if hasattr(policy, "reset"):
        policy.reset()
    total = 0.0
    max_depth = 1
    done = False
    while not done:
        action = policy(obs)
        obs, reward, done, info = env.step(action)
        total += reward
        max_depth = max(max_depth, int(obs["blstats"][12]))
    st = env.state
    return EpisodeResult(
        game_seed=game_seed, episode_seed=episode_seed,
        task=env.config.task, total_reward=total, steps=env.steps,
        turns=st.turn, end_status=env.end_status,
        death_cause=st.death_cause, score=st.score, max_depth=max_depth)


def run_eval(task: str, policy, master_seed: int, pool_size: int,
             config: TaskConfig | None = None) -> EvalReport:
    """Run one policy over a seed pool; one episode per pooled seed."""
    cfg = config or TaskConfig(task=task)
    if cfg.task != task:
        raise ValueError("config task does not match requested task")
    env = RoguelikeEnv(cfg)
    episodes = []
    for game_seed in seed_pool(master_seed, pool_size):
        episode_seed = derive_seed(master_seed, f"episode:{game_seed}")
        episodes.append(run_episode(env, policy, game_seed, episode_seed))
    return EvalReport(task=task, pool_size=pool_size,
                      master_seed=master_seed, episodes=episodes)
