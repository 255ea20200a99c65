"""Throughput benchmarking: steps per second, single and multi instance.

Multi-instance mode runs one environment per process and reports the
aggregate rate; scaling beyond 1x depends on the cores actually
available to the benchmark process.
"""

from __future__ import annotations

import multiprocessing as mp
import os
import time
from dataclasses import dataclass

from .env import RoguelikeEnv, TaskConfig
from .policies import make_policy


@dataclass
class BenchResult:
    steps: int
    seconds: float
    instances: int

    @property
    def sps(self) -> float:
        return self.steps / self.seconds if self.seconds > 0 else 0.0

    def as_dict(self) -> dict:
        return {"steps": self.steps, "seconds": round(self.seconds, 4),
                "instances": self.instances, "sps": round(self.sps, 1)}


def _bench_loop(task: str, policy_name: str, seed: int,
                duration: float, max_steps: int | None) -> tuple[int, float]:
    env = RoguelikeEnv(TaskConfig(task=task))
    policy = make_policy(policy_name, seed)
    obs = env.reset(seed, seed + 1)
    steps = 0
    start = time.perf_counter()
    deadline = start + duration
    while True:
        obs, _reward, done, _info = env.step(policy(obs))
        steps += 1
        if done:
            obs = env.reset()
        if max_steps is not None and steps >= max_steps:
            break
        if steps % 256 == 0 and time.perf_counter() >= deadline:
            break
    return steps, time.perf_counter() - start


def run_bench(task: str = "score", policy: str = "random", seed: int = 0,
              duration: float = 10.0,
              max_steps: int | None = None) -> BenchResult:
    steps, seconds = _bench_loop(task, policy, seed, duration, max_steps)
    return BenchResult(steps=steps, seconds=seconds, instances=1)


def _worker(args):
    task, policy, seed, duration = args
    return _bench_loop(task, policy, seed, duration, None)


def run_bench_multi(instances: int = 8, task: str = "score",
                    policy: str = "random", seed: int = 0,
                    duration: float = 10.0) -> BenchResult:
    ctx = mp.get_context("spawn" if os.name == "nt" else "fork")
    jobs = [(task, policy, seed + i, duration) for i in range(instances)]
    with ctx.Pool(instances) as pool:
        results = pool.map(_worker, jobs)
    total_steps = sum(s for s, _ in results)
    wall = max(sec for _, sec in results)
    return BenchResult(steps=total_steps, seconds=wall, instances=instances)
