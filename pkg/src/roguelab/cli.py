"""Command line interface.

Exit codes: 0 success, 1 operation failed (death is not a failure;
a replay mismatch or invalid level is), 2 usage error.
"""

from __future__ import annotations

import json
import sys

import click

from . import __version__
from .bench import run_bench, run_bench_multi
from .dungeon import GenParams, generate_level, validate_level
from .env import TASKS, RoguelikeEnv, TaskConfig, run_episode, run_eval
from .policies import POLICIES, make_policy
from .recording import extract_stats, record_episode, render_replay, \
    replay_verify

_TASK = click.Choice(TASKS)
_POLICY = click.Choice(sorted(POLICIES))


@click.group()
@click.version_option(__version__, prog_name="roguelab")
def main() -> None:
    """Deterministic roguelike environment toolkit."""


@main.command()
@click.option("--task", type=_TASK, default="score", show_default=True)
@click.option("--policy", type=_POLICY, default="random", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True,
              help="Game seed (world content).")
@click.option("--episode-seed", type=int, default=None,
              help="Episode seed (dynamics); derived from --seed if unset.")
@click.option("--character", default="mon-hum-neu-mal", show_default=True)
@click.option("--max-steps", type=int, default=None)
@click.option("--record", "record_path", type=click.Path(writable=True),
              default=None, help="Write an episode recording here.")
@click.option("--quiet", is_flag=True, help="Summary line only.")
def play(task, policy, seed, episode_seed, character, max_steps,
         record_path, quiet):
    """Play one policy-driven episode and print the result."""
    cfg = TaskConfig(task=task, character=character, max_steps=max_steps)
    env = RoguelikeEnv(cfg)
    pol = make_policy(policy, seed)
    if episode_seed is None:
        episode_seed = seed + 1
    if record_path:
        footer = record_episode(env, pol, seed, episode_seed, record_path)
        result = {"task": task, "game_seed": seed,
                  "episode_seed": episode_seed, **footer,
                  "recording": record_path}
    else:
        r = run_episode(env, pol, seed, episode_seed)
        result = {"task": r.task, "game_seed": r.game_seed,
                  "episode_seed": r.episode_seed,
                  "total_reward": round(r.total_reward, 6),
                  "steps": r.steps, "turns": r.turns,
                  "end_status": r.end_status, "death_cause": r.death_cause,
                  "score": r.score, "max_depth": r.max_depth}
    if quiet:
        click.echo(f"reward={result['total_reward']} steps={result['steps']}")
    else:
        click.echo(json.dumps(result, indent=2))


@main.command()
@click.option("--task", type=_TASK, default="score", show_default=True)
@click.option("--policy", type=_POLICY, default="random", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--duration", type=float, default=10.0, show_default=True,
              help="Benchmark duration in seconds.")
@click.option("--steps", "max_steps", type=int, default=None,
              help="Stop after this many steps instead of a duration.")
@click.option("--instances", type=int, default=1, show_default=True,
              help="Parallel environment processes.")
def bench(task, policy, seed, duration, max_steps, instances):
    """Measure environment throughput in steps per second."""
    if instances < 1:
        raise click.UsageError("--instances must be at least 1")
    if instances == 1:
        result = run_bench(task=task, policy=policy, seed=seed,
                           duration=duration, max_steps=max_steps)
    else:
        result = run_bench_multi(instances=instances, task=task,
                                 policy=policy, seed=seed, duration=duration)
    click.echo(json.dumps(result.as_dict(), indent=2))


@main.command(name="eval")
@click.option("--task", type=_TASK, default="score", show_default=True)
@click.option("--policy", type=_POLICY, default="random", show_default=True)
@click.option("--master-seed", type=int, default=0, show_default=True)
@click.option("--pool-size", type=click.IntRange(1, 1000), default=10,
              show_default=True)
@click.option("--csv", "csv_path", type=click.Path(writable=True),
              default=None, help="Write per-episode results here.")
def eval_cmd(task, policy, master_seed, pool_size, csv_path):
    """Evaluate a policy over a deterministic seed pool."""
    pol = make_policy(policy, master_seed)
    report = run_eval(task, pol, master_seed, pool_size)
    if csv_path:
        report.write_csv(csv_path)
    click.echo(json.dumps(report.summary(), indent=2))


@main.command()
@click.argument("recording", type=click.Path(exists=True, dir_okay=False))
@click.option("--render", is_flag=True, help="Print every frame.")
@click.option("--stop-on-first", is_flag=True,
              help="Stop at the first mismatch.")
def replay(recording, render, stop_on_first):
    """Re-run a recording and verify it step by step."""
    if render:
        for i, frame, reward in render_replay(recording):
            click.echo(f"--- step {i} reward {reward:+.3f}")
            click.echo(frame)
        return
    report = replay_verify(recording, stop_on_first=stop_on_first)
    if report.ok:
        click.echo(f"OK: {report.steps_checked} steps verified")
        return
    click.echo(f"MISMATCH: {len(report.mismatches)} difference(s) "
               f"in {report.steps_checked} steps", err=True)
    for m in report.mismatches[:10]:
        click.echo(f"  step {m['step']} field {m['field']}: "
                   f"recorded {m['recorded']!r} != replayed {m['replayed']!r}",
                   err=True)
    sys.exit(1)


@main.command()
@click.argument("recording", type=click.Path(exists=True, dir_okay=False))
def stats(recording):
    """Print summary statistics for a recording."""
    click.echo(json.dumps(extract_stats(recording), indent=2))


@main.command()
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--depth", type=int, default=1, show_default=True)
@click.option("--validate", "do_validate", is_flag=True,
              help="Run structural validation instead of printing the map.")
def gen(seed, depth, do_validate):
    """Generate a level blueprint; print its map or validate it."""
    params = GenParams()
    try:
        bp = generate_level(seed, depth, params)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None
    if do_validate:
        report = validate_level(bp, params)
        if report.ok:
            click.echo(f"OK: seed={seed} depth={depth} "
                       f"rooms={len(bp.rooms)}")
            return
        for v in report.violations:
            click.echo(f"VIOLATION: {v}", err=True)
        sys.exit(1)
    click.echo(bp.ascii_map())


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Start the HTTP service."""
    import uvicorn

    uvicorn.run("roguelab.service:app", host=host, port=port)


if __name__ == "__main__":
    main()
