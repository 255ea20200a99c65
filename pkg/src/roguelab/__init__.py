"""roguelab: a deterministic roguelike RL environment.

Symbolic observations over a 21x79 grid, ASCII-keyed actions, seven
reward tasks, seeded evaluation pools, episode recording with bit-exact
replay verification, and throughput benchmarking.
"""

from .actions import ACTIONS, DEFAULT_ACTION_SET, ActionId, lookup
from .env import TASKS, EvalReport, RoguelikeEnv, TaskConfig, run_eval, \
    seed_pool
from .observe import Observation

__version__ = "1.0.0"

__all__ = [
    "ACTIONS", "DEFAULT_ACTION_SET", "ActionId", "lookup",
    "TASKS", "EvalReport", "RoguelikeEnv", "TaskConfig", "run_eval",
    "seed_pool", "Observation", "__version__",
]
