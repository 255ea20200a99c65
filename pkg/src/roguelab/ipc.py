"""Line-based stdio protocol for out-of-process consumers.

Run as ``python3 -m roguelab.ipc``. Each request is one JSON object per
line on stdin; each response is one JSON object per line on stdout.
Observations travel as a base64-encoded flat buffer whose layout the
client learns from the ``hello`` response, so the client never
hard-codes offsets.

Ops:
  hello                     -> layout text, action table, glyph count
  reset {task?, character?, game_seed?, episode_seed?, max_steps?}
  step {action}             -> obs, reward, done, info
  close                     -> acknowledges and exits
"""

from __future__ import annotations

import base64
import json
import sys

from .actions import ACTIONS, table_hash
from .env import RoguelikeEnv, TaskConfig
from .glyphs import data_path, max_glyph
from .layout import LAYOUT_FILE, default_layout

PROTOCOL_VERSION = 1


class IpcServer:
    def __init__(self, stdin=None, stdout=None):
        self.stdin = stdin or sys.stdin
        self.stdout = stdout or sys.stdout
        self.layout = default_layout()
        self.env: RoguelikeEnv | None = None

    def _send(self, payload: dict) -> None:
        self.stdout.write(json.dumps(payload) + "\n")
        self.stdout.flush()

    def _pack_obs(self, obs: dict) -> str:
        return base64.b64encode(self.layout.pack(obs)).decode("ascii")

    def handle(self, req: dict) -> tuple[dict, bool]:
        op = req.get("op")
        if op == "hello":
            with open(data_path(LAYOUT_FILE), "r", encoding="utf-8") as fh:
                layout_text = fh.read()
            return {
                "ok": True, "protocol": PROTOCOL_VERSION,
                "layout": layout_text,
                "actions": [{"ascii": a.ascii_value, "name": a.name}
                            for a in ACTIONS],
                "action_table": table_hash(),
                "max_glyph": max_glyph(),
            }, False
        if op == "reset":
            cfg = TaskConfig(
                task=req.get("task", "score"),
                character=req.get("character", "mon-hum-neu-mal"),
                max_steps=req.get("max_steps"),
            )
            self.env = RoguelikeEnv(cfg)
            obs = self.env.reset(req.get("game_seed"),
                                 req.get("episode_seed"))
            return {"ok": True, "obs": self._pack_obs(obs),
                    "done": False}, False
        if op == "step":
            if self.env is None:
                return {"ok": False, "error": "step before reset"}, False
            obs, reward, done, info = self.env.step(req["action"])
            return {
                "ok": True, "obs": self._pack_obs(obs), "reward": reward,
                "done": done,
                "info": {"end_status": info["end_status"],
                         "time_advanced": info["time_advanced"],
                         "turn": info["turn"], "steps": info["steps"]},
            }, False
        if op == "close":
            return {"ok": True}, True
        return {"ok": False, "error": f"unknown op {op!r}"}, False

    def serve(self) -> None:
        for line in self.stdin:
            line = line.strip()
            if not line:
                continue
            try:
                req = json.loads(line)
            except json.JSONDecodeError as exc:
                self._send({"ok": False, "error": f"bad json: {exc}"})
                continue
            try:
                resp, stop = self.handle(req)
            except Exception as exc:  # report, keep serving
                self._send({"ok": False,
                            "error": f"{type(exc).__name__}: {exc}"})
                continue
            self._send(resp)
            if stop:
                return


def main() -> None:
    IpcServer().serve()


if __name__ == "__main__":
    main()
