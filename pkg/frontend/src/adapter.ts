/**
 * Gym-style adapter over the environment's subprocess line protocol.
 *
 * A handle owns one `python3 -m roguelab.ipc` child process and talks
 * JSON lines over its stdio. Observations arrive as a base64 flat
 * buffer and are unpacked with the layout text from the hello
 * response, so shapes and offsets are never duplicated here.
 */

import { spawn, ChildProcessByStdio } from "node:child_process";
import { Readable, Writable } from "node:stream";
import { createInterface, Interface } from "node:readline";

import { Layout, Observation, parseLayout } from "./layout.js";

export interface ActionEntry {
  ascii: number;
  name: string;
}

export interface SpaceEntry {
  name: string;
  shape: number[];
  dtype: string;
  low: number;
  high: number;
}

export interface StepResult {
  obs: Observation;
  reward: number;
  done: boolean;
  info: {
    end_status: number;
    time_advanced: boolean;
    turn: number;
    steps: number;
  };
}

export class AdapterError extends Error {}

interface Pending {
  resolve: (v: any) => void;
  reject: (e: Error) => void;
}

const DTYPE_BOUNDS: Record<string, [number, number]> = {
  uint8: [0, 255],
  int16: [-32768, 32767],
  int32: [-2147483648, 2147483647],
};

export class RoguelabEnv {
  private proc: ChildProcessByStdio<Writable, Readable, null>;
  private lines: Interface;
  private queue: Pending[] = [];
  private closed = false;

  layout!: Layout;
  actions!: ActionEntry[];
  actionTable!: string;
  maxGlyph!: number;
  task: string;
  done = true;

  private constructor(task: string, pythonBin: string) {
    this.task = task;
    this.proc = spawn(pythonBin, ["-m", "roguelab.ipc"], {
      stdio: ["pipe", "pipe", "inherit"],
    });
    this.lines = createInterface({ input: this.proc.stdout });
    this.lines.on("line", (line) => {
      const pending = this.queue.shift();
      if (!pending) return;
      try {
        pending.resolve(JSON.parse(line));
      } catch (e) {
        pending.reject(new AdapterError(`bad response line: ${line}`));
      }
    });
    this.proc.on("exit", () => {
      while (this.queue.length) {
        this.queue.shift()!.reject(new AdapterError("environment process exited"));
      }
    });
  }

  private request(payload: object): Promise<any> {
    if (this.closed) {
      return Promise.reject(new AdapterError("handle is closed"));
    }
    return new Promise((resolve, reject) => {
      this.queue.push({ resolve, reject });
      this.proc.stdin.write(JSON.stringify(payload) + "\n");
    });
  }

  /** Spawn the environment process and complete the hello handshake. */
  static async make(task: string, opts: { pythonBin?: string } = {}):
      Promise<RoguelabEnv> {
    const env = new RoguelabEnv(task, opts.pythonBin ?? "python3");
    const hello = await env.request({ op: "hello" });
    if (!hello.ok) {
      env.dispose();
      throw new AdapterError(`hello failed: ${hello.error}`);
    }
    env.layout = parseLayout(hello.layout);
    env.actions = hello.actions;
    env.actionTable = hello.action_table;
    env.maxGlyph = hello.max_glyph;
    // fail fast on a bad task instead of at the first reset
    const probe = await env.request({ op: "reset", task });
    if (!probe.ok) {
      env.dispose();
      throw new AdapterError(`cannot make task ${task}: ${probe.error}`);
    }
    return env;
  }

  /** Observation space derived from the layout contract. */
  observationSpace(): SpaceEntry[] {
    return this.layout.fields.map((f) => {
      let [low, high] = DTYPE_BOUNDS[f.dtype];
      if (f.name === "glyphs" || f.name === "inv_glyphs") {
        low = 0;
        high = this.maxGlyph;
      }
      return { name: f.name, shape: f.shape, dtype: f.dtype, low, high };
    });
  }

  /** Discrete action space: the configured allowed ASCII values. */
  actionSpace(): number[] {
    return this.actions.map((a) => a.ascii);
  }

  async reset(gameSeed?: number, episodeSeed?: number,
              maxSteps?: number): Promise<Observation> {
    const resp = await this.request({
      op: "reset", task: this.task,
      game_seed: gameSeed, episode_seed: episodeSeed, max_steps: maxSteps,
    });
    if (!resp.ok) throw new AdapterError(`reset failed: ${resp.error}`);
    this.done = false;
    return this.unpack(resp.obs);
  }

  /** Step by action-space index (gym convention). */
  async step(actionIndex: number): Promise<StepResult> {
    if (this.done) throw new AdapterError("episode is over; call reset");
    if (!Number.isInteger(actionIndex) || actionIndex < 0 ||
        actionIndex >= this.actions.length) {
      throw new AdapterError(`action index ${actionIndex} out of range`);
    }
    return this.stepAscii(this.actions[actionIndex].ascii);
  }

  /** Step by raw ASCII action value (replay convenience). */
  async stepAscii(ascii: number): Promise<StepResult> {
    if (this.done) throw new AdapterError("episode is over; call reset");
    const resp = await this.request({ op: "step", action: ascii });
    if (!resp.ok) throw new AdapterError(`step failed: ${resp.error}`);
    this.done = resp.done;
    return {
      obs: this.unpack(resp.obs),
      reward: resp.reward,
      done: resp.done,
      info: resp.info,
    };
  }

  rawBuffer(b64: string): Buffer {
    return Buffer.from(b64, "base64");
  }

  private unpack(b64: string): Observation {
    return this.layout.unpack(Buffer.from(b64, "base64"));
  }

  async close(): Promise<void> {
    if (this.closed) return;
    try {
      await this.request({ op: "close" });
    } catch {
      // process may already be gone
    }
    this.dispose();
  }

  private dispose(): void {
    this.closed = true;
    this.lines.close();
    this.proc.stdin.end();
    this.proc.kill();
  }
}
