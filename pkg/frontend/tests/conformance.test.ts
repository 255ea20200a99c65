/**
 * Interface conformance: adapter observation shapes and bounds, plus
 * the cross-boundary determinism check — an episode driven through the
 * subprocess adapter must match a natively recorded episode line for
 * line (frame hashes and rewards).
 */

import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { AdapterError, RoguelabEnv } from "../src/adapter.js";
import { frameHash } from "../src/frameHash.js";

let env: RoguelabEnv;

beforeAll(async () => {
  env = await RoguelabEnv.make("score");
}, 30000);

afterAll(async () => {
  await env.close();
});

describe("adapter interface conformance", () => {
  it("observation space matches the documented shapes exactly", async () => {
    const spec = Object.fromEntries(
      env.observationSpace().map((e) => [e.name, e]));
    const ok =
      JSON.stringify(spec.glyphs.shape) === "[21,79]" &&
      JSON.stringify(spec.chars.shape) === "[21,79]" &&
      JSON.stringify(spec.colors.shape) === "[21,79]" &&
      JSON.stringify(spec.specials.shape) === "[21,79]" &&
      JSON.stringify(spec.blstats.shape) === "[25]" &&
      JSON.stringify(spec.message.shape) === "[256]" &&
      JSON.stringify(spec.inv_glyphs.shape) === "[55]" &&
      JSON.stringify(spec.inv_strs.shape) === "[55,80]" &&
      JSON.stringify(spec.inv_letters.shape) === "[55]" &&
      JSON.stringify(spec.inv_oclasses.shape) === "[55]";
    console.log(`ACCEPTANCE ${ok ? "PASS" : "FAIL"} - adapter observation ` +
      "shapes: glyphs (21,79), blstats 25, message 256, inventory 55/(55,80)");
    expect(ok).toBe(true);
  });

  it("observations respect the declared bounds", async () => {
    const obs = await env.reset(31, 41);
    expect(obs.glyphs.length).toBe(21 * 79);
    for (let i = 0; i < obs.glyphs.length; i++) {
      expect(obs.glyphs[i]).toBeGreaterThanOrEqual(0);
      expect(obs.glyphs[i]).toBeLessThanOrEqual(env.maxGlyph);
    }
    for (let i = 0; i < obs.inv_glyphs.length; i++) {
      expect(obs.inv_glyphs[i]).toBeGreaterThanOrEqual(0);
      expect(obs.inv_glyphs[i]).toBeLessThanOrEqual(env.maxGlyph);
    }
    expect(obs.blstats.length).toBe(25);
  });

  it("action space equals the configured allowed set", () => {
    const space = env.actionSpace();
    expect(space.length).toBe(23);
    expect(new Set(space).size).toBe(space.length);
    for (const a of [107, 108, 106, 104, 60, 62, 101, 115]) {
      expect(space).toContain(a);
    }
  });

  it("stepping after done is an error", async () => {
    env.done = true;
    await expect(env.step(0)).rejects.toThrow(AdapterError);
    env.done = false;
  });

  it("out-of-range action index is an error", async () => {
    await env.reset(31, 41);
    await expect(env.step(999)).rejects.toThrow(AdapterError);
  });

  it("a bogus task is a make-time error", async () => {
    await expect(RoguelabEnv.make("fly")).rejects.toThrow(AdapterError);
  }, 30000);
});

describe("cross-boundary determinism", () => {
  it("adapter episode matches a native recording line for line", async () => {
    const dir = mkdtempSync(join(tmpdir(), "roguelab-"));
    const rec = join(dir, "native.rec");
    try {
      execFileSync("roguelab", [
        "play", "--task", "score", "--seed", "1234",
        "--episode-seed", "5678", "--max-steps", "120",
        "--record", rec, "--quiet",
      ]);
      const lines = readFileSync(rec, "utf-8").trim().split("\n");
      const header = JSON.parse(lines[0]);
      const steps = lines.slice(1, -1).map((l) => JSON.parse(l));

      expect(header.action_table).toBe(env.actionTable);
      await env.reset(header.game_seed, header.episode_seed,
                      header.max_steps);
      let mismatches = 0;
      for (const s of steps) {
        const result = await env.stepAscii(s.a);
        const h = frameHash(result.obs);
        const r = Number(result.reward.toFixed(9));
        if (h !== s.h || r !== s.r) mismatches++;
        if (result.done) break;
      }
      const ok = mismatches === 0 && steps.length > 0;
      console.log(`ACCEPTANCE ${ok ? "PASS" : "FAIL"} - cross-boundary ` +
        `episode matches native record (${steps.length} steps, ` +
        `${mismatches} mismatches)`);
      expect(ok).toBe(true);
    } finally {
      rmSync(dir, { recursive: true, force: true });
    }
  }, 60000);
});
