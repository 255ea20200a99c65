/**
 * RND familiarity: training the predictor on one fixed observation
 * must drive its loss down, non-increasing (within tolerance) after a
 * short warm-up, over 1000 optimizer steps.
 */

import { describe, expect, it } from "vitest";

import { RmsProp } from "../src/a2c.js";
import { Rng } from "../src/init.js";
import { EncoderConfig } from "../src/model.js";
import { Rnd, defaultRndConfig } from "../src/rnd.js";

const cfg: EncoderConfig = {
  numGlyphs: 12,
  embedDim: 3,
  hiddenDim: 8,
  convLayers: 2,
  convChannels: 3,
  cropSize: 3,
  mapH: 7,
  mapW: 9,
  statsLen: 25,
};

function fixedObs(rng: Rng) {
  const glyphs = new Int16Array(cfg.mapH * cfg.mapW);
  for (let i = 0; i < glyphs.length; i++) glyphs[i] = rng.int(cfg.numGlyphs);
  const blstats = new Int32Array(25);
  for (let i = 0; i < blstats.length; i++) blstats[i] = rng.int(40);
  blstats[0] = 4;
  blstats[1] = 3;
  return { glyphs, blstats };
}

describe("random network distillation", () => {
  it("predictor loss is non-increasing after warm-up over 1000 steps", () => {
    const rnd = new Rnd(cfg, defaultRndConfig(), new Rng(5));
    const { glyphs, blstats } = fixedObs(new Rng(6));
    const opt = new RmsProp(rnd.params(), 0.0002, 1e-6, 0.99, 40);
    const losses: number[] = [];
    for (let step = 0; step < 1000; step++) {
      losses.push(rnd.trainStep(opt, glyphs, blstats, 4, 3));
    }
    let violations = 0;
    let worstJump = 0;
    for (let i = 11; i < losses.length; i++) {
      const jump = losses[i] - losses[i - 1];
      if (jump > 1e-6) {
        violations++;
        if (jump > worstJump) worstJump = jump;
      }
    }
    const improved = losses[999] < losses[10];
    const ok = violations === 0 && improved;
    console.log(`ACCEPTANCE ${ok ? "PASS" : "FAIL"} - RND familiarity: ` +
      `loss non-increasing after warm-up over 1000 steps ` +
      `(${violations} violations, worst jump ${worstJump.toExponential(2)}, ` +
      `loss ${losses[10].toExponential(2)} -> ${losses[999].toExponential(2)})`);
    expect(ok).toBe(true);
  }, 120000);

  it("raw error is deterministic for a frozen predictor", () => {
    const rnd = new Rnd(cfg, defaultRndConfig(), new Rng(5));
    const { glyphs, blstats } = fixedObs(new Rng(6));
    const a = rnd.forwardError(glyphs, blstats, 4, 3).item();
    const b = rnd.forwardError(glyphs, blstats, 4, 3).item();
    expect(a).toBe(b);
    expect(a).toBeGreaterThan(0);
  });

  it("intrinsic reward is finite and positive after std warm-up", () => {
    const rnd = new Rnd(cfg, defaultRndConfig(), new Rng(5));
    const rng = new Rng(7);
    let last = 0;
    for (let i = 0; i < 20; i++) {
      const { glyphs, blstats } = fixedObs(rng);
      last = rnd.intrinsicReward(glyphs, blstats, 4, 3);
    }
    expect(Number.isFinite(last)).toBe(true);
    expect(last).toBeGreaterThan(0);
  });

  it("target and predictor share the architecture but not parameters", () => {
    const rnd = new Rnd(cfg, defaultRndConfig(), new Rng(5));
    const t = rnd.target.params();
    const p = rnd.predictor.params();
    expect(t.length).toBe(p.length);
    for (let i = 0; i < t.length; i++) {
      expect(t[i].size).toBe(p[i].size);
      expect(t[i].requiresGrad).toBe(false);
      expect(p[i].requiresGrad).toBe(true);
    }
  });
});
