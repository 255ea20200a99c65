/**
 * Gradient check of the full actor-critic loss on a synthetic 2-step
 * batch: analytic reverse-mode gradients vs central finite differences
 * at 64-bit precision. Advantages and the bootstrap value are pinned
 * to constants so both evaluations differentiate the same function.
 */

import { describe, expect, it } from "vitest";

import { StepRecord, TrainConfig, a2cLoss, clipReward } from "../src/a2c.js";
import { Rng } from "../src/init.js";
import { EncoderConfig, PolicyNet } from "../src/model.js";
import { Tensor, backward, zeroGrads } from "../src/tensor.js";

const cfg: EncoderConfig = {
  numGlyphs: 12,
  embedDim: 3,
  hiddenDim: 6,
  convLayers: 2,
  convChannels: 3,
  cropSize: 3,
  mapH: 7,
  mapW: 9,
  statsLen: 25,
};

const trainCfg: TrainConfig = {
  lr: 0.0002, rmsEpsilon: 1e-6, rmsDecay: 0.99,
  entropyCost: 0.0001, valueCost: 0.5, gradClip: 40,
  gamma: 0.999, unrollLength: 2,
};

interface Batch {
  glyphs: Int16Array[];
  blstats: Int32Array[];
  actions: number[];
  rewards: number[];
}

function syntheticBatch(rng: Rng): Batch {
  const mk = () => {
    const g = new Int16Array(cfg.mapH * cfg.mapW);
    for (let i = 0; i < g.length; i++) g[i] = rng.int(cfg.numGlyphs);
    const b = new Int32Array(25);
    for (let i = 0; i < b.length; i++) b[i] = rng.int(50);
    b[0] = 4;
    b[1] = 3;
    return { g, b };
  };
  const o1 = mk();
  const o2 = mk();
  return {
    glyphs: [o1.g, o2.g],
    blstats: [o1.b, o2.b],
    actions: [1, 3],
    rewards: [clipReward(55), clipReward(-0.001)],
  };
}

describe("gradient check", () => {
  it("full loss matches central differences within 1e-3 relative", () => {
    const net = new PolicyNet(cfg, 5, new Rng(77));
    const batch = syntheticBatch(new Rng(88));
    const bootstrap = 0.3;

    const forward = (fixedAdv?: Float64Array) => {
      let state = net.initialState();
      const steps: StepRecord[] = [];
      for (let t = 0; t < 2; t++) {
        const out = net.step(batch.glyphs[t], batch.blstats[t],
                             batch.blstats[t][0], batch.blstats[t][1], state);
        steps.push({
          logProbs: out.logProbs,
          value: out.values[0],
          action: batch.actions[t],
          clippedReward: batch.rewards[t],
          done: false,
        });
        state = out.state;
      }
      return a2cLoss(steps, bootstrap, trainCfg, fixedAdv);
    };

    // pin advantages from the initial parameters
    const ret2 = batch.rewards[1] + trainCfg.gamma * bootstrap;
    const ret1 = batch.rewards[0] + trainCfg.gamma * ret2;
    const base = forward();
    const adv = Float64Array.of(ret1, ret2);
    {
      let state = net.initialState();
      for (let t = 0; t < 2; t++) {
        const out = net.step(batch.glyphs[t], batch.blstats[t],
                             batch.blstats[t][0], batch.blstats[t][1], state);
        adv[t] -= out.values[0].data[0];
        state = out.state;
      }
    }
    void base;

    const params = net.params();
    zeroGrads(params);
    const loss = forward(adv);
    backward(loss.total);

    const lossAt = () => forward(adv).total.item();
    const eps = 1e-5;
    const rng = new Rng(99);
    let worst = 0;
    let checked = 0;
    for (const p of params) {
      const grad = p.grad ?? new Float64Array(p.size);
      const nSamples = Math.min(4, p.size);
      for (let s = 0; s < nSamples; s++) {
        const i = rng.int(p.size);
        const orig = p.data[i];
        p.data[i] = orig + eps;
        const plus = lossAt();
        p.data[i] = orig - eps;
        const minus = lossAt();
        p.data[i] = orig;
        const fd = (plus - minus) / (2 * eps);
        const a = grad[i];
        const rel = Math.abs(a - fd) / (Math.abs(a) + Math.abs(fd) + 1e-8);
        if (rel > worst) worst = rel;
        checked++;
      }
    }
    const ok = worst < 1e-3;
    console.log(`ACCEPTANCE ${ok ? "PASS" : "FAIL"} - gradcheck: analytic ` +
      `vs central differences on 2-step batch (${checked} coords, worst ` +
      `rel err ${worst.toExponential(2)})`);
    expect(ok).toBe(true);
  }, 120000);

  it("tensor op gradients agree on a composite expression", async () => {
    const { tensor, matmul, tanhT, sum, mul } = await import("../src/tensor.js");
    const a = tensor([0.3, -0.2, 0.5, 0.1, -0.4, 0.2], [2, 3], true);
    const b = tensor([0.7, -0.1, 0.2, 0.4, -0.3, 0.6], [3, 2], true);
    const f = () => sum(mul(tanhT(matmul(a, b)), tanhT(matmul(a, b))));
    const loss = f();
    backward(loss);
    const eps = 1e-6;
    for (const p of [a, b]) {
      for (let i = 0; i < p.size; i++) {
        const orig = p.data[i];
        p.data[i] = orig + eps;
        const plus = f().item();
        p.data[i] = orig - eps;
        const minus = f().item();
        p.data[i] = orig;
        const fd = (plus - minus) / (2 * eps);
        expect(Math.abs(fd - p.grad![i])).toBeLessThan(1e-6);
      }
    }
  });
});
