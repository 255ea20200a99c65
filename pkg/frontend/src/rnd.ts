/**
 * Random network distillation: a frozen, randomly initialized target
 * network and a trained predictor sharing the same feature-extractor
 * architecture. The intrinsic reward is the predictor's squared error
 * against the target, divided by ten, normalized by a running std
 * estimate, and clipped like every other reward. Non-episodic: the
 * running statistics survive environment resets.
 */

import { Rng } from "./init.js";
import { Encoder, EncoderConfig } from "./model.js";
import { Tensor, backward, mean, mul, sub } from "./tensor.js";
import { RmsProp, clipReward } from "./a2c.js";

export interface RndConfig {
  gammaExtrinsic: number;
  gammaIntrinsic: number;
  intrinsicScale: number;
  forwardLossScale: number;
  stdWarmup: number;
}

export function defaultRndConfig(): RndConfig {
  return {
    gammaExtrinsic: 0.999,
    gammaIntrinsic: 0.99,
    intrinsicScale: 0.1,
    forwardLossScale: 0.01,
    stdWarmup: 8,
  };
}

/** Streaming variance (Welford) for intrinsic-reward normalization. */
class RunningStd {
  count = 0;
  private meanAcc = 0;
  private m2 = 0;

  update(x: number): void {
    this.count += 1;
    const d = x - this.meanAcc;
    this.meanAcc += d / this.count;
    this.m2 += d * (x - this.meanAcc);
  }

  std(): number {
    if (this.count < 2) return 1;
    return Math.sqrt(this.m2 / this.count) || 1;
  }
}

export class Rnd {
  cfg: RndConfig;
  target: Encoder;
  predictor: Encoder;
  private runningStd = new RunningStd();

  constructor(encCfg: EncoderConfig, cfg: RndConfig, rng: Rng) {
    this.cfg = cfg;
    // both nets share the architecture; orthogonal init with gain sqrt(2)
    this.target = new Encoder(encCfg, rng, true);
    this.predictor = new Encoder(encCfg, rng, true);
    for (const p of this.target.params()) p.requiresGrad = false;
  }

  /** Mean squared predictor error (the forward loss, before scaling). */
  forwardError(glyphs: ArrayLike<number>, blstats: ArrayLike<number>,
               heroX: number, heroY: number): Tensor {
    const t = this.target.encode(glyphs, blstats, heroX, heroY);
    const p = this.predictor.encode(glyphs, blstats, heroX, heroY);
    const d = sub(p, t);
    return mean(mul(d, d));
  }

  /** Scaled, normalized, clipped intrinsic reward for one observation. */
  intrinsicReward(glyphs: ArrayLike<number>, blstats: ArrayLike<number>,
                  heroX: number, heroY: number): number {
    const raw = this.forwardError(glyphs, blstats, heroX, heroY).item();
    const scaled = raw * this.cfg.intrinsicScale;
    this.runningStd.update(scaled);
    if (this.runningStd.count < this.cfg.stdWarmup) return 0;
    return clipReward(scaled / this.runningStd.std());
  }

  /** One predictor update on a single observation; returns the loss. */
  trainStep(opt: RmsProp, glyphs: ArrayLike<number>,
            blstats: ArrayLike<number>, heroX: number,
            heroY: number): number {
    const err = this.forwardError(glyphs, blstats, heroX, heroY);
    const loss = err.item() * this.cfg.forwardLossScale;
    opt.zeroGrad();
    backward(err);
    // the 0.01 forward-loss scale folds into the step size
    opt.step(this.cfg.forwardLossScale);
    return loss;
  }

  params(): Tensor[] {
    return this.predictor.params();
  }
}
