/**
 * Synchronous advantage actor-critic: n-step returns, entropy bonus,
 * value loss, global grad-norm clipping, RMSProp updates, and the
 * tanh(r/100) reward squash applied to every reward the learner sees.
 */

import { Rng } from "./init.js";
import { LstmState, PolicyNet } from "./model.js";
import {
  Tensor, add, backward, expT, mul, pick, scale, sub, sum, zeroGrads,
} from "./tensor.js";

export function clipReward(r: number): number {
  return Math.tanh(r / 100);
}

export interface TrainConfig {
  lr: number;
  rmsEpsilon: number;
  rmsDecay: number;
  entropyCost: number;
  valueCost: number;
  gradClip: number;
  gamma: number;
  unrollLength: number;
}

export function defaultTrainConfig(): TrainConfig {
  return {
    lr: 0.0002,
    rmsEpsilon: 1e-6,
    rmsDecay: 0.99,
    entropyCost: 0.0001,
    valueCost: 0.5,
    gradClip: 40,
    gamma: 0.999,
    unrollLength: 32,
  };
}

export class RmsProp {
  private params: Tensor[];
  private accum: Float64Array[];
  lr: number;
  epsilon: number;
  decay: number;
  gradClip: number;

  constructor(params: Tensor[], lr: number, epsilon = 1e-6, decay = 0.99,
              gradClip = 40) {
    this.params = params;
    this.accum = params.map((p) => new Float64Array(p.size));
    this.lr = lr;
    this.epsilon = epsilon;
    this.decay = decay;
    this.gradClip = gradClip;
  }

  zeroGrad(): void {
    zeroGrads(this.params);
  }

  /** Clip by global norm, then apply the RMSProp update. */
  step(gradScale = 1): number {
    let sq = 0;
    for (const p of this.params) {
      if (!p.grad) continue;
      for (let i = 0; i < p.grad.length; i++) {
        const g = p.grad[i] * gradScale;
        sq += g * g;
      }
    }
    const norm = Math.sqrt(sq);
    const clip = norm > this.gradClip ? this.gradClip / norm : 1;
    for (let j = 0; j < this.params.length; j++) {
      const p = this.params[j];
      if (!p.grad) continue;
      const acc = this.accum[j];
      for (let i = 0; i < p.size; i++) {
        const g = p.grad[i] * gradScale * clip;
        acc[i] = this.decay * acc[i] + (1 - this.decay) * g * g;
        p.data[i] -= this.lr * g / (Math.sqrt(acc[i]) + this.epsilon);
      }
    }
    return norm;
  }
}

/** One time step of an unroll, as seen by the learner. */
export interface StepRecord {
  logProbs: Tensor;
  value: Tensor;
  action: number;
  clippedReward: number;
  done: boolean;
}

export interface LossBreakdown {
  total: Tensor;
  policy: number;
  value: number;
  entropy: number;
}

export function nStepReturns(steps: StepRecord[], bootstrapValue: number,
                             gamma: number): Float64Array {
  const n = steps.length;
  const returns = new Float64Array(n);
  let acc = bootstrapValue;
  for (let t = n - 1; t >= 0; t--) {
    if (steps[t].done) acc = 0;
    acc = steps[t].clippedReward + gamma * acc;
    returns[t] = acc;
  }
  return returns;
}

/**
 * Full actor-critic loss over one unroll: policy gradient with n-step
 * advantages, value regression, entropy bonus. Advantages are plain
 * numbers (no gradient through the baseline); pass `fixedAdvantages`
 * to pin them to externally computed constants.
 */
export function a2cLoss(steps: StepRecord[], bootstrapValue: number,
                        cfg: TrainConfig,
                        fixedAdvantages?: ArrayLike<number>): LossBreakdown {
  const n = steps.length;
  const returns = nStepReturns(steps, bootstrapValue, cfg.gamma);

  let loss: Tensor | null = null;
  let policyLoss = 0;
  let valueLoss = 0;
  let entropyTotal = 0;
  for (let t = 0; t < n; t++) {
    const s = steps[t];
    const advantage = fixedAdvantages
      ? fixedAdvantages[t] : returns[t] - s.value.data[0];
    const logp = pick(s.logProbs, s.action);
    const pgrad = scale(logp, -advantage);
    const verr = sub(s.value, new Tensor(Float64Array.of(returns[t]), [1]));
    const vloss = scale(mul(verr, verr), cfg.valueCost);
    // entropy = -sum p log p; maximized, so its negation is added
    const entBonus = scale(sum(mul(expT(s.logProbs), s.logProbs)),
                           cfg.entropyCost);
    const term = add(add(pgrad, vloss), entBonus);
    loss = loss === null ? term : add(loss, term);
    policyLoss += pgrad.data[0];
    valueLoss += vloss.data[0];
    entropyTotal -= entBonus.data[0] / cfg.entropyCost;
  }
  return {
    total: scale(loss!, 1 / n),
    policy: policyLoss / n,
    value: valueLoss / n,
    entropy: entropyTotal / n,
  };
}

export interface EnvLike {
  reset(gameSeed?: number, episodeSeed?: number): Promise<{
    glyphs: ArrayLike<number>; blstats: ArrayLike<number>;
  } | Record<string, ArrayLike<number>>>;
  step(actionIndex: number): Promise<{
    obs: Record<string, ArrayLike<number>>;
    reward: number; done: boolean;
  }>;
}

export interface TrainerLogRow {
  frames: number;
  meanReturn100: number;
  entropy: number;
  policyLoss: number;
  valueLoss: number;
}

/**
 * Single-process trainer: act for one unroll, compute the loss, apply
 * one optimizer step. Seeds for each episode are drawn from the given
 * pool only.
 */
export class Trainer {
  net: PolicyNet;
  cfg: TrainConfig;
  opt: RmsProp;
  rng: Rng;
  seedPool: number[];
  private episodeReturns: number[] = [];
  private currentReturn = 0;
  frames = 0;

  constructor(net: PolicyNet, cfg: TrainConfig, seedPool: number[],
              rng: Rng) {
    this.net = net;
    this.cfg = cfg;
    this.opt = new RmsProp(net.params(), cfg.lr, cfg.rmsEpsilon,
                           cfg.rmsDecay, cfg.gradClip);
    this.rng = rng;
    this.seedPool = seedPool;
  }

  nextSeed(): number {
    return this.seedPool[this.rng.int(this.seedPool.length)];
  }

  recordEpisodeEnd(): void {
    this.episodeReturns.push(this.currentReturn);
    if (this.episodeReturns.length > 100) this.episodeReturns.shift();
    this.currentReturn = 0;
  }

  meanReturn100(): number {
    if (this.episodeReturns.length === 0) return 0;
    return this.episodeReturns.reduce((a, b) => a + b, 0) /
      this.episodeReturns.length;
  }

  /**
   * Run one unroll against `env` starting from (obs, state); returns
   * the updated (obs, state, doneFlag) plus a log row.
   */
  async unroll(env: EnvLike, obs: Record<string, ArrayLike<number>>,
               state: LstmState):
      Promise<{ obs: Record<string, ArrayLike<number>>; state: LstmState;
                log: TrainerLogRow }> {
    const steps: StepRecord[] = [];
    let cur = obs;
    let st = state;
    for (let t = 0; t < this.cfg.unrollLength; t++) {
      const heroX = Number(cur.blstats[0]);
      const heroY = Number(cur.blstats[1]);
      const out = this.net.step(cur.glyphs, cur.blstats, heroX, heroY, st);
      const action = this.net.sample(out.logProbs, this.rng);
      const result = await env.step(action);
      this.frames += 1;
      this.currentReturn += result.reward;
      steps.push({
        logProbs: out.logProbs,
        value: out.values[0],
        action,
        clippedReward: clipReward(result.reward),
        done: result.done,
      });
      st = out.state;
      if (result.done) {
        this.recordEpisodeEnd();
        cur = (await env.reset(this.nextSeed(), this.nextSeed())) as
          Record<string, ArrayLike<number>>;
        st = this.net.initialState();
      } else {
        cur = result.obs;
      }
    }
    let bootstrap = 0;
    if (!steps[steps.length - 1].done) {
      const out = this.net.step(cur.glyphs, cur.blstats,
                                Number(cur.blstats[0]),
                                Number(cur.blstats[1]), st);
      bootstrap = out.values[0].data[0];
    }
    const loss = a2cLoss(steps, bootstrap, this.cfg);
    if (!Number.isFinite(loss.total.item())) {
      throw new Error(`loss diverged at frame ${this.frames}`);
    }
    this.opt.zeroGrad();
    backward(loss.total);
    this.opt.step();
    // the unroll crossed the LSTM state; detach it for the next one
    const detached: LstmState = {
      h: new Tensor(st.h.data.slice(), st.h.shape.slice()),
      c: new Tensor(st.c.data.slice(), st.c.shape.slice()),
    };
    return {
      obs: cur,
      state: detached,
      log: {
        frames: this.frames,
        meanReturn100: this.meanReturn100(),
        entropy: loss.entropy,
        policyLoss: loss.policy,
        valueLoss: loss.value,
      },
    };
  }
}
