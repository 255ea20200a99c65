/**
 * Baseline policy network: a three-path observation encoder (full-map
 * conv stack, egocentric-crop conv stack, stats MLP), an LSTM core,
 * and linear policy/value heads. All sizes come from EncoderConfig so
 * tests can run a tiny copy of the same architecture.
 */

import { Rng, heInit, orthogonalInit } from "./init.js";
import {
  Tensor, add, concat1d, conv3x3, embedLookup, logSoftmax, matmul, mul,
  relu, sigmoid, slice1d, tanhT, zeros,
} from "./tensor.js";

export const MAP_H = 21;
export const MAP_W = 79;
export const BLSTATS_LEN = 25;

export interface EncoderConfig {
  numGlyphs: number;  // embedding rows; the padding sentinel is numGlyphs-1
  embedDim: number;
  hiddenDim: number;
  convLayers: number;
  convChannels: number;
  cropSize: number;
  mapH: number;
  mapW: number;
  statsLen: number;
}

export function defaultEncoderConfig(numGlyphs: number): EncoderConfig {
  return {
    numGlyphs,
    embedDim: 32,
    hiddenDim: 128,
    convLayers: 5,
    convChannels: 16,
    cropSize: 9,
    mapH: MAP_H,
    mapW: MAP_W,
    statsLen: BLSTATS_LEN,
  };
}

function reshape(t: Tensor, shape: number[]): Tensor {
  const n = shape.reduce((a, b) => a * b, 1);
  if (n !== t.size) throw new Error("reshape size mismatch");
  const out = new Tensor(t.data, shape);
  out.requiresGrad = t.requiresGrad;
  if (t.requiresGrad) {
    out.parents = [t];
    out.backwardFn = () => {
      const ga = t.ensureGrad();
      const g = out.grad!;
      for (let i = 0; i < g.length; i++) ga[i] += g[i];
    };
  }
  return out;
}

/** [n, k] row-major -> [k, n] (cell-major embeddings to channel-major). */
function transpose2d(t: Tensor): Tensor {
  const [n, k] = t.shape;
  const out = new Tensor(new Float64Array(t.size), [k, n]);
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < k; j++) out.data[j * n + i] = t.data[i * k + j];
  }
  out.requiresGrad = t.requiresGrad;
  if (t.requiresGrad) {
    out.parents = [t];
    out.backwardFn = () => {
      const ga = t.ensureGrad();
      const g = out.grad!;
      for (let i = 0; i < n; i++) {
        for (let j = 0; j < k; j++) ga[i * k + j] += g[j * n + i];
      }
    };
  }
  return out;
}

class ConvStack {
  weights: Tensor[] = [];
  biases: Tensor[] = [];

  constructor(cfg: EncoderConfig, rng: Rng) {
    let cin = cfg.embedDim;
    for (let i = 0; i < cfg.convLayers; i++) {
      const fanIn = cin * 9;
      this.weights.push(heInit([cfg.convChannels, fanIn], fanIn, rng));
      this.biases.push(zeros([cfg.convChannels], true));
      cin = cfg.convChannels;
    }
  }

  forward(x: Tensor, cfg: EncoderConfig, h: number, w: number): Tensor {
    let cin = cfg.embedDim;
    for (let i = 0; i < this.weights.length; i++) {
      x = relu(conv3x3(x, this.weights[i], this.biases[i], cin, h, w));
      cin = cfg.convChannels;
    }
    return x;
  }

  params(): Tensor[] {
    return [...this.weights, ...this.biases];
  }
}

class Linear {
  w: Tensor;
  b: Tensor;

  constructor(inDim: number, outDim: number, rng: Rng,
              orthogonalGain: number | null = null) {
    this.w = orthogonalGain === null
      ? heInit([inDim, outDim], inDim, rng)
      : orthogonalInit([inDim, outDim], orthogonalGain, rng);
    this.b = zeros([outDim], true);
  }

  forward(x: Tensor): Tensor {
    return add(matmul(x, this.w), this.b);
  }

  params(): Tensor[] {
    return [this.w, this.b];
  }
}

export class Encoder {
  cfg: EncoderConfig;
  embedding: Tensor;
  mapStack: ConvStack;
  cropStack: ConvStack;
  statsFc1: Linear;
  statsFc2: Linear;
  outFc: Linear;

  constructor(cfg: EncoderConfig, rng: Rng, orthogonal = false) {
    this.cfg = cfg;
    this.embedding = heInit([cfg.numGlyphs, cfg.embedDim], cfg.embedDim, rng);
    this.mapStack = new ConvStack(cfg, rng);
    this.cropStack = new ConvStack(cfg, rng);
    const gain = orthogonal ? Math.SQRT2 : null;
    this.statsFc1 = new Linear(cfg.statsLen, cfg.hiddenDim, rng, gain);
    this.statsFc2 = new Linear(cfg.hiddenDim, cfg.hiddenDim, rng, gain);
    const flat = cfg.convChannels * (cfg.mapH * cfg.mapW +
                                     cfg.cropSize * cfg.cropSize);
    this.outFc = new Linear(flat + cfg.hiddenDim, cfg.hiddenDim, rng, gain);
  }

  /** Clamp raw glyph ids into the embedding table range. */
  private ids(glyphs: ArrayLike<number>): Int32Array {
    const out = new Int32Array(glyphs.length);
    const top = this.cfg.numGlyphs - 1;
    for (let i = 0; i < glyphs.length; i++) {
      const g = glyphs[i];
      out[i] = g < 0 ? 0 : g > top ? top : g;
    }
    return out;
  }

  /** Egocentric crop of the glyph plane; off-map cells carry the sentinel. */
  crop(glyphs: ArrayLike<number>, heroX: number, heroY: number): Int32Array {
    const { cropSize: k, mapH, mapW, numGlyphs } = this.cfg;
    const half = (k - 1) / 2;
    const out = new Int32Array(k * k).fill(numGlyphs - 1);
    for (let dy = -half; dy <= half; dy++) {
      const y = heroY + dy;
      if (y < 0 || y >= mapH) continue;
      for (let dx = -half; dx <= half; dx++) {
        const x = heroX + dx;
        if (x < 0 || x >= mapW) continue;
        out[(dy + half) * k + (dx + half)] = glyphs[y * mapW + x];
      }
    }
    return this.ids(out);
  }

  /** o_t: the fixed-size latent for one observation. */
  encode(glyphs: ArrayLike<number>, blstats: ArrayLike<number>,
         heroX: number, heroY: number): Tensor {
    const cfg = this.cfg;
    const mapIds = this.ids(glyphs);
    const mapEmb = transpose2d(embedLookup(this.embedding, mapIds));
    const mapOut = this.mapStack.forward(
      reshape(mapEmb, [cfg.embedDim, cfg.mapH, cfg.mapW]),
      cfg, cfg.mapH, cfg.mapW);

    const cropIds = this.crop(glyphs, heroX, heroY);
    const cropEmb = transpose2d(embedLookup(this.embedding, cropIds));
    const cropOut = this.cropStack.forward(
      reshape(cropEmb, [cfg.embedDim, cfg.cropSize, cfg.cropSize]),
      cfg, cfg.cropSize, cfg.cropSize);

    // stats are integers of wildly different scales; squash them
    const statsData = new Float64Array(cfg.statsLen);
    for (let i = 0; i < cfg.statsLen; i++) statsData[i] = blstats[i] / 100;
    const stats = new Tensor(statsData, [cfg.statsLen]);
    const statsOut = relu(this.statsFc2.forward(
      relu(this.statsFc1.forward(stats))));

    const joined = concat1d([
      reshape(mapOut, [mapOut.size]),
      reshape(cropOut, [cropOut.size]),
      statsOut,
    ]);
    return relu(this.outFc.forward(joined));
  }

  params(): Tensor[] {
    return [
      this.embedding,
      ...this.mapStack.params(), ...this.cropStack.params(),
      ...this.statsFc1.params(), ...this.statsFc2.params(),
      ...this.outFc.params(),
    ];
  }
}

export interface LstmState {
  h: Tensor;
  c: Tensor;
}

export class LstmCell {
  wx: Tensor;  // [in, 4H]
  wh: Tensor;  // [H, 4H]
  b: Tensor;   // [4H]
  hidden: number;

  constructor(inDim: number, hidden: number, rng: Rng) {
    this.hidden = hidden;
    this.wx = heInit([inDim, 4 * hidden], inDim, rng);
    this.wh = heInit([hidden, 4 * hidden], hidden, rng);
    this.b = zeros([4 * hidden], true);
  }

  initialState(): LstmState {
    return { h: zeros([this.hidden]), c: zeros([this.hidden]) };
  }

  forward(x: Tensor, state: LstmState): LstmState {
    const n = this.hidden;
    const gates = add(add(matmul(x, this.wx), matmul(state.h, this.wh)),
                      this.b);
    const i = sigmoid(slice1d(gates, 0, n));
    const f = sigmoid(slice1d(gates, n, n));
    const g = tanhT(slice1d(gates, 2 * n, n));
    const o = sigmoid(slice1d(gates, 3 * n, n));
    const c = add(mul(f, state.c), mul(i, g));
    const h = mul(o, tanhT(c));
    return { h, c };
  }

  params(): Tensor[] {
    return [this.wx, this.wh, this.b];
  }
}

export interface PolicyOutput {
  logProbs: Tensor;   // log action distribution
  values: Tensor[];   // 1 head, or 2 with RND (extrinsic, intrinsic)
  state: LstmState;
}

export class PolicyNet {
  encoder: Encoder;
  lstm: LstmCell;
  policyHead: Linear;
  valueHeads: Linear[];
  numActions: number;

  constructor(cfg: EncoderConfig, numActions: number, rng: Rng,
              valueHeadCount = 1) {
    this.encoder = new Encoder(cfg, rng);
    this.lstm = new LstmCell(cfg.hiddenDim, cfg.hiddenDim, rng);
    this.policyHead = new Linear(cfg.hiddenDim, numActions, rng);
    this.valueHeads = [];
    for (let i = 0; i < valueHeadCount; i++) {
      this.valueHeads.push(new Linear(cfg.hiddenDim, 1, rng));
    }
    this.numActions = numActions;
  }

  initialState(): LstmState {
    return this.lstm.initialState();
  }

  step(glyphs: ArrayLike<number>, blstats: ArrayLike<number>,
       heroX: number, heroY: number, state: LstmState): PolicyOutput {
    const ot = this.encoder.encode(glyphs, blstats, heroX, heroY);
    const next = this.lstm.forward(ot, state);
    const logProbs = logSoftmax(this.policyHead.forward(next.h));
    const values = this.valueHeads.map((head) => head.forward(next.h));
    return { logProbs, values, state: next };
  }

  sample(logProbs: Tensor, rng: Rng): number {
    let u = rng.next();
    for (let i = 0; i < logProbs.size; i++) {
      u -= Math.exp(logProbs.data[i]);
      if (u <= 0) return i;
    }
    return logProbs.size - 1;
  }

  params(): Tensor[] {
    return [
      ...this.encoder.params(), ...this.lstm.params(),
      ...this.policyHead.params(),
      ...this.valueHeads.flatMap((h) => h.params()),
    ];
  }
}
