/**
 * Seeded RNG and weight initializers for the baseline networks.
 * Orthogonal init follows the usual recipe: QR-like orthonormalization
 * of a gaussian matrix, scaled by a gain.
 */

import { Tensor } from "./tensor.js";

/** Small, fast 32-bit generator (sfc32), good enough for init/sampling. */
export class Rng {
  private a: number;
  private b: number;
  private c: number;
  private d: number;
  private spare: number | null = null;

  constructor(seed: number) {
    this.a = seed >>> 0;
    this.b = (seed ^ 0x9e3779b9) >>> 0;
    this.c = (seed ^ 0x85ebca6b) >>> 0;
    this.d = (seed ^ 0xc2b2ae35) >>> 0;
    for (let i = 0; i < 12; i++) this.next();
  }

  /** Uniform in [0, 1). */
  next(): number {
    const t = (this.a + this.b) >>> 0;
    this.a = this.b ^ (this.b >>> 9);
    this.b = (this.c + (this.c << 3)) >>> 0;
    this.c = ((this.c << 21) | (this.c >>> 11)) >>> 0;
    this.d = (this.d + 1) >>> 0;
    const out = (t + this.d) >>> 0;
    this.c = (this.c + out) >>> 0;
    return out / 4294967296;
  }

  int(n: number): number {
    return Math.floor(this.next() * n);
  }

  gauss(): number {
    if (this.spare !== null) {
      const v = this.spare;
      this.spare = null;
      return v;
    }
    let u = 0;
    while (u === 0) u = this.next();
    const v = this.next();
    const r = Math.sqrt(-2 * Math.log(u));
    this.spare = r * Math.sin(2 * Math.PI * v);
    return r * Math.cos(2 * Math.PI * v);
  }
}

export function uniformInit(shape: number[], bound: number, rng: Rng): Tensor {
  const n = shape.reduce((a, b) => a * b, 1);
  const data = new Float64Array(n);
  for (let i = 0; i < n; i++) data[i] = (rng.next() * 2 - 1) * bound;
  return new Tensor(data, shape, true);
}

/** Kaiming-style fan-in scaled gaussian. */
export function heInit(shape: number[], fanIn: number, rng: Rng): Tensor {
  const n = shape.reduce((a, b) => a * b, 1);
  const std = Math.sqrt(2 / fanIn);
  const data = new Float64Array(n);
  for (let i = 0; i < n; i++) data[i] = rng.gauss() * std;
  return new Tensor(data, shape, true);
}

/**
 * Orthogonal init for a [rows, cols] matrix: modified Gram-Schmidt on
 * the longer dimension of a gaussian draw, times `gain`.
 */
export function orthogonalInit(shape: [number, number], gain: number,
                               rng: Rng): Tensor {
  const [rows, cols] = shape;
  const transpose = rows < cols;
  const m = Math.max(rows, cols);
  const n = Math.min(rows, cols);
  // columns of q get orthonormalized; q is [m, n]
  const q: Float64Array[] = [];
  for (let j = 0; j < n; j++) {
    const col = new Float64Array(m);
    for (let i = 0; i < m; i++) col[i] = rng.gauss();
    for (const prev of q) {
      let d = 0;
      for (let i = 0; i < m; i++) d += col[i] * prev[i];
      for (let i = 0; i < m; i++) col[i] -= d * prev[i];
    }
    let norm = 0;
    for (let i = 0; i < m; i++) norm += col[i] * col[i];
    norm = Math.sqrt(norm);
    for (let i = 0; i < m; i++) col[i] /= norm;
    q.push(col);
  }
  const data = new Float64Array(rows * cols);
  for (let r = 0; r < rows; r++) {
    for (let c = 0; c < cols; c++) {
      const v = transpose ? q[r][c] : q[c][r];
      data[r * cols + c] = gain * v;
    }
  }
  return new Tensor(data, [rows, cols], true);
}
