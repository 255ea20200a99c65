/**
 * Minimal reverse-mode autodiff on dense Float64 tensors.
 *
 * Everything runs at 64-bit precision so analytic gradients can be
 * checked against central finite differences at tight tolerances.
 * The op set is exactly what the baseline networks need: matmul,
 * elementwise math, 3x3 same-padding conv via im2col, embedding
 * lookup, slicing/concat for LSTM gates, and log-softmax.
 */

export class Tensor {
  data: Float64Array;
  shape: number[];
  grad: Float64Array | null = null;
  requiresGrad: boolean;
  parents: Tensor[] = [];
  backwardFn: (() => void) | null = null;

  constructor(data: Float64Array, shape: number[], requiresGrad = false) {
    const n = shape.reduce((a, b) => a * b, 1);
    if (data.length !== n) {
      throw new Error(`data length ${data.length} != shape size ${n}`);
    }
    this.data = data;
    this.shape = shape;
    this.requiresGrad = requiresGrad;
  }

  get size(): number {
    return this.data.length;
  }

  ensureGrad(): Float64Array {
    if (!this.grad) this.grad = new Float64Array(this.size);
    return this.grad;
  }

  item(): number {
    if (this.size !== 1) throw new Error("item() on non-scalar");
    return this.data[0];
  }
}

export function tensor(values: number[] | Float64Array,
                       shape?: number[], requiresGrad = false): Tensor {
  const data = values instanceof Float64Array
    ? values : Float64Array.from(values);
  return new Tensor(data, shape ?? [data.length], requiresGrad);
}

export function zeros(shape: number[], requiresGrad = false): Tensor {
  const n = shape.reduce((a, b) => a * b, 1);
  return new Tensor(new Float64Array(n), shape, requiresGrad);
}

function track(out: Tensor, parents: Tensor[], backwardFn: () => void): Tensor {
  out.requiresGrad = parents.some((p) => p.requiresGrad);
  if (out.requiresGrad) {
    out.parents = parents;
    out.backwardFn = backwardFn;
  }
  return out;
}

function sameShape(a: Tensor, b: Tensor): void {
  if (a.size !== b.size) {
    throw new Error(`shape mismatch: [${a.shape}] vs [${b.shape}]`);
  }
}

export function add(a: Tensor, b: Tensor): Tensor {
  sameShape(a, b);
  const out = new Tensor(new Float64Array(a.size), a.shape.slice());
  for (let i = 0; i < a.size; i++) out.data[i] = a.data[i] + b.data[i];
  return track(out, [a, b], () => {
    const g = out.grad!;
    if (a.requiresGrad) {
      const ga = a.ensureGrad();
      for (let i = 0; i < g.length; i++) ga[i] += g[i];
    }
    if (b.requiresGrad) {
      const gb = b.ensureGrad();
      for (let i = 0; i < g.length; i++) gb[i] += g[i];
    }
  });
}

export function sub(a: Tensor, b: Tensor): Tensor {
  return add(a, scale(b, -1));
}

export function mul(a: Tensor, b: Tensor): Tensor {
  sameShape(a, b);
  const out = new Tensor(new Float64Array(a.size), a.shape.slice());
  for (let i = 0; i < a.size; i++) out.data[i] = a.data[i] * b.data[i];
  return track(out, [a, b], () => {
    const g = out.grad!;
    if (a.requiresGrad) {
      const ga = a.ensureGrad();
      for (let i = 0; i < g.length; i++) ga[i] += g[i] * b.data[i];
    }
    if (b.requiresGrad) {
      const gb = b.ensureGrad();
      for (let i = 0; i < g.length; i++) gb[i] += g[i] * a.data[i];
    }
  });
}

export function scale(a: Tensor, s: number): Tensor {
  const out = new Tensor(new Float64Array(a.size), a.shape.slice());
  for (let i = 0; i < a.size; i++) out.data[i] = a.data[i] * s;
  return track(out, [a], () => {
    const g = out.grad!;
    const ga = a.ensureGrad();
    for (let i = 0; i < g.length; i++) ga[i] += g[i] * s;
  });
}

export function addScalar(a: Tensor, s: number): Tensor {
  const out = new Tensor(new Float64Array(a.size), a.shape.slice());
  for (let i = 0; i < a.size; i++) out.data[i] = a.data[i] + s;
  return track(out, [a], () => {
    const g = out.grad!;
    const ga = a.ensureGrad();
    for (let i = 0; i < g.length; i++) ga[i] += g[i];
  });
}

/** [m,k] x [k,n] -> [m,n] */
export function matmul(a: Tensor, b: Tensor): Tensor {
  const [m, k] = a.shape.length === 2 ? a.shape : [1, a.shape[0]];
  const [k2, n] = b.shape;
  if (k !== k2) {
    throw new Error(`matmul mismatch: [${a.shape}] x [${b.shape}]`);
  }
  const out = new Tensor(new Float64Array(m * n),
                         a.shape.length === 2 ? [m, n] : [n]);
  const ad = a.data, bd = b.data, od = out.data;
  for (let i = 0; i < m; i++) {
    for (let p = 0; p < k; p++) {
      const av = ad[i * k + p];
      if (av === 0) continue;
      const bo = p * n, oo = i * n;
      for (let j = 0; j < n; j++) od[oo + j] += av * bd[bo + j];
    }
  }
  return track(out, [a, b], () => {
    const g = out.grad!;
    if (a.requiresGrad) {
      const ga = a.ensureGrad();
      for (let i = 0; i < m; i++) {
        for (let p = 0; p < k; p++) {
          let s = 0;
          const bo = p * n, oo = i * n;
          for (let j = 0; j < n; j++) s += g[oo + j] * bd[bo + j];
          ga[i * k + p] += s;
        }
      }
    }
    if (b.requiresGrad) {
      const gb = b.ensureGrad();
      for (let i = 0; i < m; i++) {
        const oo = i * n;
        for (let p = 0; p < k; p++) {
          const av = ad[i * k + p];
          if (av === 0) continue;
          const bo = p * n;
          for (let j = 0; j < n; j++) gb[bo + j] += av * g[oo + j];
        }
      }
    }
  });
}

export function relu(a: Tensor): Tensor {
  const out = new Tensor(new Float64Array(a.size), a.shape.slice());
  for (let i = 0; i < a.size; i++) out.data[i] = a.data[i] > 0 ? a.data[i] : 0;
  return track(out, [a], () => {
    const g = out.grad!;
    const ga = a.ensureGrad();
    for (let i = 0; i < g.length; i++) if (a.data[i] > 0) ga[i] += g[i];
  });
}

export function tanhT(a: Tensor): Tensor {
  const out = new Tensor(new Float64Array(a.size), a.shape.slice());
  for (let i = 0; i < a.size; i++) out.data[i] = Math.tanh(a.data[i]);
  return track(out, [a], () => {
    const g = out.grad!;
    const ga = a.ensureGrad();
    for (let i = 0; i < g.length; i++) {
      ga[i] += g[i] * (1 - out.data[i] * out.data[i]);
    }
  });
}

export function expT(a: Tensor): Tensor {
  const out = new Tensor(new Float64Array(a.size), a.shape.slice());
  for (let i = 0; i < a.size; i++) out.data[i] = Math.exp(a.data[i]);
  return track(out, [a], () => {
    const g = out.grad!;
    const ga = a.ensureGrad();
    for (let i = 0; i < g.length; i++) ga[i] += g[i] * out.data[i];
  });
}

export function sigmoid(a: Tensor): Tensor {
  const out = new Tensor(new Float64Array(a.size), a.shape.slice());
  for (let i = 0; i < a.size; i++) out.data[i] = 1 / (1 + Math.exp(-a.data[i]));
  return track(out, [a], () => {
    const g = out.grad!;
    const ga = a.ensureGrad();
    for (let i = 0; i < g.length; i++) {
      ga[i] += g[i] * out.data[i] * (1 - out.data[i]);
    }
  });
}

export function slice1d(a: Tensor, start: number, len: number): Tensor {
  const out = new Tensor(a.data.slice(start, start + len), [len]);
  return track(out, [a], () => {
    const g = out.grad!;
    const ga = a.ensureGrad();
    for (let i = 0; i < len; i++) ga[start + i] += g[i];
  });
}

export function concat1d(parts: Tensor[]): Tensor {
  const total = parts.reduce((s, p) => s + p.size, 0);
  const data = new Float64Array(total);
  let off = 0;
  for (const p of parts) {
    data.set(p.data, off);
    off += p.size;
  }
  const out = new Tensor(data, [total]);
  return track(out, parts, () => {
    const g = out.grad!;
    let o = 0;
    for (const p of parts) {
      if (p.requiresGrad) {
        const gp = p.ensureGrad();
        for (let i = 0; i < p.size; i++) gp[i] += g[o + i];
      }
      o += p.size;
    }
  });
}

export function sum(a: Tensor): Tensor {
  let s = 0;
  for (let i = 0; i < a.size; i++) s += a.data[i];
  const out = new Tensor(Float64Array.of(s), [1]);
  return track(out, [a], () => {
    const g = out.grad![0];
    const ga = a.ensureGrad();
    for (let i = 0; i < a.size; i++) ga[i] += g;
  });
}

export function mean(a: Tensor): Tensor {
  return scale(sum(a), 1 / a.size);
}

export function pick(a: Tensor, index: number): Tensor {
  const out = new Tensor(Float64Array.of(a.data[index]), [1]);
  return track(out, [a], () => {
    a.ensureGrad()[index] += out.grad![0];
  });
}

/** Rows of `table` [V,k] gathered by integer ids -> [N,k]. */
export function embedLookup(table: Tensor, ids: Int32Array): Tensor {
  const [v, k] = table.shape;
  const out = new Tensor(new Float64Array(ids.length * k), [ids.length, k]);
  for (let i = 0; i < ids.length; i++) {
    const id = ids[i];
    if (id < 0 || id >= v) throw new Error(`embedding id ${id} out of range`);
    out.data.set(table.data.subarray(id * k, id * k + k), i * k);
  }
  return track(out, [table], () => {
    const g = out.grad!;
    const gt = table.ensureGrad();
    for (let i = 0; i < ids.length; i++) {
      const to = ids[i] * k, fo = i * k;
      for (let j = 0; j < k; j++) gt[to + j] += g[fo + j];
    }
  });
}

/**
 * 3x3 same-padding conv: input [C,H,W] -> output [O,H,W], weight
 * [O, C*9], bias [O]. Implemented through an im2col patch matrix so
 * both passes are matmul-shaped loops.
 */
export function conv3x3(input: Tensor, weight: Tensor, bias: Tensor,
                        c: number, h: number, w: number): Tensor {
  const o = bias.size;
  const patch = c * 9;
  if (input.size !== c * h * w || weight.size !== o * patch) {
    throw new Error("conv3x3 shape mismatch");
  }
  const hw = h * w;
  const cols = new Float64Array(hw * patch);
  const ind = input.data;
  for (let y = 0; y < h; y++) {
    for (let x = 0; x < w; x++) {
      const base = (y * w + x) * patch;
      let p = 0;
      for (let ch = 0; ch < c; ch++) {
        const co = ch * hw;
        for (let dy = -1; dy <= 1; dy++) {
          const yy = y + dy;
          for (let dx = -1; dx <= 1; dx++) {
            const xx = x + dx;
            cols[base + p++] =
              yy >= 0 && yy < h && xx >= 0 && xx < w ? ind[co + yy * w + xx] : 0;
          }
        }
      }
    }
  }
  const out = new Tensor(new Float64Array(o * hw), [o, h, w]);
  const wd = weight.data, od = out.data, bd = bias.data;
  for (let oc = 0; oc < o; oc++) {
    const wo = oc * patch, oo = oc * hw;
    for (let i = 0; i < hw; i++) {
      let s = bd[oc];
      const cb = i * patch;
      for (let p = 0; p < patch; p++) s += wd[wo + p] * cols[cb + p];
      od[oo + i] = s;
    }
  }
  return track(out, [input, weight, bias], () => {
    const g = out.grad!;
    if (bias.requiresGrad) {
      const gb = bias.ensureGrad();
      for (let oc = 0; oc < o; oc++) {
        let s = 0;
        const oo = oc * hw;
        for (let i = 0; i < hw; i++) s += g[oo + i];
        gb[oc] += s;
      }
    }
    if (weight.requiresGrad) {
      const gw = weight.ensureGrad();
      for (let oc = 0; oc < o; oc++) {
        const wo = oc * patch, oo = oc * hw;
        for (let i = 0; i < hw; i++) {
          const gv = g[oo + i];
          if (gv === 0) continue;
          const cb = i * patch;
          for (let p = 0; p < patch; p++) gw[wo + p] += gv * cols[cb + p];
        }
      }
    }
    if (input.requiresGrad) {
      const gi = input.ensureGrad();
      for (let oc = 0; oc < o; oc++) {
        const wo = oc * patch, oo = oc * hw;
        for (let y = 0; y < h; y++) {
          for (let x = 0; x < w; x++) {
            const gv = g[oo + y * w + x];
            if (gv === 0) continue;
            let p = 0;
            for (let ch = 0; ch < c; ch++) {
              const co = ch * hw;
              for (let dy = -1; dy <= 1; dy++) {
                const yy = y + dy;
                for (let dx = -1; dx <= 1; dx++) {
                  const xx = x + dx;
                  if (yy >= 0 && yy < h && xx >= 0 && xx < w) {
                    gi[co + yy * w + xx] += gv * wd[wo + p];
                  }
                  p++;
                }
              }
            }
          }
        }
      }
    }
  });
}

/** Numerically stable log-softmax over a vector. */
export function logSoftmax(a: Tensor): Tensor {
  let mx = -Infinity;
  for (let i = 0; i < a.size; i++) if (a.data[i] > mx) mx = a.data[i];
  let z = 0;
  for (let i = 0; i < a.size; i++) z += Math.exp(a.data[i] - mx);
  const lz = mx + Math.log(z);
  const out = new Tensor(new Float64Array(a.size), a.shape.slice());
  for (let i = 0; i < a.size; i++) out.data[i] = a.data[i] - lz;
  return track(out, [a], () => {
    const g = out.grad!;
    const ga = a.ensureGrad();
    let gs = 0;
    for (let i = 0; i < g.length; i++) gs += g[i];
    for (let i = 0; i < g.length; i++) {
      ga[i] += g[i] - Math.exp(out.data[i]) * gs;
    }
  });
}

/** Reverse-mode sweep from a scalar root. */
export function backward(root: Tensor): void {
  if (root.size !== 1) throw new Error("backward needs a scalar root");
  const order: Tensor[] = [];
  const seen = new Set<Tensor>();
  const visit = (t: Tensor) => {
    if (seen.has(t) || !t.requiresGrad) return;
    seen.add(t);
    for (const p of t.parents) visit(p);
    order.push(t);
  };
  visit(root);
  root.ensureGrad()[0] = 1;
  for (let i = order.length - 1; i >= 0; i--) {
    const t = order[i];
    if (t.backwardFn && t.grad) t.backwardFn();
  }
}

export function zeroGrads(params: Tensor[]): void {
  for (const p of params) {
    if (p.grad) p.grad.fill(0);
  }
}
