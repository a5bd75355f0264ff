/**
 * Minimal reverse-mode autodiff over row-major Float64Array matrices.
 *
 * Just enough ops for the route-choice network: affine layers, gated
 * crystal-graph messages (sigmoid/softplus), batch norm, per-receiver
 * max aggregation, row gather/dropout, and masked softmax
 * cross-entropy. Every backward formula is covered by a
 * finite-difference test in test/tensor.spec.ts.
 */

import { PRNG, gauss } from "./prng.js";

export class Tensor {
  data: Float64Array;
  grad: Float64Array | null = null;
  readonly rows: number;
  readonly cols: number;
  backward: (() => void) | null = null;

  constructor(rows: number, cols: number, data?: Float64Array) {
    this.rows = rows;
    this.cols = cols;
    this.data = data ?? new Float64Array(rows * cols);
  }

  get size(): number {
    return this.rows * this.cols;
  }

  ensureGrad(): Float64Array {
    if (this.grad === null) this.grad = new Float64Array(this.size);
    return this.grad;
  }
}

/** Operation tape: records every op so backward() can replay in reverse. */
export class Tape {
  private nodes: Tensor[] = [];

  track(t: Tensor): Tensor {
    this.nodes.push(t);
    return t;
  }

  constant(rows: number, cols: number, data: Float64Array): Tensor {
    return new Tensor(rows, cols, data); // leaves need no tracking
  }

  /** Run backprop from a scalar loss. */
  backward(loss: Tensor): void {
    if (loss.size !== 1) throw new Error("backward needs a scalar");
    this.backwardFrom(loss, Float64Array.from([1.0]));
  }

  /** Vector-Jacobian product: seed an output gradient and propagate. */
  backwardFrom(out: Tensor, seed: Float64Array): void {
    if (seed.length !== out.size) throw new Error("seed size mismatch");
    out.ensureGrad().set(seed);
    for (let i = this.nodes.length - 1; i >= 0; i--) {
      const node = this.nodes[i];
      if (node.backward && node.grad !== null) node.backward();
    }
  }

  reset(): void {
    this.nodes = [];
  }

  matmul(a: Tensor, b: Tensor): Tensor {
    if (a.cols !== b.rows) throw new Error("matmul shape mismatch");
    const out = new Tensor(a.rows, b.cols);
    for (let i = 0; i < a.rows; i++) {
      for (let k = 0; k < a.cols; k++) {
        const av = a.data[i * a.cols + k];
        if (av === 0) continue;
        for (let j = 0; j < b.cols; j++) {
          out.data[i * b.cols + j] += av * b.data[k * b.cols + j];
        }
      }
    }
    out.backward = () => {
      const g = out.grad!;
      const ga = a.ensureGrad();
      const gb = b.ensureGrad();
      for (let i = 0; i < a.rows; i++) {
        for (let j = 0; j < b.cols; j++) {
          const gv = g[i * b.cols + j];
          if (gv === 0) continue;
          for (let k = 0; k < a.cols; k++) {
            ga[i * a.cols + k] += gv * b.data[k * b.cols + j];
            gb[k * b.cols + j] += gv * a.data[i * a.cols + k];
          }
        }
      }
    };
    return this.track(out);
  }

  /** X + broadcast row bias. */
  addBias(x: Tensor, bias: Tensor): Tensor {
    if (bias.rows !== 1 || bias.cols !== x.cols) {
      throw new Error("bias must be 1 x cols");
    }
    const out = new Tensor(x.rows, x.cols);
    for (let i = 0; i < x.rows; i++) {
      for (let j = 0; j < x.cols; j++) {
        out.data[i * x.cols + j] = x.data[i * x.cols + j] + bias.data[j];
      }
    }
    out.backward = () => {
      const g = out.grad!;
      const gx = x.ensureGrad();
      const gb = bias.ensureGrad();
      for (let i = 0; i < x.rows; i++) {
        for (let j = 0; j < x.cols; j++) {
          gx[i * x.cols + j] += g[i * x.cols + j];
          gb[j] += g[i * x.cols + j];
        }
      }
    };
    return this.track(out);
  }

  add(a: Tensor, b: Tensor): Tensor {
    if (a.rows !== b.rows || a.cols !== b.cols) throw new Error("add shape");
    const out = new Tensor(a.rows, a.cols);
    for (let i = 0; i < a.size; i++) out.data[i] = a.data[i] + b.data[i];
    out.backward = () => {
      const g = out.grad!;
      const ga = a.ensureGrad();
      const gb = b.ensureGrad();
      for (let i = 0; i < a.size; i++) {
        ga[i] += g[i];
        gb[i] += g[i];
      }
    };
    return this.track(out);
  }

  mul(a: Tensor, b: Tensor): Tensor {
    if (a.rows !== b.rows || a.cols !== b.cols) throw new Error("mul shape");
    const out = new Tensor(a.rows, a.cols);
    for (let i = 0; i < a.size; i++) out.data[i] = a.data[i] * b.data[i];
    out.backward = () => {
      const g = out.grad!;
      const ga = a.ensureGrad();
      const gb = b.ensureGrad();
      for (let i = 0; i < a.size; i++) {
        ga[i] += g[i] * b.data[i];
        gb[i] += g[i] * a.data[i];
      }
    };
    return this.track(out);
  }

  sigmoid(x: Tensor): Tensor {
    const out = new Tensor(x.rows, x.cols);
    for (let i = 0; i < x.size; i++) {
      const v = x.data[i];
      out.data[i] = v >= 0 ? 1 / (1 + Math.exp(-v))
                           : Math.exp(v) / (1 + Math.exp(v));
    }
    out.backward = () => {
      const g = out.grad!;
      const gx = x.ensureGrad();
      for (let i = 0; i < x.size; i++) {
        gx[i] += g[i] * out.data[i] * (1 - out.data[i]);
      }
    };
    return this.track(out);
  }

  softplus(x: Tensor): Tensor {
    const out = new Tensor(x.rows, x.cols);
    for (let i = 0; i < x.size; i++) {
      const v = x.data[i];
      out.data[i] = v > 30 ? v : v < -30 ? Math.exp(v) : Math.log1p(Math.exp(v));
    }
    out.backward = () => {
      const g = out.grad!;
      const gx = x.ensureGrad();
      for (let i = 0; i < x.size; i++) {
        const v = x.data[i];
        const sig = v >= 0 ? 1 / (1 + Math.exp(-v))
                           : Math.exp(v) / (1 + Math.exp(v));
        gx[i] += g[i] * sig;
      }
    };
    return this.track(out);
  }

  /** Column-wise concatenation of equally-tall matrices. */
  concatCols(parts: Tensor[]): Tensor {
    const rows = parts[0].rows;
    let cols = 0;
    for (const p of parts) {
      if (p.rows !== rows) throw new Error("concat rows mismatch");
      cols += p.cols;
    }
    const out = new Tensor(rows, cols);
    let off = 0;
    for (const p of parts) {
      for (let i = 0; i < rows; i++) {
        out.data.set(p.data.subarray(i * p.cols, (i + 1) * p.cols),
                     i * cols + off);
      }
      off += p.cols;
    }
    out.backward = () => {
      const g = out.grad!;
      let o = 0;
      for (const p of parts) {
        const gp = p.ensureGrad();
        for (let i = 0; i < rows; i++) {
          for (let j = 0; j < p.cols; j++) {
            gp[i * p.cols + j] += g[i * cols + o + j];
          }
        }
        o += p.cols;
      }
    };
    return this.track(out);
  }

  /** Pick rows by index; index -1 yields a zero row (no gradient). */
  gatherRows(x: Tensor, idx: Int32Array): Tensor {
    const out = new Tensor(idx.length, x.cols);
    for (let i = 0; i < idx.length; i++) {
      if (idx[i] >= 0) {
        out.data.set(x.data.subarray(idx[i] * x.cols, (idx[i] + 1) * x.cols),
                     i * x.cols);
      }
    }
    out.backward = () => {
      const g = out.grad!;
      const gx = x.ensureGrad();
      for (let i = 0; i < idx.length; i++) {
        if (idx[i] < 0) continue;
        for (let j = 0; j < x.cols; j++) {
          gx[idx[i] * x.cols + j] += g[i * x.cols + j];
        }
      }
    };
    return this.track(out);
  }

  /**
   * Element-wise max over rows sharing a segment id (per column).
   * Empty segments stay 0; gradients flow to the (first) argmax row.
   */
  segmentMax(x: Tensor, seg: Int32Array, nSeg: number): Tensor {
    const out = new Tensor(nSeg, x.cols);
    const argmax = new Int32Array(nSeg * x.cols).fill(-1);
    for (let r = 0; r < x.rows; r++) {
      const s = seg[r];
      for (let j = 0; j < x.cols; j++) {
        const v = x.data[r * x.cols + j];
        const slot = s * x.cols + j;
        if (argmax[slot] === -1 || v > out.data[slot]) {
          out.data[slot] = v;
          argmax[slot] = r;
        }
      }
    }
    for (let i = 0; i < argmax.length; i++) {
      if (argmax[i] === -1) out.data[i] = 0;
    }
    out.backward = () => {
      const g = out.grad!;
      const gx = x.ensureGrad();
      for (let i = 0; i < argmax.length; i++) {
        const r = argmax[i];
        if (r >= 0) gx[r * x.cols + (i % x.cols)] += g[i];
      }
    };
    return this.track(out);
  }

  /** Inverted dropout over whole rows. */
  dropRows(x: Tensor, keep: Uint8Array, keepProb: number): Tensor {
    const out = new Tensor(x.rows, x.cols);
    const scale = 1 / keepProb;
    for (let i = 0; i < x.rows; i++) {
      if (!keep[i]) continue;
      for (let j = 0; j < x.cols; j++) {
        out.data[i * x.cols + j] = x.data[i * x.cols + j] * scale;
      }
    }
    out.backward = () => {
      const g = out.grad!;
      const gx = x.ensureGrad();
      for (let i = 0; i < x.rows; i++) {
        if (!keep[i]) continue;
        for (let j = 0; j < x.cols; j++) {
          gx[i * x.cols + j] += g[i * x.cols + j] * scale;
        }
      }
    };
    return this.track(out);
  }

  /** Batch normalization over rows (per column), batch statistics. */
  batchNorm(x: Tensor, gamma: Tensor, beta: Tensor, eps = 1e-5): Tensor {
    const n = x.rows;
    const c = x.cols;
    const mean = new Float64Array(c);
    const variance = new Float64Array(c);
    for (let j = 0; j < c; j++) {
      let m = 0;
      for (let i = 0; i < n; i++) m += x.data[i * c + j];
      m /= n;
      let v = 0;
      for (let i = 0; i < n; i++) {
        const d = x.data[i * c + j] - m;
        v += d * d;
      }
      mean[j] = m;
      variance[j] = v / n;
    }
    const xhat = new Float64Array(n * c);
    const out = new Tensor(n, c);
    for (let j = 0; j < c; j++) {
      const inv = 1 / Math.sqrt(variance[j] + eps);
      for (let i = 0; i < n; i++) {
        xhat[i * c + j] = (x.data[i * c + j] - mean[j]) * inv;
        out.data[i * c + j] = gamma.data[j] * xhat[i * c + j] + beta.data[j];
      }
    }
    out.backward = () => {
      const g = out.grad!;
      const gx = x.ensureGrad();
      const gg = gamma.ensureGrad();
      const gb = beta.ensureGrad();
      for (let j = 0; j < c; j++) {
        const inv = 1 / Math.sqrt(variance[j] + eps);
        let sumG = 0;
        let sumGX = 0;
        for (let i = 0; i < n; i++) {
          const gi = g[i * c + j];
          sumG += gi;
          sumGX += gi * xhat[i * c + j];
          gg[j] += gi * xhat[i * c + j];
          gb[j] += gi;
        }
        for (let i = 0; i < n; i++) {
          gx[i * c + j] += (gamma.data[j] * inv / n)
            * (n * g[i * c + j] - sumG - xhat[i * c + j] * sumGX);
        }
      }
    };
    return this.track(out);
  }

  /**
   * Mean softmax cross-entropy over the rows with rowMask set.
   * Labels index columns; rows without mask contribute nothing.
   */
  softmaxCrossEntropy(logits: Tensor, labels: Int32Array,
                      rowMask: Uint8Array): Tensor {
    const n = logits.rows;
    const c = logits.cols;
    const probs = new Float64Array(n * c);
    let count = 0;
    let total = 0;
    for (let i = 0; i < n; i++) {
      let maxv = -Infinity;
      for (let j = 0; j < c; j++) maxv = Math.max(maxv, logits.data[i * c + j]);
      let z = 0;
      for (let j = 0; j < c; j++) {
        probs[i * c + j] = Math.exp(logits.data[i * c + j] - maxv);
        z += probs[i * c + j];
      }
      for (let j = 0; j < c; j++) probs[i * c + j] /= z;
      if (rowMask[i]) {
        count += 1;
        total += -Math.log(Math.max(probs[i * c + labels[i]], 1e-12));
      }
    }
    const out = new Tensor(1, 1);
    out.data[0] = count > 0 ? total / count : 0;
    out.backward = () => {
      if (count === 0) return;
      const g = out.grad![0];
      const gl = logits.ensureGrad();
      for (let i = 0; i < n; i++) {
        if (!rowMask[i]) continue;
        for (let j = 0; j < c; j++) {
          const onehot = j === labels[i] ? 1 : 0;
          gl[i * c + j] += (g / count) * (probs[i * c + j] - onehot);
        }
      }
    };
    return this.track(out);
  }
}

/** Trainable parameter set with He-style init and Adam updates. */
export class Params {
  tensors: Map<string, Tensor> = new Map();
  private m: Map<string, Float64Array> = new Map();
  private v: Map<string, Float64Array> = new Map();
  private step = 0;

  create(name: string, rows: number, cols: number, rng: PRNG,
         scale?: number): Tensor {
    const t = new Tensor(rows, cols);
    const s = scale ?? Math.sqrt(2 / (rows + cols));
    for (let i = 0; i < t.size; i++) t.data[i] = gauss(rng) * s;
    this.tensors.set(name, t);
    this.m.set(name, new Float64Array(t.size));
    this.v.set(name, new Float64Array(t.size));
    return t;
  }

  createConst(name: string, rows: number, cols: number, value: number): Tensor {
    const t = new Tensor(rows, cols);
    t.data.fill(value);
    this.tensors.set(name, t);
    this.m.set(name, new Float64Array(t.size));
    this.v.set(name, new Float64Array(t.size));
    return t;
  }

  zeroGrads(): void {
    for (const t of this.tensors.values()) t.grad = null;
  }

  adamStep(lr: number, beta1 = 0.9, beta2 = 0.999, eps = 1e-8): void {
    this.step += 1;
    const bc1 = 1 - Math.pow(beta1, this.step);
    const bc2 = 1 - Math.pow(beta2, this.step);
    for (const [name, t] of this.tensors) {
      if (t.grad === null) continue;
      const m = this.m.get(name)!;
      const v = this.v.get(name)!;
      for (let i = 0; i < t.size; i++) {
        const g = t.grad[i];
        m[i] = beta1 * m[i] + (1 - beta1) * g;
        v[i] = beta2 * v[i] + (1 - beta2) * g * g;
        t.data[i] -= lr * (m[i] / bc1) / (Math.sqrt(v[i] / bc2) + eps);
      }
    }
  }
}
