/** Finite-difference checks for every backward formula. */

import { describe, expect, it } from "vitest";

import { mulberry32, gauss } from "../src/prng.js";
import { Params, Tape, Tensor } from "../src/tensor.js";

const rng = mulberry32(12345);

function randTensor(rows: number, cols: number): Tensor {
  const t = new Tensor(rows, cols);
  for (let i = 0; i < t.size; i++) t.data[i] = gauss(rng);
  return t;
}

/** Numeric gradient of scalar-valued f at t, central differences. */
function numericGrad(t: Tensor, f: () => number, h = 1e-6): Float64Array {
  const g = new Float64Array(t.size);
  for (let i = 0; i < t.size; i++) {
    const saved = t.data[i];
    t.data[i] = saved + h;
    const up = f();
    t.data[i] = saved - h;
    const down = f();
    t.data[i] = saved;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

function checkGrads(inputs: Tensor[], build: (tape: Tape) => Tensor): void {
  const runLoss = () => {
    const value = build(new Tape());
    let s = 0; // deterministic scalarization: weighted sum
    for (let i = 0; i < value.size; i++) s += (i % 3 + 1) * value.data[i];
    return s;
  };
  const tape = new Tape();
  const out = build(tape);
  // seed output grad with the same weights used in runLoss
  const seed = new Float64Array(out.size);
  for (let i = 0; i < out.size; i++) seed[i] = (i % 3) + 1;
  tape.backwardFrom(out, seed);
  for (const input of inputs) {
    const numeric = numericGrad(input, runLoss);
    const analytic = input.grad ?? new Float64Array(input.size);
    for (let i = 0; i < input.size; i++) {
      expect(analytic[i]).toBeCloseTo(numeric[i], 4);
    }
  }
}

describe("autodiff ops vs finite differences", () => {
  it("matmul", () => {
    const a = randTensor(3, 4);
    const b = randTensor(4, 2);
    checkGrads([a, b], (tape) => tape.matmul(a, b));
  });

  it("addBias", () => {
    const x = randTensor(3, 4);
    const b = randTensor(1, 4);
    checkGrads([x, b], (tape) => tape.addBias(x, b));
  });

  it("add and mul", () => {
    const a = randTensor(2, 3);
    const b = randTensor(2, 3);
    checkGrads([a, b], (tape) => tape.mul(tape.add(a, b), b));
  });

  it("sigmoid", () => {
    const x = randTensor(2, 5);
    checkGrads([x], (tape) => tape.sigmoid(x));
  });

  it("softplus", () => {
    const x = randTensor(2, 5);
    checkGrads([x], (tape) => tape.softplus(x));
  });

  it("concatCols", () => {
    const a = randTensor(3, 2);
    const b = randTensor(3, 3);
    const c = randTensor(3, 1);
    checkGrads([a, b, c], (tape) => tape.concatCols([a, b, c]));
  });

  it("gatherRows with missing rows", () => {
    const x = randTensor(4, 3);
    const idx = Int32Array.from([2, 0, -1, 2]);
    checkGrads([x], (tape) => tape.gatherRows(x, idx));
  });

  it("segmentMax", () => {
    const x = randTensor(6, 3);
    const seg = Int32Array.from([0, 0, 1, 1, 1, 3]); // segment 2 empty
    checkGrads([x], (tape) => tape.segmentMax(x, seg, 4));
  });

  it("dropRows", () => {
    const x = randTensor(4, 3);
    const keep = Uint8Array.from([1, 0, 1, 1]);
    checkGrads([x], (tape) => tape.dropRows(x, keep, 0.75));
  });

  it("batchNorm", () => {
    const x = randTensor(5, 3);
    const gamma = randTensor(1, 3);
    const beta = randTensor(1, 3);
    checkGrads([x, gamma, beta],
               (tape) => tape.batchNorm(x, gamma, beta));
  });

  it("softmaxCrossEntropy", () => {
    const logits = randTensor(4, 3);
    const labels = Int32Array.from([0, 2, 1, 1]);
    const mask = Uint8Array.from([1, 1, 0, 1]);
    checkGrads([logits],
               (tape) => tape.softmaxCrossEntropy(logits, labels, mask));
  });

  it("composed network slice", () => {
    const x = randTensor(5, 4);
    const w = randTensor(4, 3);
    const b = randTensor(1, 3);
    const gamma = randTensor(1, 3);
    const beta = randTensor(1, 3);
    const seg = Int32Array.from([0, 1, 0, 1, 0]);
    checkGrads([x, w, b, gamma, beta], (tape) => {
      const z = tape.addBias(tape.matmul(x, w), b);
      const n = tape.batchNorm(z, gamma, beta);
      const m = tape.mul(tape.sigmoid(n), tape.softplus(n));
      return tape.segmentMax(m, seg, 2);
    });
  });
});

describe("adam optimizer", () => {
  it("drives a quadratic to zero", () => {
    const params = new Params();
    const r = mulberry32(7);
    const w = params.create("w", 1, 4, r);
    for (let step = 0; step < 200; step++) {
      params.zeroGrads();
      w.ensureGrad();
      for (let i = 0; i < w.size; i++) w.grad![i] = 2 * w.data[i];
      params.adamStep(0.05);
    }
    for (let i = 0; i < w.size; i++) {
      expect(Math.abs(w.data[i])).toBeLessThan(0.05);
    }
  });
});
