/**
 * Route-choice network: linear encoders to a shared hidden width, a
 * stack of crystal-graph convolutions (gated sigmoid/softplus messages,
 * batch-normalized pre-activations, element-wise MAX aggregation per
 * receiver, residual update), and a linear head over route classes.
 * Invalid classes are masked to -1e9 before softmax.
 *
 * Edge dropout sits between layers: each layer draws a fresh keep-mask
 * over message records.
 */

import { GraphData } from "./graph.js";
import { PRNG } from "./prng.js";
import { Params, Tape, Tensor } from "./tensor.js";

export interface ModelConfig {
  hidden: number;     // embedding width
  layers: number;     // conv layers
  dropout: number;    // per-layer edge drop probability
}

export class RouteChoiceModel {
  readonly params = new Params();
  readonly cfg: ModelConfig;
  private data: GraphData;

  constructor(data: GraphData, cfg: ModelConfig, rng: PRNG) {
    this.data = data;
    this.cfg = cfg;
    const h = cfg.hidden;
    this.params.create("node_enc_w", data.nodeDim, h, rng);
    this.params.createConst("node_enc_b", 1, h, 0);
    this.params.create("edge_enc_w", data.edgeDim, h, rng);
    this.params.createConst("edge_enc_b", 1, h, 0);
    for (let l = 0; l < cfg.layers; l++) {
      this.params.create(`conv${l}_wf`, 3 * h, h, rng);
      this.params.createConst(`conv${l}_bf`, 1, h, 0);
      this.params.create(`conv${l}_ws`, 3 * h, h, rng);
      this.params.createConst(`conv${l}_bs`, 1, h, 0);
      this.params.createConst(`conv${l}_gf`, 1, h, 1); // BN gain (gate)
      this.params.createConst(`conv${l}_hf`, 1, h, 0); // BN shift (gate)
      this.params.createConst(`conv${l}_gs`, 1, h, 1); // BN gain (core)
      this.params.createConst(`conv${l}_hs`, 1, h, 0); // BN shift (core)
    }
    this.params.create("head_w", h, data.numClasses, rng);
    this.params.createConst("head_b", 1, data.numClasses, 0);
  }

  private p(name: string): Tensor {
    return this.params.tensors.get(name)!;
  }

  /**
   * One forward pass; returns masked logits [numSplits x numClasses].
   * Pass an rng to enable edge dropout (training); null disables it.
   */
  forward(tape: Tape, dropRng: PRNG | null): Tensor {
    const d = this.data;
    const n = d.nodeIds.length;
    const records = d.recv.length;

    const x = tape.constant(n, d.nodeDim, d.nodeFeatures);
    let h = tape.addBias(tape.matmul(x, this.p("node_enc_w")),
                         this.p("node_enc_b"));
    const eIn = tape.constant(records, d.edgeDim, d.edgeFeatures);
    const e = tape.addBias(tape.matmul(eIn, this.p("edge_enc_w")),
                           this.p("edge_enc_b"));

    for (let l = 0; l < this.cfg.layers; l++) {
      if (records > 0) {
        const z = tape.concatCols([
          tape.gatherRows(h, d.recv),
          tape.gatherRows(h, d.nbr),
          e,
        ]);
        const preF = tape.addBias(tape.matmul(z, this.p(`conv${l}_wf`)),
                                  this.p(`conv${l}_bf`));
        const gate = tape.sigmoid(tape.batchNorm(preF, this.p(`conv${l}_gf`),
                                                 this.p(`conv${l}_hf`)));
        const preS = tape.addBias(tape.matmul(z, this.p(`conv${l}_ws`)),
                                  this.p(`conv${l}_bs`));
        const core = tape.softplus(tape.batchNorm(preS, this.p(`conv${l}_gs`),
                                                  this.p(`conv${l}_hs`)));
        let msg = tape.mul(gate, core);
        if (dropRng !== null && this.cfg.dropout > 0) {
          const keep = new Uint8Array(records);
          for (let r = 0; r < records; r++) {
            keep[r] = dropRng() >= this.cfg.dropout ? 1 : 0;
          }
          msg = tape.dropRows(msg, keep, 1 - this.cfg.dropout);
        }
        h = tape.add(h, tape.segmentMax(msg, d.recv, n));
      }
    }

    const splitH = tape.gatherRows(h, d.splitIdx);
    const logits = tape.addBias(tape.matmul(splitH, this.p("head_w")),
                                this.p("head_b"));
    const mask = tape.constant(d.splitIds.length, d.numClasses, d.classMask);
    return tape.add(logits, mask);
  }
}

/** Row-wise argmax over logits data. */
export function argmaxRows(logits: Tensor): number[] {
  const out: number[] = [];
  for (let i = 0; i < logits.rows; i++) {
    let best = 0;
    for (let j = 1; j < logits.cols; j++) {
      if (logits.data[i * logits.cols + j] >
          logits.data[i * logits.cols + best]) best = j;
    }
    out.push(best);
  }
  return out;
}

/** Sample one class from the softmax of a logits row. */
export function sampleRow(logits: Tensor, row: number, rng: PRNG): number {
  const c = logits.cols;
  let maxv = -Infinity;
  for (let j = 0; j < c; j++) {
    maxv = Math.max(maxv, logits.data[row * c + j]);
  }
  const exps = new Float64Array(c);
  let z = 0;
  for (let j = 0; j < c; j++) {
    exps[j] = Math.exp(logits.data[row * c + j] - maxv);
    z += exps[j];
  }
  let u = rng() * z;
  for (let j = 0; j < c; j++) {
    u -= exps[j];
    if (u <= 0) return j;
  }
  return c - 1;
}
