/**
 * Unsupervised training loop for the route-choice network.
 *
 * Each batch: out-of-batch splitting nodes follow the network's argmax;
 * in-batch nodes are perturbed (softmax sample with prob 0.9, uniform
 * random with prob 0.1), then swept one by one in a random permutation,
 * exhaustively trying every unilateral class change through the solver
 * pipe and keeping improvements. The improved classification becomes
 * the training labels with prob 0.5, otherwise the historical best
 * does; cross-entropy on the in-batch rows, Adam steps. The whole
 * schedule repeats for each seed, and the final answer is the
 * historical best re-scored by the solver.
 */

import { GraphData, choiceFromClass, classFromChoice,
         validClasses } from "./graph.js";
import { EvalResult, Strategy, StrategyEvaluator } from "./evaluator.js";
import { RouteChoiceModel, argmaxRows, sampleRow } from "./model.js";
import { mulberry32, shuffle } from "./prng.js";
import { Tape } from "./tensor.js";

export interface TrainConfig {
  epochs: number;
  batchSize: number;
  followProb: number;
  randomProb: number;
  newLabelProb: number;
  lr: number;
  layers: number;
  hidden: number;
  dropout: number;
  seeds: number[];
}

export const DEFAULT_CONFIG: TrainConfig = {
  epochs: 50,
  batchSize: 16,
  followProb: 0.9,
  randomProb: 0.1,
  newLabelProb: 0.5,
  lr: 0.01,
  layers: 10,
  hidden: 64,
  dropout: 0.1,
  seeds: [0, 1, 2, 3, 4],
};

export interface TrainResult {
  strategy: Strategy;
  rate: number;
  blocked: number[];
  evaluatorCalls: number;
  evaluatorRequests: number;
  history: number[];          // best rate after each epoch, all seeds
}

function toStrategy(data: GraphData, cls: number[]): Strategy {
  const s: Strategy = {};
  data.splitIds.forEach((id, i) => {
    s[String(id)] = choiceFromClass(data, cls[i]);
  });
  return s;
}

export async function train(data: GraphData, evaluator: StrategyEvaluator,
                            budget: number,
                            config: TrainConfig = DEFAULT_CONFIG
                            ): Promise<TrainResult> {
  let bestRate = Infinity;
  let bestCls: number[] | null = null;
  const history: number[] = [];

  const score = (r: EvalResult): number => (r.valid ? r.rate : 1.0);
  const consider = (cls: number[], r: EvalResult): void => {
    if (r.valid && r.rate < bestRate) {
      bestRate = r.rate;
      bestCls = cls.slice();
    }
  };

  if (data.splitIds.length === 0) {
    const r = await evaluator.evaluate({}, budget);
    return { strategy: {}, rate: r.rate, blocked: r.blocked,
             evaluatorCalls: evaluator.calls,
             evaluatorRequests: evaluator.requests, history: [r.rate] };
  }

  const t = data.splitIds.length;
  for (const seed of config.seeds) {
    const rng = mulberry32(0x9e3779b9 ^ (seed * 2654435761));
    const model = new RouteChoiceModel(data, {
      hidden: config.hidden, layers: config.layers, dropout: config.dropout,
    }, rng);

    for (let epoch = 0; epoch < config.epochs; epoch++) {
      const order = shuffle([...Array(t).keys()], rng);
      for (let start = 0; start < t; start += config.batchSize) {
        const batch = order.slice(start, start + config.batchSize);
        const inBatch = new Uint8Array(t);
        for (const i of batch) inBatch[i] = 1;

        const tape = new Tape();
        const logits = model.forward(tape, rng);

        // assemble the perturbed classification
        const cls = argmaxRows(logits);
        for (const i of batch) {
          if (rng() < config.followProb) {
            cls[i] = sampleRow(logits, i, rng);
          } else {
            const options = validClasses(data, i);
            cls[i] = options[Math.floor(rng() * options.length)];
          }
        }
        consider(cls, await evaluator.evaluate(toStrategy(data, cls), budget));

        // exhaustive unilateral sweep over the in-batch nodes
        for (const i of shuffle(batch.slice(), rng)) {
          const options = validClasses(data, i);
          const candidates = options.map((c) => {
            const trial = cls.slice();
            trial[i] = c;
            return trial;
          });
          const results = await evaluator.evaluateMany(
            candidates.map((cand) => toStrategy(data, cand)), budget);
          results.forEach((r, k) => consider(candidates[k], r));
          let bestOption = cls[i];
          let bestScore = score(results[options.indexOf(cls[i])]);
          options.forEach((c, k) => {
            if (score(results[k]) < bestScore - 1e-15) {
              bestOption = c;
              bestScore = score(results[k]);
            }
          });
          cls[i] = bestOption;
        }

        // labels: improved classification or the historical best
        const labelCls = (rng() < config.newLabelProb || bestCls === null)
          ? cls : bestCls;
        const labels = Int32Array.from(labelCls);
        const loss = tape.softmaxCrossEntropy(logits, labels, inBatch);
        model.params.zeroGrads();
        tape.backward(loss);
        model.params.adamStep(config.lr);
      }
      history.push(bestRate);
    }
  }

  if (bestCls === null) {
    throw new Error("no valid strategy found during training");
  }
  const strategy = toStrategy(data, bestCls);
  const final = await evaluator.evaluate(strategy, budget);
  return {
    strategy,
    rate: final.rate,
    blocked: final.blocked,
    evaluatorCalls: evaluator.calls,
    evaluatorRequests: evaluator.requests,
    history,
  };
}
