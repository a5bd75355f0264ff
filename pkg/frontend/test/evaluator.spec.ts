import { afterAll, describe, expect, it } from "vitest";

import { StrategyEvaluator, strategyKey } from "../src/evaluator.js";
import { FIG2, tempDir, writeGraph } from "./helpers.js";

const dir = tempDir();
const fig2Path = writeGraph(FIG2, dir, "fig2.json");
const evaluator = new StrategyEvaluator(fig2Path);

afterAll(() => evaluator.close());

describe("eval-strategy pipe", () => {
  it("scores the known fig2 strategies", async () => {
    const none = await evaluator.evaluate({ "3": -1 }, 2);
    expect(none.valid).toBe(true);
    expect(none.rate).toBe(0);
    expect(none.blocked).toEqual([3, 4]);

    const taken = await evaluator.evaluate({ "3": 0 }, 2);
    expect(taken.valid).toBe(true);
    expect(taken.rate).toBeCloseTo(0.285792, 6);

    const broke = await evaluator.evaluate({ "3": -1 }, 1);
    expect(broke.valid).toBe(false);
    expect(broke.rate).toBe(1.0);
  });

  it("pipelines many requests in order", async () => {
    const fresh = new StrategyEvaluator(fig2Path);
    try {
      const results = await fresh.evaluateMany(
        [{ "3": 0 }, { "3": 1 }, { "3": -1 }], 2);
      expect(results.map((r) => r.valid)).toEqual([true, true, true]);
      expect(results[2].rate).toBe(0);
      expect(results[0].rate).toBeCloseTo(results[1].rate, 12);
    } finally {
      fresh.close();
    }
  });

  it("caches repeated lookups", async () => {
    const before = evaluator.calls;
    await evaluator.evaluate({ "3": -1 }, 2);
    await evaluator.evaluate({ "3": -1 }, 2);
    expect(evaluator.calls).toBe(before);
    expect(evaluator.requests).toBeGreaterThan(evaluator.calls);
  });

  it("surfaces contract violations with the payload", async () => {
    await expect(evaluator.evaluate({ "9999": 0 }, 2)).rejects.toThrow(
      /evaluator rejected request.*9999/);
  });

  it("cache keys are order-insensitive", () => {
    expect(strategyKey({ "5": 1, "3": -1 }, 2))
      .toBe(strategyKey({ "3": -1, "5": 1 }, 2));
    expect(strategyKey({ "3": -1 }, 2)).not.toBe(strategyKey({ "3": -1 }, 3));
  });
});
