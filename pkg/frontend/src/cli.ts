/**
 * CLI: train the route-choice heuristic against a graph file.
 *
 *   node dist/cli.js --graph g.json [--condensed c.json] --budget 10 \
 *       [--epochs 50] [--seeds 0,1,2,3,4] [--interdict interdict]
 *
 * Without --condensed the condensed graph is produced by running
 * `<interdict> condense <graph>`. Prints a JSON result on stdout.
 */

import { execFileSync } from "node:child_process";
import { readFileSync } from "node:fs";

import { StrategyEvaluator } from "./evaluator.js";
import { CondensedJson, loadGraphData } from "./graph.js";
import { DEFAULT_CONFIG, TrainConfig, train } from "./train.js";

function parseArgs(argv: string[]): Map<string, string> {
  const out = new Map<string, string>();
  for (let i = 0; i < argv.length; i++) {
    if (!argv[i].startsWith("--")) throw new Error(`unexpected ${argv[i]}`);
    const key = argv[i].slice(2);
    out.set(key, argv[i + 1]);
    i++;
  }
  return out;
}

async function main(): Promise<number> {
  const args = parseArgs(process.argv.slice(2));
  const graphPath = args.get("graph");
  const budget = Number(args.get("budget"));
  if (!graphPath || !Number.isFinite(budget)) {
    process.stderr.write(
      "usage: cli.js --graph FILE --budget N [--condensed FILE] " +
      "[--epochs N] [--seeds a,b,c] [--interdict CMD]\n");
    return 2;
  }
  const interdictCmd = (args.get("interdict") ?? "interdict").split(" ");

  let condensedText: string;
  if (args.has("condensed")) {
    condensedText = readFileSync(args.get("condensed")!, "utf8");
  } else {
    condensedText = execFileSync(interdictCmd[0],
      [...interdictCmd.slice(1), "condense", graphPath], { encoding: "utf8" });
  }
  const condensed = JSON.parse(condensedText) as CondensedJson;
  const data = loadGraphData(condensed);

  const config: TrainConfig = { ...DEFAULT_CONFIG };
  if (args.has("epochs")) config.epochs = Number(args.get("epochs"));
  if (args.has("batch-size")) config.batchSize = Number(args.get("batch-size"));
  if (args.has("lr")) config.lr = Number(args.get("lr"));
  if (args.has("layers")) config.layers = Number(args.get("layers"));
  if (args.has("hidden")) config.hidden = Number(args.get("hidden"));
  if (args.has("dropout")) config.dropout = Number(args.get("dropout"));
  if (args.has("seeds")) {
    config.seeds = args.get("seeds")!.split(",").map(Number);
  }

  const evaluator = new StrategyEvaluator(
    graphPath, interdictCmd, Number(args.get("f-base") ?? 0.95));
  const started = process.hrtime.bigint();
  try {
    const result = await train(data, evaluator, budget, config);
    const seconds = Number(process.hrtime.bigint() - started) / 1e9;
    process.stdout.write(JSON.stringify({
      strategy: result.strategy,
      rate: result.rate,
      blocked: result.blocked,
      evaluator_calls: result.evaluatorCalls,
      evaluator_requests: result.evaluatorRequests,
      seconds: Math.round(seconds * 1000) / 1000,
    }) + "\n");
    return 0;
  } finally {
    evaluator.close();
  }
}

main().then(
  (code) => process.exit(code),
  (err) => {
    process.stderr.write(`error: ${err instanceof Error ? err.message : err}\n`);
    process.exit(1);
  },
);
