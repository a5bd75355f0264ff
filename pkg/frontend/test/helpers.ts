/** Shared test plumbing: fixture graphs and calls into the solver CLI. */

import { execFileSync } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { CondensedJson } from "../src/graph.js";

export const INTERDICT = process.env.INTERDICT_CMD ?? "interdict";

/** The worked example: entries 10-12 funnel through node 3 to da 0. */
export const FIG2 = {
  da: 0,
  nodes: [
    { id: 0, entry: false }, { id: 1, entry: false },
    { id: 2, entry: false }, { id: 3, entry: false },
    { id: 10, entry: true }, { id: 11, entry: true },
    { id: 12, entry: true },
  ],
  edges: [
    { src: 10, dst: 3, blockable: true },
    { src: 11, dst: 3, blockable: true },
    { src: 12, dst: 3, blockable: true },
    { src: 3, dst: 1, blockable: true },
    { src: 3, dst: 2, blockable: true },
    { src: 1, dst: 0, blockable: false },
    { src: 2, dst: 0, blockable: false },
  ],
};

export function tempDir(): string {
  return mkdtempSync(join(tmpdir(), "gcn-test-"));
}

export function writeGraph(graph: unknown, dir: string,
                           name = "graph.json"): string {
  const path = join(dir, name);
  writeFileSync(path, JSON.stringify(graph));
  return path;
}

export function cliJson(args: string[]): Record<string, unknown> {
  const out = execFileSync(INTERDICT, args, { encoding: "utf8" });
  return JSON.parse(out);
}

export function condense(graphPath: string): CondensedJson {
  return cliJson(["condense", graphPath]) as unknown as CondensedJson;
}

export function generate(dir: string, opts: Record<string, string>): string {
  const path = join(dir, `gen-${opts.seed}.json`);
  const args = ["generate", "--out", path];
  for (const [k, v] of Object.entries(opts)) args.push(`--${k}`, v);
  execFileSync(INTERDICT, args);
  return path;
}

export function solveRate(graphPath: string, algo: string,
                          budget: number): number {
  const res = cliJson(["solve", graphPath, "--algo", algo,
                       "--budget", String(budget)]);
  return res.rate as number;
}
