/**
 * Persistent pipe to the solver CLI's `eval-strategy` subcommand.
 *
 * One subprocess per evaluator; requests go out as JSON lines and
 * responses come back in order, so many candidate strategies can be
 * pipelined in a single write. Results are cached (the evaluator is
 * deterministic), and the reported rate is always whatever the solver
 * answered, never local bookkeeping.
 */

import { ChildProcessWithoutNullStreams, spawn } from "node:child_process";

export interface EvalResult {
  valid: boolean;
  rate: number;
  blocked: number[];
}

export type Strategy = Record<string, number>;

export function strategyKey(strategy: Strategy, budget: number): string {
  const parts = Object.keys(strategy).map(Number).sort((a, b) => a - b)
    .map((k) => `${k}:${strategy[String(k)]}`);
  return `${budget}|${parts.join(",")}`;
}

export class StrategyEvaluator {
  private proc: ChildProcessWithoutNullStreams;
  private buffer = "";
  private pending: { resolve: (r: EvalResult) => void;
                     reject: (e: Error) => void; payload: string }[] = [];
  private cache = new Map<string, EvalResult>();
  calls = 0;        // lines actually sent to the subprocess
  requests = 0;     // lookups including cache hits
  private closed = false;
  private spawnError: Error | null = null;

  constructor(graphPath: string, command: string[] = ["interdict"],
              fBase = 0.95) {
    const argv = [...command.slice(1), "eval-strategy", graphPath,
                  "--f-base", String(fBase)];
    this.proc = spawn(command[0], argv, { stdio: "pipe" });
    this.proc.on("error", (err) => {
      this.spawnError = err;
      this.failAll(err);
    });
    this.proc.stderr.on("data", () => { /* solver warnings: ignore */ });
    this.proc.stdout.setEncoding("utf8");
    this.proc.stdout.on("data", (chunk: string) => this.onData(chunk));
    this.proc.on("close", () => {
      if (!this.closed) {
        this.failAll(new Error("eval-strategy subprocess exited early"));
      }
    });
  }

  private failAll(err: Error): void {
    const waiting = this.pending;
    this.pending = [];
    for (const p of waiting) p.reject(err);
  }

  private onData(chunk: string): void {
    this.buffer += chunk;
    let nl: number;
    while ((nl = this.buffer.indexOf("\n")) >= 0) {
      const line = this.buffer.slice(0, nl).trim();
      this.buffer = this.buffer.slice(nl + 1);
      if (!line) continue;
      const waiter = this.pending.shift();
      if (!waiter) continue;
      let parsed: Record<string, unknown>;
      try {
        parsed = JSON.parse(line);
      } catch {
        waiter.reject(new Error(`unparseable evaluator reply: ${line}`));
        continue;
      }
      if ("error" in parsed) {
        waiter.reject(new Error(
          `evaluator rejected request ${waiter.payload}: ${parsed.error}`));
        continue;
      }
      waiter.resolve(parsed as unknown as EvalResult);
    }
  }

  evaluate(strategy: Strategy, budget: number): Promise<EvalResult> {
    this.requests += 1;
    if (this.spawnError) return Promise.reject(this.spawnError);
    const key = strategyKey(strategy, budget);
    const hit = this.cache.get(key);
    if (hit) return Promise.resolve(hit);
    const payload = JSON.stringify({ strategy, budget });
    const promise = new Promise<EvalResult>((resolve, reject) => {
      this.pending.push({
        resolve: (r) => { this.cache.set(key, r); resolve(r); },
        reject,
        payload,
      });
    });
    this.calls += 1;
    this.proc.stdin.write(payload + "\n");
    return promise;
  }

  /** Pipeline a whole candidate list (cache-aware, order preserved). */
  evaluateMany(strategies: Strategy[], budget: number): Promise<EvalResult[]> {
    return Promise.all(strategies.map((s) => this.evaluate(s, budget)));
  }

  close(): void {
    this.closed = true;
    this.proc.stdin.end();
    this.proc.kill();
  }
}
