import { spawn } from "node:child_process";
import * as fs from "node:fs";
import * as path from "node:path";

import { HarnessResult } from "./types.js";

const SCRIPT_PATTERN = /^assert_moment_(\d+)\.py$/;
const SKIP_EXIT_CODE = 75;

/** Assertion scripts in a directory, ordered by moment index. */
export function discoverScripts(scriptDir: string): string[] {
  const entries = fs
    .readdirSync(scriptDir)
    .map((name) => ({ name, match: SCRIPT_PATTERN.exec(name) }))
    .filter((e): e is { name: string; match: RegExpExecArray } => e.match !== null)
    .sort((a, b) => Number(a.match[1]) - Number(b.match[1]));
  return entries.map((e) => path.join(scriptDir, e.name));
}

interface RunOptions {
  /** Python interpreter to run the scripts with (default: python3). */
  python?: string;
  /** Per-script timeout in milliseconds. */
  timeoutMs?: number;
  /** Extra environment variables for the script process. */
  env?: Record<string, string>;
}

interface ProcessOutcome {
  code: number | null;
  stdout: string;
  stderr: string;
  timedOut: boolean;
}

function runProcess(
  command: string,
  args: string[],
  timeoutMs: number,
  env: Record<string, string>
): Promise<ProcessOutcome> {
  return new Promise((resolve) => {
    const child = spawn(command, args, {
      env: { ...process.env, ...env },
      stdio: ["ignore", "pipe", "pipe"],
    });
    let stdout = "";
    let stderr = "";
    let timedOut = false;
    const timer = setTimeout(() => {
      timedOut = true;
      child.kill("SIGKILL");
    }, timeoutMs);
    child.stdout.on("data", (chunk) => (stdout += chunk));
    child.stderr.on("data", (chunk) => (stderr += chunk));
    child.on("error", (err) => {
      clearTimeout(timer);
      resolve({ code: null, stdout, stderr: String(err), timedOut });
    });
    child.on("close", (code) => {
      clearTimeout(timer);
      resolve({ code, stdout, stderr, timedOut });
    });
  });
}

function momentOf(scriptPath: string): number {
  const match = SCRIPT_PATTERN.exec(path.basename(scriptPath));
  return match ? Number(match[1]) : -1;
}

/**
 * Execute one assertion script and interpret its JSON result line.
 *
 * Scripts print a single JSON object on stdout and exit 0 on a passing
 * assertion, 1 on a failing one, and 75 when no sampling backend is
 * importable. Anything else is reported as an error, never as a pass.
 */
export async function runScript(
  scriptPath: string,
  options: RunOptions = {}
): Promise<HarnessResult> {
  const python = options.python ?? process.env.QSOLVER_PYTHON ?? "python3";
  const timeoutMs = options.timeoutMs ?? 300_000;
  const moment = momentOf(scriptPath);
  const script = path.basename(scriptPath);

  const proc = await runProcess(python, [scriptPath], timeoutMs, options.env ?? {});
  if (proc.timedOut) {
    return { moment, status: "error", passed: false, script,
             reason: `timed out after ${timeoutMs} ms` };
  }

  const lines = proc.stdout.trim().split("\n").filter((l) => l.trim().length > 0);
  let payload: Record<string, unknown> | null = null;
  for (let i = lines.length - 1; i >= 0; i--) {
    try {
      payload = JSON.parse(lines[i]) as Record<string, unknown>;
      break;
    } catch {
      continue;
    }
  }

  if (payload === null) {
    return {
      moment, status: "error", passed: false, script,
      reason: `no JSON result on stdout (exit ${proc.code}): ${proc.stderr.slice(0, 400)}`,
    };
  }

  const status = String(payload.status ?? "");
  if (status === "skip" || proc.code === SKIP_EXIT_CODE) {
    return {
      moment: Number(payload.moment ?? moment), status: "skip", passed: false,
      script, reason: String(payload.reason ?? "sampling backend unavailable"),
    };
  }
  if (status !== "pass" && status !== "fail") {
    return { moment, status: "error", passed: false, script,
             reason: `unrecognized result status ${JSON.stringify(status)}` };
  }
  const passed = status === "pass" && proc.code === 0;
  return {
    moment: Number(payload.moment ?? moment),
    status: passed ? "pass" : "fail",
    passed,
    backend: payload.backend as string | undefined,
    shots: payload.shots as number | undefined,
    margin: payload.margin as number | undefined,
    condition: payload.condition as string | undefined,
    frequencies: payload.frequencies as Record<string, number> | undefined,
    counts: payload.counts as Record<string, number> | undefined,
    script,
  };
}

/** Run every assertion script in a directory, in moment order. */
export async function runScripts(
  scriptDir: string,
  options: RunOptions = {}
): Promise<HarnessResult[]> {
  const scripts = discoverScripts(scriptDir);
  if (scripts.length === 0) {
    throw new Error(`no assert_moment_<k>.py scripts found in ${scriptDir}`);
  }
  const results: HarnessResult[] = [];
  for (const script of scripts) {
    results.push(await runScript(script, options));
  }
  return results;
}
