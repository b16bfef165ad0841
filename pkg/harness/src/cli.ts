#!/usr/bin/env node
/**
 * qsolver-harness <script_dir> [--out summary.json] [--python python3]
 *
 * Executes every assert_moment_<k>.py in the directory, prints a one-line
 * verdict per moment, and writes an aggregated JSON summary.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { aggregate, exitCodeFor } from "./aggregate.js";
import { runScripts } from "./runner.js";
import { EXIT_USAGE } from "./types.js";

interface CliArgs {
  scriptDir: string;
  out: string;
  python?: string;
}

function parseArgs(argv: string[]): CliArgs | null {
  let scriptDir: string | null = null;
  let out = "summary.json";
  let python: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--out") {
      out = argv[++i];
    } else if (arg === "--python") {
      python = argv[++i];
    } else if (arg === "--help" || arg === "-h") {
      return null;
    } else if (!arg.startsWith("-") && scriptDir === null) {
      scriptDir = arg;
    } else {
      console.error(`unknown argument: ${arg}`);
      return null;
    }
  }
  if (scriptDir === null || out === undefined) {
    return null;
  }
  return { scriptDir, out, python };
}

export async function main(argv: string[]): Promise<number> {
  const args = parseArgs(argv);
  if (args === null) {
    console.error(
      "usage: qsolver-harness <script_dir> [--out summary.json] [--python python3]"
    );
    return EXIT_USAGE;
  }
  if (!fs.existsSync(args.scriptDir) || !fs.statSync(args.scriptDir).isDirectory()) {
    console.error(`script directory not found: ${args.scriptDir}`);
    return EXIT_USAGE;
  }

  let results;
  try {
    results = await runScripts(args.scriptDir, { python: args.python });
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return EXIT_USAGE;
  }

  const summary = aggregate(args.scriptDir, results);
  for (const r of summary.results) {
    const detail =
      r.status === "pass" || r.status === "fail"
        ? `margin=${r.margin?.toFixed(4)} backend=${r.backend}`
        : r.reason;
    console.log(`moment ${r.moment}: ${r.status.toUpperCase()} (${detail})`);
  }
  console.log(
    `overall: ${summary.status.toUpperCase()} ` +
      `(${summary.passed} passed, ${summary.failed} failed, ` +
      `${summary.skipped} skipped, ${summary.errors} errors)`
  );

  fs.mkdirSync(path.dirname(path.resolve(args.out)), { recursive: true });
  fs.writeFileSync(args.out, JSON.stringify(summary, null, 2) + "\n");
  return exitCodeFor(summary);
}

function invokedDirectly(): boolean {
  if (process.argv[1] === undefined) {
    return false;
  }
  try {
    return (
      fs.realpathSync(process.argv[1]) ===
      fs.realpathSync(new URL(import.meta.url).pathname)
    );
  } catch {
    return false;
  }
}

if (invokedDirectly()) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
