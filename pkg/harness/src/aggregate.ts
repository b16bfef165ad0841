import {
  EXIT_ALL_PASSED,
  EXIT_ALL_SKIPPED,
  EXIT_SOME_ERRORED,
  EXIT_SOME_FAILED,
  HarnessResult,
  HarnessSummary,
  ResultStatus,
} from "./types.js";

/** Fold per-script results into one summary with an overall status. */
export function aggregate(scriptDir: string, results: HarnessResult[]): HarnessSummary {
  const count = (s: ResultStatus) => results.filter((r) => r.status === s).length;
  const passed = count("pass");
  const failed = count("fail");
  const skipped = count("skip");
  const errors = count("error");

  let status: ResultStatus;
  if (errors > 0) {
    status = "error";
  } else if (failed > 0) {
    status = "fail";
  } else if (passed > 0 && skipped === 0) {
    status = "pass";
  } else {
    // nothing failed but nothing fully ran either: an explicit skip,
    // never an implicit pass
    status = "skip";
  }
  return { scriptDir, status, passed, failed, skipped, errors, results };
}

export function exitCodeFor(summary: HarnessSummary): number {
  switch (summary.status) {
    case "pass":
      return EXIT_ALL_PASSED;
    case "fail":
      return EXIT_SOME_FAILED;
    case "error":
      return EXIT_SOME_ERRORED;
    case "skip":
      return EXIT_ALL_SKIPPED;
  }
}
