/** Result of executing one per-moment assertion script. */
export interface HarnessResult {
  /** Moment index the script checks. */
  moment: number;
  /** pass | fail | skip | error */
  status: ResultStatus;
  /** True only for a clean passing run. */
  passed: boolean;
  /** Which sampler produced the counts (e.g. qiskit-aer, builtin-numpy). */
  backend?: string;
  /** Shot count embedded in the script. */
  shots?: number;
  /** Signed distance to the assertion threshold. */
  margin?: number;
  /** Human-readable form of the checked condition. */
  condition?: string;
  /** Outcome string -> empirical frequency, bit j = measured qubit j. */
  frequencies?: Record<string, number>;
  /** Outcome string -> raw count. */
  counts?: Record<string, number>;
  /** Populated for skip/error results. */
  reason?: string;
  /** Script file the result came from. */
  script: string;
}

export type ResultStatus = "pass" | "fail" | "skip" | "error";

/** Aggregated run over one script directory. */
export interface HarnessSummary {
  scriptDir: string;
  status: ResultStatus;
  passed: number;
  failed: number;
  skipped: number;
  errors: number;
  results: HarnessResult[];
}

/** Exit codes mirroring the primary CLI's taxonomy where it overlaps. */
export const EXIT_ALL_PASSED = 0;
export const EXIT_USAGE = 1;
export const EXIT_SOME_FAILED = 2;
export const EXIT_SOME_ERRORED = 3;
export const EXIT_ALL_SKIPPED = 75;
