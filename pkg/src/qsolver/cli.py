"""End-to-end driver: encode, solve, extract, verify, exclude-and-retry.

The loop encodes the problem with all accumulated exclusion clauses,
solves (external backend or built-in fallback), extracts a candidate
state from the interval model, and checks every moment's assertion by
sampling. A failing candidate is excluded and the loop retries; after
max_attempts failed verifications the outcome is NO_FEASIBLE. The time
budget is cumulative across attempts.

Exit codes: 0 sat, 2 unsat, 3 timeout, 4 no-feasible, 1 usage or
internal error.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .encoder import encode_problem
from .model import (
    DegenerateStateError,
    ProblemFormatError,
    ProblemSpec,
    SolveOutcome,
    SolverBackendError,
    Status,
)
from .problem_io import emit_report, parse_problem
from .solver import (
    SOLVER_PATH_ENV,
    extract_state,
    fallback_solve,
    run_external,
)
from .verifier import verify_solution, write_assertion_scripts

EXIT_CODES = {
    Status.SAT: 0,
    Status.UNSAT: 2,
    Status.TIMEOUT: 3,
    Status.NO_FEASIBLE: 4,
}


@dataclass
class RunConfig:
    """Everything one solve run needs; defaults match the shipped tooling."""

    n: int
    problem_path: str
    solver_path: str | None = None
    precision: float = 0.001
    delta_eq: float = 0.01
    delta_i: float = 0.05
    shots: int = 100000
    eps: float = 0.0005
    max_attempts: int = 10
    timeout: float = 1000.0
    seed: int = 0
    use_fallback: bool = True
    workdir: str = "qsolver_out"
    fallback_budget: int = 24

    def __post_init__(self):
        for name in ("precision", "delta_eq", "delta_i", "eps", "timeout"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be at least 1")
        if self.shots < 1:
            raise ValueError("shots must be at least 1")


def solve_loop(
    config: RunConfig,
    problem: ProblemSpec | None = None,
    verify_fn=None,
) -> SolveOutcome:
    """Run the attempt loop to a terminal outcome.

    `verify_fn(state, problem, shots, delta_i, seed) -> verdicts` can be
    injected; the default samples each moment through the simulator.
    """
    if problem is None:
        problem = parse_problem(Path(config.problem_path).read_text(), config.n)
    verify = verify_fn or verify_solution

    workdir = Path(config.workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    start = time.monotonic()
    deadline = start + config.timeout
    exclusions: list[dict] = []
    failed_states = []
    last_verdicts = ()

    for attempt in range(1, config.max_attempts + 1):
        elapsed = time.monotonic() - start
        if elapsed > config.timeout:
            return SolveOutcome.timeout(elapsed=elapsed, attempt=attempt)

        doc = encode_problem(problem, exclusions, config.eps, config.delta_eq)
        smt_path = workdir / f"attempt_{attempt}.smt2"
        smt_path.write_text(doc.render())

        if config.use_fallback:
            outcome = fallback_solve(
                problem, exclusions, config.eps, config.delta_eq,
                budget=config.fallback_budget,
                seed=config.seed + 7919 * (attempt - 1),
                deadline=deadline,
            )
        else:
            outcome = run_external(
                doc, config.precision,
                timeout=config.timeout - elapsed,
                solver_path=config.solver_path,
                workdir=workdir, filename=smt_path.name,
            )

        total_elapsed = time.monotonic() - start
        if outcome.status is Status.UNSAT:
            return SolveOutcome.unsat(attempt=attempt, elapsed=total_elapsed)
        if outcome.status is Status.TIMEOUT:
            return SolveOutcome.timeout(elapsed=total_elapsed, attempt=attempt)
        if outcome.status is Status.NO_FEASIBLE:
            return dataclasses.replace(
                outcome, attempt=attempt, elapsed=total_elapsed
            )

        try:
            state = extract_state(outcome.intervals, problem.n)
        except DegenerateStateError:
            # counts as a failed verification: exclude the model and retry
            exclusions.append(dict(outcome.intervals))
            continue

        if time.monotonic() > deadline:
            return SolveOutcome.timeout(
                elapsed=time.monotonic() - start, attempt=attempt
            )
        verdicts = verify(
            state, problem, config.shots, config.delta_i,
            config.seed + 7919 * (attempt - 1),
        )
        if all(v.passed for v in verdicts):
            return SolveOutcome.sat(
                outcome.intervals, state=state, attempt=attempt,
                elapsed=time.monotonic() - start, verdicts=verdicts,
            )
        exclusions.append(dict(outcome.intervals))
        failed_states.append(state)
        last_verdicts = verdicts

    return SolveOutcome.no_feasible(
        failed_states, attempt=config.max_attempts,
        elapsed=time.monotonic() - start, verdicts=last_verdicts,
    )


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qsolver",
        description="Find input quantum states satisfying measurement-"
        "probability constraints imposed at moments of a circuit.",
    )
    p.add_argument("--qubits", "-n", type=int, required=True, help="number of qubits")
    p.add_argument("--problem", required=True, help="problem text file")
    p.add_argument("--solver-path", default=None,
                   help=f"delta-SAT backend executable (or ${SOLVER_PATH_ENV})")
    p.add_argument("--precision", type=float, default=0.001,
                   help="backend precision (default 0.001)")
    p.add_argument("--delta-eq", type=float, default=0.01,
                   help="solve-time tolerance for ==/>/< (default 0.01)")
    p.add_argument("--delta-i", type=float, default=0.05,
                   help="assertion tolerance (default 0.05)")
    p.add_argument("--shots", type=int, default=100000,
                   help="measurement samples per assertion (default 100000)")
    p.add_argument("--eps", type=float, default=0.0005,
                   help="exclusion interval widening (default 0.0005)")
    p.add_argument("--max-attempts", type=int, default=10,
                   help="failed candidates before giving up (default 10)")
    p.add_argument("--timeout", type=float, default=1000.0,
                   help="cumulative time budget in seconds (default 1000)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--fallback", action="store_true",
                   help="force the built-in solver even if a backend is configured")
    p.add_argument("--fallback-budget", type=int, default=24,
                   help="restart budget per attempt for the built-in solver")
    p.add_argument("--workdir", default="qsolver_out",
                   help="directory for SMT files, reports, scripts")
    p.add_argument("--report", default=None,
                   help="report path (default <workdir>/report.json)")
    p.add_argument("--emit-smt-only", action="store_true",
                   help="write attempt_1.smt2 and exit without solving")
    p.add_argument("--emit-scripts", action="store_true",
                   help="write per-moment assertion scripts for a sat outcome")
    return p


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 1

    backend_configured = bool(args.solver_path or os.environ.get(SOLVER_PATH_ENV))
    use_fallback = args.fallback or not backend_configured

    try:
        config = RunConfig(
            n=args.qubits, problem_path=args.problem,
            solver_path=args.solver_path, precision=args.precision,
            delta_eq=args.delta_eq, delta_i=args.delta_i, shots=args.shots,
            eps=args.eps, max_attempts=args.max_attempts,
            timeout=args.timeout, seed=args.seed, use_fallback=use_fallback,
            workdir=args.workdir, fallback_budget=args.fallback_budget,
        )
        problem = parse_problem(Path(config.problem_path).read_text(), config.n)
    except (ProblemFormatError, ValueError, OSError) as e:
        print(f"qsolver: error: {e}", file=sys.stderr)
        return 1

    workdir = Path(config.workdir)
    workdir.mkdir(parents=True, exist_ok=True)

    if args.emit_smt_only:
        doc = encode_problem(problem, (), config.eps, config.delta_eq)
        path = workdir / "attempt_1.smt2"
        path.write_text(doc.render())
        print(path)
        return 0

    if use_fallback and not args.fallback and not backend_configured:
        print("qsolver: no backend configured, using built-in fallback solver",
              file=sys.stderr)

    try:
        outcome = solve_loop(config, problem=problem)
    except (SolverBackendError, ProblemFormatError) as e:
        print(f"qsolver: error: {e}", file=sys.stderr)
        return 1

    report_path = Path(args.report) if args.report else workdir / "report.json"
    report_path.parent.mkdir(parents=True, exist_ok=True)
    report_path.write_text(emit_report(outcome, problem, seed=config.seed) + "\n")

    if outcome.status is Status.SAT and args.emit_scripts:
        script_dir = workdir / "scripts"
        write_assertion_scripts(
            problem, outcome.state, script_dir, config.shots, config.delta_i
        )
        print(f"assertion scripts: {script_dir}")

    print(
        f"status={outcome.status.value} attempts={outcome.attempt} "
        f"elapsed={outcome.elapsed:.3f}s report={report_path}"
    )
    return EXIT_CODES[outcome.status]


if __name__ == "__main__":
    sys.exit(main())
