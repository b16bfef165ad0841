#!/usr/bin/env python3
"""Solve random programs of 5 and 10 gates on 1-3 qubits under each
constraint flag, reporting outcome and attempt count per cell. Constraint
targets are drawn from a reachable state so cells are satisfiable.
"""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

import numpy as np

from gate_sweep import constraint_for
from qsolver.cli import RunConfig, solve_loop
from qsolver.model import (
    GATE_SIGNATURES,
    Flag,
    GateInstance,
    Moment,
    ProblemSpec,
    Status,
)


@dataclass
class SizeSweepConfig:
    gate_counts: tuple[int, ...] = (5, 10)
    qubit_counts: tuple[int, ...] = (1, 2, 3)
    shots: int = 20000
    timeout: float = 120.0
    seed: int = 0


def random_segment(rng: np.random.Generator, n: int, count: int):
    names = [g for g, (arity, _) in GATE_SIGNATURES.items() if arity <= n]
    segment = []
    for _ in range(count):
        name = names[rng.integers(len(names))]
        arity, n_params = GATE_SIGNATURES[name]
        qubits = tuple(int(q) for q in rng.choice(n, size=arity, replace=False))
        params = tuple(rng.uniform(0, 2 * np.pi, size=n_params))
        segment.append(GateInstance(name, params, qubits))
    return tuple(segment)


def run_cell(count: int, flag: Flag, n: int, cfg: SizeSweepConfig, workdir: str) -> str:
    rng = np.random.default_rng((hash((count, flag.value, n)) ^ cfg.seed) % 2**32)
    segment = random_segment(rng, n, count)
    problem = ProblemSpec(n, (Moment(segment, constraint_for(flag, segment, n, rng)),))
    run = RunConfig(
        n=n, problem_path="<generated>", workdir=workdir, shots=cfg.shots,
        timeout=cfg.timeout, seed=cfg.seed, use_fallback=True,
    )
    start = time.monotonic()
    outcome = solve_loop(run, problem=problem)
    elapsed = time.monotonic() - start
    if outcome.status is Status.SAT:
        return f"{elapsed:.2f}s({outcome.attempt})"
    return {Status.UNSAT: "UNSAT", Status.TIMEOUT: "TO",
            Status.NO_FEASIBLE: "NF"}[outcome.status]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--gates", type=int, nargs="+", default=[5, 10])
    parser.add_argument("--qubits", type=int, nargs="+", default=[1, 2, 3])
    parser.add_argument("--shots", type=int, default=20000)
    parser.add_argument("--timeout", type=float, default=120.0)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workdir", default="sweep_out")
    args = parser.parse_args()

    cfg = SizeSweepConfig(
        gate_counts=tuple(args.gates), qubit_counts=tuple(args.qubits),
        shots=args.shots, timeout=args.timeout, seed=args.seed,
    )
    header = ["gates"] + [f"{f.value}/n={n}" for f in Flag for n in cfg.qubit_counts]
    widths = [6] + [11] * (len(header) - 1)
    print("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    for count in cfg.gate_counts:
        row = [str(count)]
        for flag in Flag:
            for n in cfg.qubit_counts:
                row.append(run_cell(count, flag, n, cfg, args.workdir))
        print("  ".join(c.ljust(w) for c, w in zip(row, widths)))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
