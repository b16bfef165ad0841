"""Solving: external delta-SAT backend driver plus a built-in numeric
fallback so the whole pipeline runs with no external binaries.

The external driver shells out to a dReal-style solver, enforces the wall
clock itself, and parses interval models from stdout. The fallback solves
single-moment in/not_in constraints analytically (preimage of the allowed
output subspace) and everything else by penalty minimization with random
restarts and coordinate descent.
"""

from __future__ import annotations

import os
import re
import subprocess
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .encoder import SmtDocument, avar, bvar
from .gates import compose_segment
from .model import (
    DegenerateStateError,
    Flag,
    ProblemSpec,
    SolveOutcome,
    SolverBackendError,
    StateVector,
    marginal_index,
    normalize,
    observed_indices,
)

SOLVER_PATH_ENV = "QSOLVER_SOLVER_PATH"

IntervalModel = dict[str, tuple[float, float]]

# penalty below this counts as a solution; above the floor after a full
# budget of restarts the problem is reported unsat
PENALTY_SAT = 1e-10
PENALTY_UNSAT_FLOOR = 1e-3


@dataclass(frozen=True)
class BackendAdapter:
    """Command shape and output grammar for one delta-SAT backend."""

    name: str
    arg_template: tuple[str, ...]
    unsat_pattern: str
    sat_pattern: str
    range_pattern: str

    def command(self, executable: str, path: str, precision: float) -> list[str]:
        subst = {"path": path, "precision": str(precision)}
        return [executable] + [arg.format(**subst) for arg in self.arg_template]

    def parse(self, text: str) -> tuple[str, IntervalModel | None]:
        if re.search(self.unsat_pattern, text):
            return "unsat", None
        if re.search(self.sat_pattern, text):
            intervals: IntervalModel = {}
            for name, lo, hi in re.findall(self.range_pattern, text):
                intervals[name] = (float(lo), float(hi if hi else lo))
            return "sat", intervals
        return "unknown", None


DREAL_ADAPTER = BackendAdapter(
    name="dreal",
    arg_template=("--precision", "{precision}", "--model", "{path}"),
    unsat_pattern=r"\bunsat\b",
    sat_pattern=r"\bdelta-sat\b|\bsat\b",
    range_pattern=r"(?m)^\s*([A-Za-z]\w*)\s*:\s*\[\s*([-+0-9.eE]+)(?:\s*,\s*([-+0-9.eE]+))?\s*\]",
)


def resolve_solver_path(solver_path: str | None = None) -> str:
    path = solver_path or os.environ.get(SOLVER_PATH_ENV)
    if not path:
        raise SolverBackendError(
            f"no SMT backend configured; set {SOLVER_PATH_ENV} or pass --solver-path"
        )
    if not Path(path).exists():
        raise SolverBackendError(f"SMT backend executable not found: {path}")
    return path


def run_external(
    doc: SmtDocument,
    precision: float,
    timeout: float,
    solver_path: str | None = None,
    adapter: BackendAdapter = DREAL_ADAPTER,
    workdir: str | Path | None = None,
    filename: str = "problem.smt2",
) -> SolveOutcome:
    """Write the document, invoke the backend, parse its verdict.

    The wall clock is enforced here by killing the child process; the
    backend's own timeout options are not trusted.
    """
    executable = resolve_solver_path(solver_path)
    if workdir is None:
        workdir = tempfile.mkdtemp(prefix="qsolver_")
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    path = workdir / filename
    path.write_text(doc.render())

    cmd = adapter.command(executable, str(path), precision)
    start = time.monotonic()
    try:
        proc = subprocess.run(
            cmd, capture_output=True, text=True, timeout=max(timeout, 1e-3)
        )
    except subprocess.TimeoutExpired:
        return SolveOutcome.timeout(elapsed=time.monotonic() - start)
    except OSError as e:
        raise SolverBackendError(f"failed to invoke backend {cmd[0]!r}: {e}")
    elapsed = time.monotonic() - start

    verdict, intervals = adapter.parse(proc.stdout)
    if verdict == "unsat":
        return SolveOutcome.unsat(elapsed=elapsed)
    if verdict == "sat":
        return SolveOutcome.sat(intervals or {}, elapsed=elapsed)
    raise SolverBackendError(
        f"unrecognized backend output (exit code {proc.returncode})",
        output=proc.stdout + proc.stderr,
    )


def extract_state(model: Mapping[str, tuple[float, float]], n: int) -> StateVector:
    """Midpoint of each t=0 interval as (re, im), then normalize."""
    amps = np.zeros(1 << n, dtype=complex)
    for i in range(1 << n):
        try:
            alo, ahi = model[avar(i, 0)]
            blo, bhi = model[bvar(i, 0)]
        except KeyError as e:
            raise SolverBackendError(f"model is missing t=0 variable {e}")
        amps[i] = (alo + ahi) / 2 + 1j * (blo + bhi) / 2
    raw = StateVector(n, amps)
    if raw.norm_sq() < 1e-18:
        raise DegenerateStateError("interval midpoints give a zero state")
    return normalize(raw)


def point_intervals(state: StateVector) -> IntervalModel:
    """Degenerate interval model for an exactly known state."""
    model: IntervalModel = {}
    for i, amp in enumerate(state.amps):
        model[avar(i, 0)] = (float(amp.real), float(amp.real))
        model[bvar(i, 0)] = (float(amp.imag), float(amp.imag))
    return model


def _escapes_exclusions(
    state: StateVector,
    exclusions: Sequence[Mapping[str, tuple[float, float]]],
    eps: float,
) -> bool:
    """True when the state leaves every prior model's widened box in at
    least one t=0 coordinate."""
    values = point_intervals(state)
    for model in exclusions:
        escaped = False
        for name, (lo, hi) in model.items():
            if not name.endswith("_0") or name not in values:
                continue
            v = values[name][0]
            if v < lo - eps or v > hi + eps:
                escaped = True
                break
        if not escaped:
            return False
    return True


def _allowed_outputs(problem: ProblemSpec, k: int) -> list[int]:
    """Full basis indices allowed nonzero probability by moment k's
    in/not_in constraint."""
    c = problem.moments[k].constraint
    s_r = observed_indices(c, problem.n)
    if c.flag is Flag.IN:
        return sorted(s_r)
    return sorted(set(range(1 << problem.n)) - s_r)


def _analytic_membership_solve(
    problem: ProblemSpec,
    exclusions: Sequence[Mapping[str, tuple[float, float]]],
    eps: float,
    budget: int,
    rng: np.random.Generator,
    deadline: float | None,
    start: float,
) -> SolveOutcome:
    """Single-moment in/not_in: pull a unit vector of the allowed output
    subspace back through the segment's inverse."""
    n = problem.n
    allowed = _allowed_outputs(problem, 0)
    if not allowed:
        return SolveOutcome.unsat(elapsed=time.monotonic() - start)
    u = compose_segment(problem.moments[0].segment, n).matrix
    tried: list[StateVector] = []
    for attempt in range(max(budget, 1)):
        if deadline is not None and time.monotonic() > deadline:
            return SolveOutcome.timeout(elapsed=time.monotonic() - start)
        target = np.zeros(1 << n, dtype=complex)
        if attempt == 0:
            target[allowed] = 1.0 / np.sqrt(len(allowed))
        else:
            coeffs = rng.normal(size=len(allowed)) + 1j * rng.normal(size=len(allowed))
            target[allowed] = coeffs / np.linalg.norm(coeffs)
        state = normalize(StateVector(n, u.conj().T @ target))
        if _escapes_exclusions(state, exclusions, eps):
            return SolveOutcome.sat(
                point_intervals(state), state=state,
                elapsed=time.monotonic() - start,
            )
        tried.append(state)
    return SolveOutcome.no_feasible(tried, elapsed=time.monotonic() - start)


def _constraint_penalty(c, probs: np.ndarray, n: int, delta_eq: float) -> float:
    if c.flag in (Flag.IN, Flag.NOT_IN):
        s_r = observed_indices(c, n)
        banned = (
            [x for x in range(1 << n) if x not in s_r]
            if c.flag is Flag.IN
            else sorted(s_r)
        )
        return float(sum(probs[x] ** 2 for x in banned))
    marg = np.zeros(1 << len(c.measured))
    for x in range(1 << n):
        marg[marginal_index(x, c.measured)] += probs[x]
    total = 0.0
    if c.flag is Flag.EQ:
        for m, dx in enumerate(c.distribution):
            total += max(0.0, abs(marg[m] - dx) - delta_eq) ** 2
    elif c.flag is Flag.GT:
        for xs, ps in c.pairs:
            total += max(0.0, (ps - delta_eq) - marg[xs]) ** 2
    else:
        for xs, ps in c.pairs:
            total += max(0.0, marg[xs] - (ps + delta_eq)) ** 2
    return total


def _exclusion_penalty(
    x: np.ndarray,
    dim: int,
    exclusions: Sequence[Mapping[str, tuple[float, float]]],
    eps: float,
) -> float:
    total = 0.0
    for model in exclusions:
        worst = None
        escaped = False
        for name, (lo, hi) in model.items():
            kind, i, t = name.split("_")
            if t != "0":
                continue
            v = x[int(i)] if kind == "a" else x[dim + int(i)]
            inside = min(v - (lo - eps), (hi + eps) - v)
            if inside <= 0:
                escaped = True
                break
            worst = inside if worst is None else min(worst, inside)
        if not escaped and worst is not None:
            total += worst**2
    return total


def _heuristic_targets(problem: ProblemSpec, n: int, delta_eq: float) -> list[np.ndarray]:
    """Plausible output statevectors for each moment's constraint, used as
    warm-start preimages for the penalty search."""
    dim = 1 << n
    targets = []
    for k, moment in enumerate(problem.moments):
        c = moment.constraint
        out = np.zeros(dim, dtype=complex)
        if c.flag in (Flag.IN, Flag.NOT_IN):
            allowed = _allowed_outputs(problem, k)
            if not allowed:
                continue
            out[allowed] = 1.0 / np.sqrt(len(allowed))
        else:
            groups: dict[int, int] = {}
            for x in range(dim):
                groups.setdefault(marginal_index(x, c.measured), x)
            weights = np.zeros(1 << len(c.measured))
            if c.flag is Flag.EQ:
                weights[: len(c.distribution)] = c.distribution
            elif c.flag is Flag.GT:
                for xs, ps in c.pairs:
                    weights[xs] = min(1.0, ps + delta_eq)
            else:
                unconstrained = [
                    m for m in range(len(weights)) if m not in {xs for xs, _ in c.pairs}
                ]
                for m in unconstrained:
                    weights[m] = 1.0 / len(unconstrained)
            total = weights.sum()
            if total > 1.0:
                weights /= total
            elif total < 1.0:
                slack = 1.0 - total
                free = [
                    m for m in range(len(weights))
                    if c.flag is not Flag.LT or m not in {xs for xs, _ in c.pairs}
                ] or list(range(len(weights)))
                for m in free:
                    weights[m] += slack / len(free)
            for m, w in enumerate(weights):
                if w > 0 and m in groups:
                    out[groups[m]] = np.sqrt(w)
        norm = np.linalg.norm(out)
        if norm > 1e-12:
            targets.append((k, out / norm))
    # pull each target back through the cumulative unitary up to its moment
    starts = []
    cumulative = np.eye(dim, dtype=complex)
    cum_by_moment = []
    for moment in problem.moments:
        cumulative = compose_segment(moment.segment, n).matrix @ cumulative
        cum_by_moment.append(cumulative)
    for k, out in targets:
        starts.append(cum_by_moment[k].conj().T @ out)
    return starts


def _coordinate_descent(f, x: np.ndarray, step: float, target: float,
                        max_sweeps: int, deadline: float | None):
    best = f(x)
    for _ in range(max_sweeps):
        if best <= target or step < 1e-9:
            break
        if deadline is not None and time.monotonic() > deadline:
            break
        improved = False
        for i in range(len(x)):
            for sign in (1.0, -1.0):
                x[i] += sign * step
                val = f(x)
                if val < best - 1e-18:
                    best = val
                    improved = True
                    while True:  # ride the improving direction
                        x[i] += sign * step
                        val = f(x)
                        if val < best - 1e-18:
                            best = val
                        else:
                            x[i] -= sign * step
                            break
                    break
                x[i] -= sign * step
        if not improved:
            step *= 0.5
    return x, best


def fallback_solve(
    problem: ProblemSpec,
    exclusions: Sequence[Mapping[str, tuple[float, float]]] = (),
    eps: float = 0.0005,
    delta_eq: float = 0.01,
    budget: int = 24,
    seed: int = 0,
    deadline: float | None = None,
) -> SolveOutcome:
    """Built-in solver over the same constraint semantics as the SMT
    encoding. Returns Sat with point intervals, Unsat when the best
    penalty over the whole budget stays above a clear floor, NoFeasible
    when the search exhausts its budget inconclusively, or Timeout when
    the deadline passes.
    """
    start = time.monotonic()
    n = problem.n
    dim = 1 << n
    rng = np.random.default_rng(seed)

    for k, moment in enumerate(problem.moments):
        if moment.constraint.flag in (Flag.IN, Flag.NOT_IN):
            if not _allowed_outputs(problem, k):
                return SolveOutcome.unsat(elapsed=time.monotonic() - start)

    flags = [m.constraint.flag for m in problem.moments]
    if len(problem.moments) == 1 and flags[0] in (Flag.IN, Flag.NOT_IN):
        return _analytic_membership_solve(
            problem, exclusions, eps, budget, rng, deadline, start
        )

    unitaries = [compose_segment(m.segment, n).matrix for m in problem.moments]

    def penalty(x: np.ndarray) -> float:
        amps = x[:dim] + 1j * x[dim:]
        total = (float(np.sum(np.abs(amps) ** 2)) - 1.0) ** 2
        state = amps
        for moment, u in zip(problem.moments, unitaries):
            state = u @ state
            probs = np.abs(state) ** 2
            total += _constraint_penalty(moment.constraint, probs, n, delta_eq)
        total += _exclusion_penalty(x, dim, exclusions, eps)
        return total

    warm = _heuristic_targets(problem, n, delta_eq)
    best_states: list[StateVector] = []
    best_penalty = float("inf")
    for restart in range(max(budget, 1)):
        if deadline is not None and time.monotonic() > deadline:
            return SolveOutcome.timeout(elapsed=time.monotonic() - start)
        if restart < len(warm):
            amps0 = warm[restart]
            if restart > 0 or exclusions:
                amps0 = amps0 + 0.01 * (
                    rng.normal(size=dim) + 1j * rng.normal(size=dim)
                )
        else:
            amps0 = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        amps0 = amps0 / np.linalg.norm(amps0)
        x = np.concatenate([amps0.real, amps0.imag])
        x, value = _coordinate_descent(
            penalty, x, step=0.25, target=PENALTY_SAT,
            max_sweeps=400, deadline=deadline,
        )
        amps = x[:dim] + 1j * x[dim:]
        if np.linalg.norm(amps) < 1e-9:
            continue
        state = normalize(StateVector(n, amps))
        if value < PENALTY_SAT and _escapes_exclusions(state, exclusions, eps):
            return SolveOutcome.sat(
                point_intervals(state), state=state,
                elapsed=time.monotonic() - start,
            )
        if value < best_penalty:
            best_penalty = value
        best_states.append(state)

    elapsed = time.monotonic() - start
    if best_penalty > PENALTY_UNSAT_FLOOR:
        return SolveOutcome.unsat(elapsed=elapsed)
    return SolveOutcome.no_feasible(best_states, elapsed=elapsed)
