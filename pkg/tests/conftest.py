"""Shared generators and helpers for the test suite."""

from __future__ import annotations

import numpy as np

from qsolver.encoder import avar, bvar
from qsolver.model import (
    GATE_SIGNATURES,
    ConstraintSpec,
    Flag,
    GateInstance,
    Moment,
    ProblemSpec,
    StateVector,
    index_to_bits,
)
from qsolver.simulator import apply_segment

GATE_NAMES = sorted(GATE_SIGNATURES)


def random_gate(rng: np.random.Generator, n: int) -> GateInstance:
    names = [g for g, (arity, _) in GATE_SIGNATURES.items() if arity <= n]
    name = names[rng.integers(len(names))]
    arity, n_params = GATE_SIGNATURES[name]
    qubits = tuple(int(q) for q in rng.choice(n, size=arity, replace=False))
    params = tuple(float(p) for p in rng.uniform(0, 2 * np.pi, size=n_params))
    return GateInstance(name, params, qubits)


def random_segment(rng: np.random.Generator, n: int, max_gates: int = 10):
    return tuple(random_gate(rng, n) for _ in range(int(rng.integers(1, max_gates + 1))))


def random_membership_constraint(rng: np.random.Generator, n: int) -> ConstraintSpec:
    """A random in/not_in constraint with a proper, nonempty observation set."""
    width = int(rng.integers(1, n + 1))
    qm = tuple(int(q) for q in rng.choice(n, size=width, replace=False))
    flag = Flag.IN if rng.random() < 0.5 else Flag.NOT_IN
    # strict subset of outcomes so neither side of the membership is empty
    count = int(rng.integers(1, 1 << width)) if width > 0 else 1
    outcomes = rng.choice(1 << width, size=count, replace=False)
    observations = tuple(index_to_bits(int(m), width) for m in outcomes)
    return ConstraintSpec(flag, qm, observations=observations)


def random_membership_problem(
    rng: np.random.Generator, max_qubits: int = 3, max_gates: int = 10
) -> ProblemSpec:
    """Single-moment problem in the small-circuit regime with an in/not_in
    constraint."""
    n = int(rng.integers(1, max_qubits + 1))
    segment = random_segment(rng, n, max_gates)
    constraint = random_membership_constraint(rng, n)
    return ProblemSpec(n=n, moments=(Moment(segment, constraint),))


def random_state(rng: np.random.Generator, n: int) -> StateVector:
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(n, amps / np.linalg.norm(amps))


def moment_assignment(problem: ProblemSpec, state0: StateVector) -> dict[str, float]:
    """Variable values at every moment implied by forward simulation."""
    env: dict[str, float] = {}
    state = state0
    for i, amp in enumerate(state.amps):
        env[avar(i, 0)] = float(amp.real)
        env[bvar(i, 0)] = float(amp.imag)
    for t, moment in enumerate(problem.moments, start=1):
        state = apply_segment(state, moment.segment)
        for i, amp in enumerate(state.amps):
            env[avar(i, t)] = float(amp.real)
            env[bvar(i, t)] = float(amp.imag)
    return env
