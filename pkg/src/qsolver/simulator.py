"""Reference statevector simulator: gate application, marginal
distributions over measured qubit subsets, and seeded measurement
sampling. This is the oracle that candidate solutions are verified
against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .gates import build_gate_matrix
from .model import GateInstance, ProblemSpec, StateVector, index_to_bits, marginal_index


@dataclass(frozen=True)
class MeasurementCounts:
    """Sampled outcome counts over the measured qubits, plus frequencies."""

    shots: int
    counts: dict[str, int]

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("shots must be positive")
        total = sum(self.counts.values())
        if total != self.shots:
            raise ValueError(f"counts sum to {total}, expected {self.shots}")
        widths = {len(k) for k in self.counts}
        if len(widths) > 1:
            raise ValueError("outcome strings have mixed lengths")

    @property
    def frequencies(self) -> dict[str, float]:
        return {k: v / self.shots for k, v in self.counts.items()}

    def frequency(self, outcome: str) -> float:
        return self.counts.get(outcome, 0) / self.shots


def apply_gate(state: StateVector, gate: GateInstance) -> StateVector:
    """Apply one gate in place-free stride form; agrees with the embedded
    matrix product to machine precision."""
    n = state.n
    if any(q >= n for q in gate.qubits):
        raise ValueError(f"gate {gate.name!r} qubits {gate.qubits} out of range for n={n}")
    base = build_gate_matrix(gate.name, gate.params)
    k = len(gate.qubits)
    gate_mask = 0
    for q in gate.qubits:
        gate_mask |= 1 << q
    offsets = np.array(
        [sum(((l >> j) & 1) << q for j, q in enumerate(gate.qubits)) for l in range(1 << k)]
    )
    rests = np.array([x for x in range(1 << n) if not x & gate_mask])
    # rows: one group of 2^k coupled indices per non-gate bit pattern
    idx = rests[:, None] | offsets[None, :]
    amps = state.amps.copy()
    amps[idx] = amps[idx] @ base.T
    return StateVector(n, amps)


def apply_segment(state: StateVector, gates: Sequence[GateInstance]) -> StateVector:
    for gate in gates:
        state = apply_gate(state, gate)
    return state


def run_to_moment(state0: StateVector, problem: ProblemSpec, k: int) -> StateVector:
    """State after applying segments 0..k (inclusive) to state0."""
    if not 0 <= k < len(problem.moments):
        raise IndexError(f"moment index {k} out of range")
    state = state0
    for moment in problem.moments[: k + 1]:
        state = apply_segment(state, moment.segment)
    return state


def marginal_probs(state: StateVector, qm: Sequence[int]) -> np.ndarray:
    """Outcome probabilities over the measured qubits qm, entry m being the
    total probability of full indices that project onto m."""
    qm = [int(q) for q in qm]
    if len(set(qm)) != len(qm) or any(not 0 <= q < state.n for q in qm):
        raise ValueError(f"measured qubits {qm} invalid for n={state.n}")
    probs = state.probabilities()
    out = np.zeros(1 << len(qm))
    for x in range(1 << state.n):
        out[marginal_index(x, qm)] += probs[x]
    return out


def sample(state: StateVector, qm: Sequence[int], shots: int, seed: int) -> MeasurementCounts:
    """Draw `shots` measurement outcomes over qm by inverse-CDF sampling of
    the marginal distribution; deterministic for a fixed seed."""
    if shots < 1:
        raise ValueError("shots must be positive")
    probs = marginal_probs(state, qm)
    total = probs.sum()
    if not np.isclose(total, 1.0, atol=1e-6):
        raise ValueError(f"marginal probabilities sum to {total}, state not normalized")
    rng = np.random.default_rng(seed)
    cdf = np.cumsum(probs / total)
    draws = np.searchsorted(cdf, rng.random(shots), side="right")
    draws = np.minimum(draws, len(probs) - 1)
    width = len(qm)
    counts: dict[str, int] = {}
    for m, c in zip(*np.unique(draws, return_counts=True)):
        counts[index_to_bits(int(m), width)] = int(c)
    return MeasurementCounts(shots=shots, counts=counts)
