"""Shared domain types and basis-index/bitstring conventions.

Bit-order convention used everywhere: qubit 0 is the least-significant bit
of a basis index, and character j of an observation string corresponds to
measured qubit Q_m[j]. So the string '010' over qubits [0,1,2] names the
basis index 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

NORM_TOL = 1e-6

# name -> (arity, parameter count); the 29 supported gates
GATE_SIGNATURES: dict[str, tuple[int, int]] = {
    # single-qubit
    "h": (1, 0), "x": (1, 0), "y": (1, 0), "z": (1, 0),
    "s": (1, 0), "sdg": (1, 0), "t": (1, 0), "tdg": (1, 0),
    "u": (1, 3), "p": (1, 1),
    "rx": (1, 1), "ry": (1, 1), "rz": (1, 1),
    "sx": (1, 0), "sxdg": (1, 0),
    # two-qubit (control first for the c* family)
    "ch": (2, 0), "cs": (2, 0), "cz": (2, 0), "csdg": (2, 0),
    "cp": (2, 1), "crx": (2, 1), "cry": (2, 1), "crz": (2, 1),
    "cx": (2, 0), "swap": (2, 0), "iswap": (2, 0),
    # three-qubit
    "ccx": (3, 0), "ccz": (3, 0), "cswap": (3, 0),
}


class QsolverError(Exception):
    """Base class for all errors raised by this package."""


class ProblemFormatError(QsolverError):
    """Malformed problem text or constraint payload."""


class DegenerateStateError(QsolverError):
    """A zero vector appeared where a quantum state was required."""


class SolverBackendError(QsolverError):
    """External backend missing, crashed, or produced unparseable output."""

    def __init__(self, message: str, output: str = ""):
        super().__init__(message)
        self.output = output


@dataclass(frozen=True)
class StateVector:
    """A pure n-qubit state: 2^n complex amplitudes, treated as immutable."""

    n: int
    amps: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"qubit count must be positive, got {self.n}")
        amps = np.array(self.amps, dtype=complex)
        if amps.shape != (1 << self.n,):
            raise ValueError(
                f"expected {1 << self.n} amplitudes for n={self.n}, got {amps.shape}"
            )
        if not np.all(np.isfinite(amps.real)) or not np.all(np.isfinite(amps.imag)):
            raise ValueError("amplitudes must be finite")
        amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)

    @classmethod
    def zero(cls, n: int) -> "StateVector":
        """The computational basis state |0...0>."""
        amps = np.zeros(1 << n, dtype=complex)
        amps[0] = 1.0
        return cls(n, amps)

    @classmethod
    def from_amplitudes(cls, amps: Sequence[complex]) -> "StateVector":
        amps = np.asarray(amps, dtype=complex)
        n = int(round(math.log2(len(amps))))
        if 1 << n != len(amps):
            raise ValueError(f"amplitude count {len(amps)} is not a power of two")
        return cls(n, amps)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm_sq() - 1.0) < tol


def normalize(state: StateVector) -> StateVector:
    """Rescale to unit norm, preserving direction.

    Raises DegenerateStateError on a (numerically) zero vector.
    """
    norm = math.sqrt(state.norm_sq())
    if norm < 1e-150:
        raise DegenerateStateError("cannot normalize a zero state vector")
    return StateVector(state.n, state.amps / norm)


@dataclass(frozen=True)
class GateInstance:
    """A named gate applied to specific qubits, with angle parameters in radians."""

    name: str
    params: tuple[float, ...] = ()
    qubits: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        sig = GATE_SIGNATURES.get(self.name)
        if sig is None:
            raise ValueError(f"unknown gate {self.name!r}")
        arity, n_params = sig
        if len(self.qubits) != arity:
            raise ValueError(
                f"gate {self.name!r} acts on {arity} qubit(s), got {len(self.qubits)}"
            )
        if len(self.params) != n_params:
            raise ValueError(
                f"gate {self.name!r} takes {n_params} parameter(s), got {len(self.params)}"
            )
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"gate {self.name!r} has duplicate qubit indices {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise ValueError(f"gate {self.name!r} has negative qubit index")
        if not all(math.isfinite(p) for p in self.params):
            raise ValueError(f"gate {self.name!r} has non-finite parameter")


class Flag(Enum):
    """Constraint kind; values are the external spellings accepted in problem files."""

    IN = "in"
    NOT_IN = "not_in"
    EQ = "=="
    GT = ">"
    LT = "<"


# default solve-time tolerance for ==/>/<; tighter than the assertion
# tolerance 0.05 so solver outputs pass verification with margin
DEFAULT_DELTA_EQ = 0.01


@dataclass(frozen=True)
class ConstraintSpec:
    """A measurement-probability requirement over the qubit subset `measured`.

    Payload by flag:
      IN / NOT_IN -> `observations`: outcome strings, each of length len(measured)
      EQ          -> `distribution`: 2^len(measured) target probabilities
      GT / LT     -> `pairs`: (marginal outcome index, probability bound)
    """

    flag: Flag
    measured: tuple[int, ...]
    observations: tuple[str, ...] = ()
    distribution: tuple[float, ...] = ()
    pairs: tuple[tuple[int, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "measured", tuple(int(q) for q in self.measured))
        object.__setattr__(self, "observations", tuple(self.observations))
        object.__setattr__(self, "distribution", tuple(float(d) for d in self.distribution))
        object.__setattr__(
            self, "pairs", tuple((int(x), float(p)) for x, p in self.pairs)
        )
        if not self.measured:
            raise ValueError("constraint must measure at least one qubit")
        if len(set(self.measured)) != len(self.measured):
            raise ValueError(f"measured qubits must be distinct, got {self.measured}")
        if any(q < 0 for q in self.measured):
            raise ValueError("measured qubit indices must be nonnegative")
        width = len(self.measured)
        if self.flag in (Flag.IN, Flag.NOT_IN):
            if not self.observations or self.distribution or self.pairs:
                raise ValueError(f"flag {self.flag.value!r} takes an observation set only")
            for s in self.observations:
                if len(s) != width or any(c not in "01" for c in s):
                    raise ValueError(
                        f"observation {s!r} is not a {width}-bit string over 0/1"
                    )
        elif self.flag is Flag.EQ:
            if not self.distribution or self.observations or self.pairs:
                raise ValueError("flag '==' takes a probability distribution only")
            if len(self.distribution) != 1 << width:
                raise ValueError(
                    f"distribution must list {1 << width} probabilities, "
                    f"got {len(self.distribution)}"
                )
            if any(not 0.0 <= d <= 1.0 for d in self.distribution):
                raise ValueError("distribution entries must lie in [0, 1]")
            if sum(self.distribution) > 1.0 + DEFAULT_DELTA_EQ * (1 << width):
                raise ValueError("distribution sums to more than 1 beyond tolerance")
        else:  # GT / LT
            if not self.pairs or self.observations or self.distribution:
                raise ValueError(
                    f"flag {self.flag.value!r} takes (outcome, probability) pairs only"
                )
            for x, p in self.pairs:
                if not 0 <= x < 1 << width:
                    raise ValueError(f"outcome index {x} out of range for {width} qubit(s)")
                if not 0.0 <= p <= 1.0:
                    raise ValueError(f"probability bound {p} outside [0, 1]")


@dataclass(frozen=True)
class Moment:
    """A gate segment followed by one constraint on the resulting state."""

    segment: tuple[GateInstance, ...]
    constraint: ConstraintSpec

    def __post_init__(self):
        object.__setattr__(self, "segment", tuple(self.segment))


@dataclass(frozen=True)
class ProblemSpec:
    """An n-qubit program: an ordered list of constrained moments."""

    n: int
    moments: tuple[Moment, ...]

    def __post_init__(self):
        object.__setattr__(self, "moments", tuple(self.moments))
        if self.n < 1:
            raise ValueError(f"qubit count must be positive, got {self.n}")
        if not self.moments:
            raise ValueError("a problem needs at least one moment")
        for k, moment in enumerate(self.moments):
            for gate in moment.segment:
                if any(q >= self.n for q in gate.qubits):
                    raise ValueError(
                        f"moment {k}: gate {gate.name!r} uses qubit index "
                        f">= n={self.n}: {gate.qubits}"
                    )
            if any(q >= self.n for q in moment.constraint.measured):
                raise ValueError(
                    f"moment {k}: measured qubit index >= n={self.n}: "
                    f"{moment.constraint.measured}"
                )


class Status(Enum):
    SAT = "sat"
    UNSAT = "unsat"
    TIMEOUT = "timeout"
    NO_FEASIBLE = "nf"


@dataclass(frozen=True)
class AssertionVerdict:
    """Outcome of checking one moment's constraint against sampled counts."""

    moment: int
    passed: bool
    observed: dict[str, float]
    required: str
    margin: float

    def to_dict(self) -> dict:
        return {
            "moment": self.moment,
            "passed": self.passed,
            "observed": dict(self.observed),
            "required": self.required,
            "margin": self.margin,
        }


@dataclass(frozen=True)
class SolveOutcome:
    """Terminal result of a solve: sat / unsat / timeout / no-feasible.

    A SAT outcome carries the backend's interval model, the extracted
    normalized state, and the 1-based attempt that produced it. A
    NO_FEASIBLE outcome from the solve loop carries the candidates that
    failed assertion checking (one per attempt).
    """

    status: Status
    intervals: dict[str, tuple[float, float]] | None = None
    state: StateVector | None = None
    attempt: int = 0
    elapsed: float = 0.0
    failed_states: tuple[StateVector, ...] = ()
    verdicts: tuple[AssertionVerdict, ...] = ()

    @classmethod
    def sat(cls, intervals, state=None, attempt=1, elapsed=0.0, verdicts=()):
        return cls(Status.SAT, intervals=dict(intervals), state=state,
                   attempt=attempt, elapsed=elapsed, verdicts=tuple(verdicts))

    @classmethod
    def unsat(cls, attempt=1, elapsed=0.0):
        return cls(Status.UNSAT, attempt=attempt, elapsed=elapsed)

    @classmethod
    def timeout(cls, elapsed, attempt=1):
        return cls(Status.TIMEOUT, attempt=attempt, elapsed=elapsed)

    @classmethod
    def no_feasible(cls, failed_states, attempt=0, elapsed=0.0, verdicts=()):
        failed = tuple(failed_states)
        return cls(Status.NO_FEASIBLE, attempt=attempt or len(failed),
                   elapsed=elapsed, failed_states=failed, verdicts=tuple(verdicts))


def index_of_bits(bits: str, qm: Sequence[int], n: int) -> set[int]:
    """Full-basis indices whose bit at qubit qm[j] equals bits[j], for all j."""
    if len(bits) != len(qm):
        raise ProblemFormatError(
            f"observation string {bits!r} has length {len(bits)}, "
            f"expected {len(qm)} for measured qubits {list(qm)}"
        )
    if any(c not in "01" for c in bits):
        raise ProblemFormatError(f"observation string {bits!r} must be over 0/1")
    if any(not 0 <= q < n for q in qm):
        raise ProblemFormatError(f"measured qubits {list(qm)} out of range for n={n}")
    want = [(q, int(c)) for q, c in zip(qm, bits)]
    return {x for x in range(1 << n) if all((x >> q) & 1 == b for q, b in want)}


def observed_indices(constraint: ConstraintSpec, n: int) -> set[int]:
    """Union of index_of_bits over the constraint's observation set (S_r)."""
    out: set[int] = set()
    for s in constraint.observations:
        out |= index_of_bits(s, constraint.measured, n)
    return out


def marginal_index(x: int, qm: Sequence[int]) -> int:
    """Project full index x onto the measured qubits: bit j <- qubit qm[j]."""
    m = 0
    for j, q in enumerate(qm):
        m |= ((x >> q) & 1) << j
    return m


def bits_to_index(bits: str) -> int:
    """Marginal outcome index of a string: character j is bit j."""
    return sum(int(c) << j for j, c in enumerate(bits))


def index_to_bits(m: int, width: int) -> str:
    """Inverse of bits_to_index for a fixed string width."""
    return "".join(str((m >> j) & 1) for j in range(width))
