"""Base matrices for the 29 supported gates, n-qubit embedding, and
segment consolidation into a single unitary.

Phase conventions follow the de-facto SDK choices: rz(t) = diag(e^{-it/2},
e^{it/2}), p(l) = diag(1, e^{il}), sx = (1/2)[[1+i, 1-i], [1-i, 1+i]],
iswap swaps with a factor of i. Controlled gates condition on the first
listed qubit.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import GATE_SIGNATURES, GateInstance

UNITARY_TOL = 1e-9

_SQRT1_2 = 1.0 / math.sqrt(2.0)

_FIXED: dict[str, np.ndarray] = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "h": np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT1_2,
    "s": np.array([[1, 0], [0, 1j]], dtype=complex),
    "sdg": np.array([[1, 0], [0, -1j]], dtype=complex),
    "t": np.array([[1, 0], [0, cmath.exp(1j * math.pi / 4)]], dtype=complex),
    "tdg": np.array([[1, 0], [0, cmath.exp(-1j * math.pi / 4)]], dtype=complex),
    "sx": np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex) / 2,
    "sxdg": np.array([[1 - 1j, 1 + 1j], [1 + 1j, 1 - 1j]], dtype=complex) / 2,
    "swap": np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
    "iswap": np.array(
        [[1, 0, 0, 0], [0, 0, 1j, 0], [0, 1j, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
}


def _rx(t: float) -> np.ndarray:
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def _ry(t: float) -> np.ndarray:
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(t: float) -> np.ndarray:
    return np.array(
        [[cmath.exp(-1j * t / 2), 0], [0, cmath.exp(1j * t / 2)]], dtype=complex
    )


def _p(lam: float) -> np.ndarray:
    return np.array([[1, 0], [0, cmath.exp(1j * lam)]], dtype=complex)


def _u(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [
            [c, -cmath.exp(1j * lam) * s],
            [cmath.exp(1j * phi) * s, cmath.exp(1j * (phi + lam)) * c],
        ],
        dtype=complex,
    )


_PARAM = {"rx": _rx, "ry": _ry, "rz": _rz, "p": _p, "u": _u}


def _controlled(base: np.ndarray, num_controls: int = 1) -> np.ndarray:
    """Add control qubits as the LOW local bits; base acts on the high bits
    when every control bit is 1."""
    kb = base.shape[0]
    mask = (1 << num_controls) - 1
    out = np.eye(kb << num_controls, dtype=complex)
    block = [(b << num_controls) | mask for b in range(kb)]
    out[np.ix_(block, block)] = base
    return out


def build_gate_matrix(name: str, params: Sequence[float] = ()) -> np.ndarray:
    """Base matrix of a gate over its own qubits.

    Local index convention: bit j of the local index is the j-th listed
    qubit, so for controlled gates the control is the least-significant
    local bit.
    """
    sig = GATE_SIGNATURES.get(name)
    if sig is None:
        raise ValueError(f"unknown gate {name!r}")
    if len(params) != sig[1]:
        raise ValueError(
            f"gate {name!r} takes {sig[1]} parameter(s), got {len(params)}"
        )
    if name in _FIXED:
        return _FIXED[name].copy()
    if name in _PARAM:
        return _PARAM[name](*params)
    if name == "cswap":
        return _controlled(_FIXED["swap"])
    if name.startswith("cc"):
        return _controlled(build_gate_matrix(name[2:]), num_controls=2)
    # remaining: ch, cs, cz, csdg, cp, crx, cry, crz, cx
    return _controlled(build_gate_matrix(name[1:], params))


@dataclass(frozen=True)
class SegmentUnitary:
    """A full 2^n x 2^n unitary; construction checks unitarity."""

    n: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        dim = 1 << self.n
        if m.shape != (dim, dim):
            raise ValueError(f"expected {dim}x{dim} matrix for n={self.n}, got {m.shape}")
        defect = np.max(np.abs(m.conj().T @ m - np.eye(dim)))
        if defect >= UNITARY_TOL:
            raise ValueError(f"matrix is not unitary (defect {defect:.3g})")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, n: int) -> "SegmentUnitary":
        return cls(n, np.eye(1 << n, dtype=complex))


def embed_gate(gate: GateInstance, n: int) -> SegmentUnitary:
    """Lift a gate to the full n-qubit space: base matrix on the gate's
    qubits, identity elsewhere."""
    if any(q >= n for q in gate.qubits):
        raise ValueError(f"gate {gate.name!r} qubits {gate.qubits} out of range for n={n}")
    base = build_gate_matrix(gate.name, gate.params)
    k = len(gate.qubits)
    dim = 1 << n
    gate_mask = 0
    for q in gate.qubits:
        gate_mask |= 1 << q
    # offsets[l] spreads local index l onto the gate's qubit positions
    offsets = [
        sum(((l >> j) & 1) << q for j, q in enumerate(gate.qubits))
        for l in range(1 << k)
    ]
    u = np.zeros((dim, dim), dtype=complex)
    for rest in range(dim):
        if rest & gate_mask:
            continue
        cols = [rest | off for off in offsets]
        u[np.ix_(cols, cols)] = base
    return SegmentUnitary(n, u)


def compose_segment(gates: Sequence[GateInstance], n: int) -> SegmentUnitary:
    """Consolidate a gate segment into one unitary; the first listed gate
    is applied first (rightmost factor). Empty segment gives the identity."""
    u = np.eye(1 << n, dtype=complex)
    for gate in gates:
        u = embed_gate(gate, n).matrix @ u
    return SegmentUnitary(n, u)


def split_real_imag(u: SegmentUnitary) -> tuple[np.ndarray, np.ndarray]:
    """Entrywise split u = R + i*M, for transition equations over real
    amplitude variables: a' = R a - M b, b' = M a + R b."""
    return u.matrix.real.copy(), u.matrix.imag.copy()
