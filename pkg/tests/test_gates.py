import numpy as np
import pytest

from conftest import random_gate
from qsolver.gates import (
    SegmentUnitary,
    build_gate_matrix,
    compose_segment,
    embed_gate,
    split_real_imag,
)
from qsolver.model import GATE_SIGNATURES, GateInstance

SELF_INVERSE = ["x", "y", "z", "h", "cx", "cz", "ccx", "ccz", "swap", "cswap"]


def test_gate_table_is_complete():
    assert len(GATE_SIGNATURES) == 29


def test_pauli_x():
    assert np.array_equal(build_gate_matrix("x"), [[0, 1], [1, 0]])


def test_hadamard():
    s2 = 1 / np.sqrt(2)
    assert np.allclose(build_gate_matrix("h"), [[s2, s2], [s2, -s2]])


def test_rz_zero_angle_is_identity():
    assert np.allclose(build_gate_matrix("rz", [0.0]), np.eye(2))


def test_unknown_name_rejected():
    with pytest.raises(ValueError, match="unknown gate"):
        build_gate_matrix("q")


def test_wrong_param_count_rejected():
    with pytest.raises(ValueError, match="parameter"):
        build_gate_matrix("rx", [])


def test_controlled_gates_condition_on_first_qubit():
    # cx: control is local bit 0, so |c=1,t=0> (index 1) maps to index 3
    cx = build_gate_matrix("cx")
    assert cx[3, 1] == 1 and cx[1, 3] == 1
    assert cx[0, 0] == 1 and cx[2, 2] == 1


def test_iswap_phases():
    m = build_gate_matrix("iswap")
    assert m[2, 1] == 1j and m[1, 2] == 1j
    assert m[0, 0] == 1 and m[3, 3] == 1


@pytest.mark.parametrize("name", sorted(GATE_SIGNATURES))
def test_unitarity_random_params(name):
    rng = np.random.default_rng(hash(name) % 2**32)
    arity, n_params = GATE_SIGNATURES[name]
    dim = 1 << arity
    for _ in range(100):
        params = rng.uniform(0, 2 * np.pi, size=n_params)
        u = build_gate_matrix(name, params)
        assert np.max(np.abs(u.conj().T @ u - np.eye(dim))) < 1e-9


@pytest.mark.parametrize("name", SELF_INVERSE)
def test_self_inverse_gates(name):
    u = build_gate_matrix(name)
    assert np.max(np.abs(u @ u - np.eye(u.shape[0]))) < 1e-9


class TestEmbed:
    def test_single_qubit_no_embedding(self):
        u = embed_gate(GateInstance("x", (), (0,)), 1)
        assert np.array_equal(u.matrix, [[0, 1], [1, 0]])

    def test_x_on_high_qubit(self):
        # flips bit 1: swaps basis indices 0<->2 and 1<->3
        u = embed_gate(GateInstance("x", (), (1,)), 2).matrix
        expect = np.zeros((4, 4))
        expect[2, 0] = expect[0, 2] = expect[3, 1] = expect[1, 3] = 1
        assert np.array_equal(u, expect)

    def test_cx_control_is_first_listed(self):
        # control q0: maps index 1->3, 3->1, fixes 0 and 2
        u = embed_gate(GateInstance("cx", (), (0, 1)), 2).matrix
        for col, row in [(0, 0), (1, 3), (2, 2), (3, 1)]:
            e = np.zeros(4)
            e[col] = 1
            out = u @ e
            assert out[row] == 1 and np.count_nonzero(out) == 1

    def test_out_of_range_qubit(self):
        with pytest.raises(ValueError, match="out of range"):
            embed_gate(GateInstance("x", (), (1,)), 1)


class TestCompose:
    def test_empty_segment_is_identity(self):
        assert np.array_equal(compose_segment([], 2).matrix, np.eye(4))

    def test_h_twice_is_identity(self):
        h = GateInstance("h", (), (0,))
        assert np.allclose(compose_segment([h, h], 1).matrix, np.eye(2), atol=1e-12)

    def test_first_gate_is_rightmost_factor(self):
        t = GateInstance("t", (), (0,))
        h = GateInstance("h", (), (0,))
        expect = build_gate_matrix("h") @ build_gate_matrix("t")
        assert np.allclose(compose_segment([t, h], 1).matrix, expect, atol=1e-12)

    def test_singleton_equals_embed(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            n = int(rng.integers(1, 4))
            g = random_gate(rng, n)
            assert np.array_equal(
                compose_segment([g], n).matrix, embed_gate(g, n).matrix
            )

    def test_concatenation_is_matrix_product(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            n = int(rng.integers(1, 4))
            a = [random_gate(rng, n) for _ in range(int(rng.integers(0, 4)))]
            b = [random_gate(rng, n) for _ in range(int(rng.integers(0, 4)))]
            lhs = compose_segment(a + b, n).matrix
            rhs = compose_segment(b, n).matrix @ compose_segment(a, n).matrix
            assert np.max(np.abs(lhs - rhs)) < 1e-9


class TestSplitRealImag:
    def test_x_is_real(self):
        r, m = split_real_imag(SegmentUnitary(1, build_gate_matrix("x")))
        assert np.array_equal(r, [[0, 1], [1, 0]])
        assert np.array_equal(m, np.zeros((2, 2)))

    def test_y_is_imaginary(self):
        r, m = split_real_imag(SegmentUnitary(1, build_gate_matrix("y")))
        assert np.array_equal(r, np.zeros((2, 2)))
        assert np.array_equal(m, [[0, -1], [1, 0]])

    def test_s_splits_diagonally(self):
        r, m = split_real_imag(SegmentUnitary(1, build_gate_matrix("s")))
        assert np.array_equal(r, np.diag([1, 0]))
        assert np.array_equal(m, np.diag([0, 1]))

    def test_reassembles(self):
        rng = np.random.default_rng(13)
        g = random_gate(rng, 3)
        u = embed_gate(g, 3)
        r, m = split_real_imag(u)
        assert np.array_equal(r + 1j * m, u.matrix)


def test_segment_unitary_rejects_non_unitary():
    with pytest.raises(ValueError, match="not unitary"):
        SegmentUnitary(1, np.array([[1, 0], [1, 1]], dtype=complex))
