import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsolver.model import (
    ConstraintSpec,
    DegenerateStateError,
    Flag,
    GateInstance,
    Moment,
    ProblemFormatError,
    ProblemSpec,
    StateVector,
    bits_to_index,
    index_of_bits,
    index_to_bits,
    marginal_index,
    normalize,
)


class TestIndexOfBits:
    def test_single_qubit_identity(self):
        assert index_of_bits("1", [0], 1) == {1}

    def test_two_of_three_qubits(self):
        # brute enumeration over all 8 indices gives {0, 4}
        assert index_of_bits("00", [0, 1], 3) == {0, 4}

    def test_flagship_observation_set(self):
        s_r = index_of_bits("010", [0, 1, 2], 3) | index_of_bits("101", [0, 1, 2], 3)
        assert s_r == {2, 5}

    def test_length_mismatch_rejected(self):
        with pytest.raises(ProblemFormatError):
            index_of_bits("01", [0], 1)

    def test_bad_alphabet_rejected(self):
        with pytest.raises(ProblemFormatError):
            index_of_bits("02", [0, 1], 2)

    @given(st.integers(1, 4), st.data())
    @settings(max_examples=50)
    def test_partition_of_basis(self, n, data):
        width = data.draw(st.integers(1, n))
        qm = data.draw(
            st.lists(st.integers(0, n - 1), min_size=width, max_size=width, unique=True)
        )
        seen: set[int] = set()
        for m in range(1 << width):
            block = index_of_bits(index_to_bits(m, width), qm, n)
            assert not block & seen
            seen |= block
        assert seen == set(range(1 << n))


class TestNormalize:
    def test_already_normalized(self):
        out = normalize(StateVector(1, np.array([1.0, 0.0])))
        assert np.allclose(out.amps, [1, 0])

    def test_scaling(self):
        out = normalize(StateVector(1, np.array([2.0, 0.0])))
        assert np.allclose(out.amps, [1, 0])

    def test_direction_preserved(self):
        out = normalize(StateVector(1, np.array([1.0, 1.0])))
        assert np.allclose(out.amps, [1 / np.sqrt(2), 1 / np.sqrt(2)], atol=1e-12)

    def test_zero_vector_rejected(self):
        with pytest.raises(DegenerateStateError):
            normalize(StateVector(1, np.zeros(2, dtype=complex)))

    @given(
        st.lists(
            st.tuples(
                st.floats(-10, 10, allow_nan=False), st.floats(-10, 10, allow_nan=False)
            ),
            min_size=2,
            max_size=8,
        ).filter(lambda v: len(v) in (2, 4, 8) and sum(a * a + b * b for a, b in v) > 1e-6)
    )
    @settings(max_examples=100)
    def test_idempotent(self, pairs):
        amps = np.array([a + 1j * b for a, b in pairs])
        once = normalize(StateVector.from_amplitudes(amps))
        twice = normalize(once)
        assert np.allclose(once.amps, twice.amps, atol=1e-12)
        assert abs(once.norm_sq() - 1.0) < 1e-12


class TestStateVector:
    def test_length_must_be_power_of_two(self):
        with pytest.raises(ValueError):
            StateVector(2, np.zeros(3, dtype=complex))

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            StateVector(1, np.array([np.nan, 0.0]))

    def test_zero_state(self):
        s = StateVector.zero(2)
        assert s.is_normalized()
        assert s.probabilities()[0] == 1.0

    def test_amps_are_read_only(self):
        s = StateVector.zero(1)
        with pytest.raises(ValueError):
            s.amps[0] = 0.0


class TestGateInstance:
    def test_unknown_gate(self):
        with pytest.raises(ValueError, match="unknown gate"):
            GateInstance("foo", (), (0,))

    def test_wrong_arity(self):
        with pytest.raises(ValueError, match="acts on"):
            GateInstance("cx", (), (0,))

    def test_wrong_param_count(self):
        with pytest.raises(ValueError, match="parameter"):
            GateInstance("rx", (), (0,))
        with pytest.raises(ValueError, match="parameter"):
            GateInstance("h", (0.1,), (0,))

    def test_duplicate_qubits(self):
        with pytest.raises(ValueError, match="duplicate"):
            GateInstance("cx", (), (1, 1))

    def test_u_takes_three_params(self):
        g = GateInstance("u", (0.1, 0.2, 0.3), (0,))
        assert g.params == (0.1, 0.2, 0.3)


class TestConstraintSpec:
    def test_in_needs_observations(self):
        with pytest.raises(ValueError):
            ConstraintSpec(Flag.IN, (0,))

    def test_observation_width_checked(self):
        with pytest.raises(ValueError):
            ConstraintSpec(Flag.IN, (0, 1), observations=("0",))

    def test_eq_distribution_length(self):
        with pytest.raises(ValueError):
            ConstraintSpec(Flag.EQ, (0, 1), distribution=(0.5, 0.5))

    def test_eq_distribution_bounds(self):
        with pytest.raises(ValueError):
            ConstraintSpec(Flag.EQ, (0,), distribution=(1.5, 0.0))

    def test_eq_sum_beyond_tolerance(self):
        with pytest.raises(ValueError, match="sums"):
            ConstraintSpec(Flag.EQ, (0,), distribution=(1.0, 0.9))

    def test_pair_outcome_range(self):
        with pytest.raises(ValueError):
            ConstraintSpec(Flag.GT, (0,), pairs=((2, 0.5),))

    def test_measured_distinct(self):
        with pytest.raises(ValueError, match="distinct"):
            ConstraintSpec(Flag.IN, (0, 0), observations=("00",))

    def test_valid_pairs(self):
        c = ConstraintSpec(Flag.LT, (0, 1), pairs=((1, 0.3), (3, 0.4)))
        assert c.pairs == ((1, 0.3), (3, 0.4))


class TestProblemSpec:
    def test_needs_a_moment(self):
        with pytest.raises(ValueError, match="at least one moment"):
            ProblemSpec(n=1, moments=())

    def test_gate_qubits_bounded_by_n(self):
        c = ConstraintSpec(Flag.IN, (0,), observations=("0",))
        g = GateInstance("x", (), (1,))
        with pytest.raises(ValueError, match="qubit index"):
            ProblemSpec(n=1, moments=(Moment((g,), c),))

    def test_measured_bounded_by_n(self):
        c = ConstraintSpec(Flag.IN, (2,), observations=("0",))
        with pytest.raises(ValueError, match="measured"):
            ProblemSpec(n=2, moments=(Moment((), c),))


class TestBitHelpers:
    def test_round_trip(self):
        for width in (1, 2, 3):
            for m in range(1 << width):
                assert bits_to_index(index_to_bits(m, width)) == m

    def test_marginal_index_projects(self):
        # full index 6 = q1,q2 set; over qm=[1] the marginal outcome is 1
        assert marginal_index(6, [1]) == 1
        assert marginal_index(6, [0]) == 0
        assert marginal_index(6, [2, 0]) == 1
