import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsolver.model import (
    GATE_SIGNATURES,
    ConstraintSpec,
    Flag,
    GateInstance,
    Moment,
    ProblemFormatError,
    ProblemSpec,
    SolveOutcome,
    StateVector,
)
from qsolver.problem_io import emit_report, format_problem, parse_problem

FLAGSHIP = """gates: [t(0) ; h(0) ; x(1) ; cx(1,2) ; cx(0,1)]
target_prob: [[0,1,2], [0,1,2], ['010','101']]
flag: "in"
"""


class TestParse:
    def test_flagship_listing(self):
        p = parse_problem(FLAGSHIP, 3)
        assert p.n == 3
        assert len(p.moments) == 1
        seg = p.moments[0].segment
        assert [g.name for g in seg] == ["t", "h", "x", "cx", "cx"]
        assert seg[3].qubits == (1, 2)
        c = p.moments[0].constraint
        assert c.flag is Flag.IN
        assert c.measured == (0, 1, 2)
        assert set(c.observations) == {"010", "101"}

    def test_minimal_eq_block(self):
        text = 'gates: [h(0)]\ntarget_prob: [[0],[0.5,0.5]]\nflag: "=="\n'
        p = parse_problem(text, 1)
        c = p.moments[0].constraint
        assert c.flag is Flag.EQ
        assert c.distribution == (0.5, 0.5)

    def test_two_blocks_two_moments(self):
        text = (
            'gates: [h(0)]\ntarget_prob: [[0],[0],["0"]]\nflag: "in"\n'
            "\n"
            'gates: [x(0)]\ntarget_prob: [[0],[0],["1"]]\nflag: "not_in"\n'
        )
        p = parse_problem(text, 1)
        assert len(p.moments) == 2
        assert p.moments[0].segment[0].name == "h"
        assert p.moments[1].segment[0].name == "x"
        assert p.moments[1].constraint.flag is Flag.NOT_IN

    def test_empty_segment(self):
        text = 'gates: []\ntarget_prob: [[0],[0],["0"]]\nflag: "in"\n'
        assert parse_problem(text, 1).moments[0].segment == ()

    def test_parametric_gate_args_split_by_arity(self):
        text = 'gates: [rx(0.5, 0) ; cp(1.25, 0, 1)]\ntarget_prob: [[0],[0],["0"]]\nflag: "in"\n'
        p = parse_problem(text, 2)
        rx, cp = p.moments[0].segment
        assert rx.params == (0.5,) and rx.qubits == (0,)
        assert cp.params == (1.25,) and cp.qubits == (0, 1)

    def test_gt_pairs(self):
        text = 'gates: [h(0)]\ntarget_prob: [[0,1], [[1, 0.3], [3, 0.4]]]\nflag: ">"\n'
        p = parse_problem(text, 2)
        assert p.moments[0].constraint.pairs == ((1, 0.3), (3, 0.4))

    def test_whitespace_and_quote_styles(self):
        text = "gates: [ h( 0 ) ;x(1)]\ntarget_prob: [[0, 1],[0 ,1],[\"00\" , '11']]\nflag: 'in'\n"
        p = parse_problem(text, 2)
        assert {g.name for g in p.moments[0].segment} == {"h", "x"}
        assert set(p.moments[0].constraint.observations) == {"00", "11"}


class TestParseErrors:
    def check_message(self, text, n, *needles):
        with pytest.raises(ProblemFormatError) as err:
            parse_problem(text, n)
        for needle in needles:
            assert needle in str(err.value), str(err.value)

    def test_unknown_gate(self):
        text = 'gates: [foo(0)]\ntarget_prob: [[0],[0],["0"]]\nflag: "in"\n'
        self.check_message(text, 1, "block 0", "gates", "foo")

    def test_unknown_flag(self):
        text = 'gates: [h(0)]\ntarget_prob: [[0],[0],["0"]]\nflag: "between"\n'
        self.check_message(text, 1, "block 0", "flag", "between")

    def test_shape_mismatch_for_flag(self):
        text = 'gates: [h(0)]\ntarget_prob: [[0],[0.5,0.5]]\nflag: "in"\n'
        self.check_message(text, 1, "block 0", "target_prob")

    def test_qubit_out_of_range(self):
        text = 'gates: [h(2)]\ntarget_prob: [[0],[0],["0"]]\nflag: "in"\n'
        self.check_message(text, 2, "block 0", "gates", "out of range")

    def test_observation_length_mismatch(self):
        text = 'gates: [h(0)]\ntarget_prob: [[0,1],[0,1],["0"]]\nflag: "in"\n'
        self.check_message(text, 2, "block 0", "target_prob")

    def test_differing_index_lists_rejected(self):
        text = 'gates: [h(0)]\ntarget_prob: [[0,1],[1,0],["00"]]\nflag: "in"\n'
        self.check_message(text, 2, "block 0", "identical")

    def test_second_block_error_names_block_one(self):
        text = (
            'gates: [h(0)]\ntarget_prob: [[0],[0],["0"]]\nflag: "in"\n'
            "\n"
            'gates: [bar(0)]\ntarget_prob: [[0],[0],["0"]]\nflag: "in"\n'
        )
        self.check_message(text, 1, "block 1", "bar")

    def test_missing_line(self):
        text = 'gates: [h(0)]\nflag: "in"\n'
        with pytest.raises(ProblemFormatError, match="block 0"):
            parse_problem(text, 1)

    def test_wrong_line_order(self):
        text = 'flag: "in"\ngates: [h(0)]\ntarget_prob: [[0],[0],["0"]]\n'
        with pytest.raises(ProblemFormatError, match="gates"):
            parse_problem(text, 1)

    def test_empty_text(self):
        with pytest.raises(ProblemFormatError, match="empty"):
            parse_problem("   \n  ", 1)

    def test_qubit_index_must_be_integer(self):
        text = 'gates: [h(0.5)]\ntarget_prob: [[0],[0],["0"]]\nflag: "in"\n'
        self.check_message(text, 1, "gates", "integer")


@st.composite
def gate_instances(draw, n):
    names = sorted(g for g, (arity, _) in GATE_SIGNATURES.items() if arity <= n)
    name = draw(st.sampled_from(names))
    arity, n_params = GATE_SIGNATURES[name]
    qubits = tuple(
        draw(st.lists(st.integers(0, n - 1), min_size=arity, max_size=arity, unique=True))
    )
    params = tuple(
        draw(st.lists(
            st.floats(-10, 10, allow_nan=False, allow_infinity=False),
            min_size=n_params, max_size=n_params,
        ))
    )
    return GateInstance(name, params, qubits)


@st.composite
def constraint_specs(draw, n):
    flag = draw(st.sampled_from(list(Flag)))
    width = draw(st.integers(1, n))
    qm = tuple(draw(st.lists(st.integers(0, n - 1), min_size=width, max_size=width, unique=True)))
    if flag in (Flag.IN, Flag.NOT_IN):
        outcomes = draw(
            st.lists(st.integers(0, (1 << width) - 1), min_size=1,
                     max_size=1 << width, unique=True)
        )
        obs = tuple("".join(str((m >> j) & 1) for j in range(width)) for m in outcomes)
        return ConstraintSpec(flag, qm, observations=obs)
    if flag is Flag.EQ:
        raw = draw(st.lists(st.floats(0, 1), min_size=1 << width, max_size=1 << width))
        total = sum(raw)
        if total > 1.0:
            raw = [r / total for r in raw]
        return ConstraintSpec(flag, qm, distribution=tuple(raw))
    xs = draw(st.lists(st.integers(0, (1 << width) - 1), min_size=1, max_size=4, unique=True))
    pairs = tuple((x, draw(st.floats(0, 1))) for x in xs)
    return ConstraintSpec(flag, qm, pairs=pairs)


@st.composite
def problem_specs(draw):
    n = draw(st.integers(1, 3))
    moments = []
    for _ in range(draw(st.integers(1, 3))):
        segment = tuple(
            draw(gate_instances(n)) for _ in range(draw(st.integers(0, 4)))
        )
        moments.append(Moment(segment, draw(constraint_specs(n))))
    return ProblemSpec(n, tuple(moments))


@given(problem_specs())
@settings(max_examples=100, deadline=None)
def test_parse_format_round_trip(problem):
    assert parse_problem(format_problem(problem), problem.n) == problem


class TestEmitReport:
    def test_sat_report_shape(self):
        state = StateVector.zero(2)
        outcome = SolveOutcome.sat({"a_0_0": (1.0, 1.0)}, state=state, attempt=1)
        problem = parse_problem(
            'gates: []\ntarget_prob: [[0,1],[0,1],["00"]]\nflag: "in"\n', 2
        )
        report = json.loads(emit_report(outcome, problem, seed=5))
        assert report["status"] == "sat"
        assert report["attempts"] == 1
        assert report["seed"] == 5
        assert len(report["state"]) == 4
        assert report["state"][0] == [1.0, 0.0]

    def test_unsat_report_has_no_state(self):
        problem = parse_problem(
            'gates: []\ntarget_prob: [[0],[0],["0"]]\nflag: "in"\n', 1
        )
        report = json.loads(emit_report(SolveOutcome.unsat(attempt=1), problem))
        assert report["status"] == "unsat"
        assert report["state"] is None

    def test_nf_report_carries_failed_candidates(self):
        problem = parse_problem(
            'gates: []\ntarget_prob: [[0],[0],["0"]]\nflag: "in"\n', 1
        )
        failed = tuple(StateVector.zero(1) for _ in range(10))
        report = json.loads(
            emit_report(SolveOutcome.no_feasible(failed, attempt=10), problem)
        )
        assert report["status"] == "nf"
        assert report["attempts"] == 10
        assert len(report["failed_states"]) == 10
