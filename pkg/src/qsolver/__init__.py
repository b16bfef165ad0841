"""Constraint solving for quantum programs: find input states whose
measurement statistics satisfy per-moment requirements, via a QF_NRA
encoding solved by a delta-SAT backend or a built-in fallback, with
sampling-based assertion checking of every candidate."""

from .model import (
    AssertionVerdict,
    ConstraintSpec,
    Flag,
    GateInstance,
    Moment,
    ProblemFormatError,
    ProblemSpec,
    SolveOutcome,
    StateVector,
    Status,
    index_of_bits,
    normalize,
)
from .gates import SegmentUnitary, build_gate_matrix, compose_segment, embed_gate
from .problem_io import emit_report, format_problem, parse_problem
from .simulator import MeasurementCounts, apply_gate, marginal_probs, run_to_moment, sample
from .solver import IntervalModel, extract_state, fallback_solve, run_external
from .verifier import check_assertion, render_assertion_script, verify_solution
from .cli import RunConfig, main, solve_loop

__all__ = [
    "AssertionVerdict", "ConstraintSpec", "Flag", "GateInstance",
    "IntervalModel", "MeasurementCounts", "Moment", "ProblemFormatError",
    "ProblemSpec", "RunConfig", "SegmentUnitary", "SolveOutcome",
    "StateVector", "Status",
    "apply_gate", "build_gate_matrix", "check_assertion", "compose_segment",
    "embed_gate", "emit_report", "extract_state", "fallback_solve",
    "format_problem", "index_of_bits", "main", "marginal_probs", "normalize",
    "parse_problem", "render_assertion_script", "run_external",
    "run_to_moment", "sample", "solve_loop", "verify_solution",
]

__version__ = "0.1.0"
