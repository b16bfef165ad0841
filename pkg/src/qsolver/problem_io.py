"""Problem-file parsing and report emission.

A problem file is one block per moment, blocks separated by blank lines,
each block exactly three labelled lines in order:

    gates: [t(0) ; h(0) ; x(1) ; cx(1,2) ; cx(0,1)]
    target_prob: [[0,1,2], [0,1,2], ['010','101']]
    flag: "in"

Gate arguments are split by arity: the trailing arity-many arguments are
qubit indices, anything before them is a radian parameter. The target_prob
shape depends on the flag:

    in / not_in -> [Q_m, Q_m, [outcome strings]]   (the two index lists
                   must be identical; the second fixes string positions)
    ==          -> [Q_m, D] with 2^len(Q_m) probabilities
    > / <       -> [Q_m, P] with P a list of [outcome index, probability]
"""

from __future__ import annotations

import ast
import json
from typing import Sequence

from .model import (
    GATE_SIGNATURES,
    ConstraintSpec,
    Flag,
    GateInstance,
    Moment,
    ProblemFormatError,
    ProblemSpec,
    SolveOutcome,
    Status,
)

_LABELS = ("gates", "target_prob", "flag")


def _fail(block: int, label: str, message: str) -> ProblemFormatError:
    return ProblemFormatError(f"block {block}, line {label!r}: {message}")


def _split_blocks(text: str) -> list[list[str]]:
    blocks: list[list[str]] = []
    current: list[str] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            if current:
                blocks.append(current)
                current = []
        else:
            current.append(line)
    if current:
        blocks.append(current)
    return blocks


def _parse_gate(token: str, block: int, n: int) -> GateInstance:
    token = token.strip()
    if not token.endswith(")") or "(" not in token:
        raise _fail(block, "gates", f"malformed gate {token!r}, expected name(args)")
    name, _, arg_text = token[:-1].partition("(")
    name = name.strip().lower()
    sig = GATE_SIGNATURES.get(name)
    if sig is None:
        raise _fail(block, "gates", f"unknown gate {name!r}")
    arity, n_params = sig
    args = [a.strip() for a in arg_text.split(",")] if arg_text.strip() else []
    if len(args) != arity + n_params:
        raise _fail(
            block, "gates",
            f"gate {name!r} expects {n_params} parameter(s) and {arity} qubit(s), "
            f"got {len(args)} argument(s)",
        )
    try:
        params = tuple(float(a) for a in args[:n_params])
    except ValueError:
        raise _fail(block, "gates", f"gate {name!r}: bad parameter in {args[:n_params]}")
    qubits = []
    for a in args[n_params:]:
        try:
            qubits.append(int(a))
        except ValueError:
            raise _fail(block, "gates", f"gate {name!r}: qubit index {a!r} is not an integer")
    if any(not 0 <= q < n for q in qubits):
        raise _fail(block, "gates", f"gate {name!r}: qubit index out of range for n={n}")
    try:
        return GateInstance(name, params, tuple(qubits))
    except ValueError as e:
        raise _fail(block, "gates", str(e))


def _parse_target(value, flag: Flag, block: int, n: int) -> ConstraintSpec:
    if not isinstance(value, list) or not value or not isinstance(value[0], list):
        raise _fail(block, "target_prob", "expected a list starting with the measured qubits")
    qm_raw = value[0]
    if not all(isinstance(q, int) for q in qm_raw):
        raise _fail(block, "target_prob", f"measured qubits {qm_raw!r} must be integers")
    qm = tuple(qm_raw)
    if any(not 0 <= q < n for q in qm):
        raise _fail(block, "target_prob", f"measured qubits {list(qm)} out of range for n={n}")

    try:
        if flag in (Flag.IN, Flag.NOT_IN):
            if len(value) != 3:
                raise _fail(
                    block, "target_prob",
                    f"flag {flag.value!r} needs [Q_m, Q_m, observations], got {len(value)} parts",
                )
            if value[1] != qm_raw:
                raise _fail(
                    block, "target_prob",
                    f"the two index lists differ ({value[0]!r} vs {value[1]!r}); "
                    "they must be identical",
                )
            obs = value[2]
            if not isinstance(obs, list) or not all(isinstance(s, str) for s in obs):
                raise _fail(block, "target_prob", "observations must be a list of strings")
            return ConstraintSpec(flag, qm, observations=tuple(obs))
        if flag is Flag.EQ:
            if len(value) != 2 or not isinstance(value[1], list):
                raise _fail(block, "target_prob", "flag '==' needs [Q_m, distribution]")
            dist = value[1]
            if not all(isinstance(d, (int, float)) for d in dist):
                raise _fail(block, "target_prob", "distribution entries must be numbers")
            return ConstraintSpec(flag, qm, distribution=tuple(float(d) for d in dist))
        # GT / LT
        if len(value) != 2 or not isinstance(value[1], list):
            raise _fail(block, "target_prob", f"flag {flag.value!r} needs [Q_m, pairs]")
        pairs = []
        for item in value[1]:
            if (
                not isinstance(item, list)
                or len(item) != 2
                or not isinstance(item[0], int)
                or not isinstance(item[1], (int, float))
            ):
                raise _fail(
                    block, "target_prob",
                    f"each pair must be [outcome index, probability], got {item!r}",
                )
            pairs.append((item[0], float(item[1])))
        return ConstraintSpec(flag, qm, pairs=tuple(pairs))
    except ValueError as e:
        raise _fail(block, "target_prob", str(e))


def parse_problem(text: str, n: int) -> ProblemSpec:
    """Parse problem text into a ProblemSpec with one moment per block."""
    if n < 1:
        raise ProblemFormatError(f"qubit count must be positive, got {n}")
    if not text.strip():
        raise ProblemFormatError("empty problem text")
    moments = []
    for b, lines in enumerate(_split_blocks(text)):
        if len(lines) != 3:
            raise ProblemFormatError(
                f"block {b}: expected exactly 3 labelled lines "
                f"(gates, target_prob, flag), got {len(lines)}"
            )
        values = {}
        for line, label in zip(lines, _LABELS):
            head, sep, tail = line.partition(":")
            if not sep or head.strip() != label:
                raise ProblemFormatError(
                    f"block {b}: expected line {label!r}, got {line!r}"
                )
            values[label] = tail.strip()

        flag_text = values["flag"]
        try:
            flag_text = ast.literal_eval(flag_text)
        except (ValueError, SyntaxError):
            pass  # accept an unquoted flag too
        if not isinstance(flag_text, str):
            raise _fail(b, "flag", f"flag must be a string, got {values['flag']!r}")
        try:
            flag = Flag(flag_text)
        except ValueError:
            valid = ", ".join(repr(f.value) for f in Flag)
            raise _fail(b, "flag", f"unknown flag {flag_text!r}; expected one of {valid}")

        gates_text = values["gates"]
        if not (gates_text.startswith("[") and gates_text.endswith("]")):
            raise _fail(b, "gates", f"expected a [...] gate list, got {gates_text!r}")
        inner = gates_text[1:-1].strip()
        segment = tuple(
            _parse_gate(tok, b, n) for tok in inner.split(";") if tok.strip()
        ) if inner else ()

        try:
            target = ast.literal_eval(values["target_prob"])
        except (ValueError, SyntaxError) as e:
            raise _fail(b, "target_prob", f"unparseable list: {e}")
        constraint = _parse_target(target, flag, b, n)
        moments.append(Moment(segment=segment, constraint=constraint))

    try:
        return ProblemSpec(n=n, moments=tuple(moments))
    except ValueError as e:
        raise ProblemFormatError(str(e))


def format_problem(problem: ProblemSpec) -> str:
    """Canonical problem text; parse_problem(format_problem(p), p.n) == p."""
    blocks = []
    for moment in problem.moments:
        gates = " ; ".join(
            f"{g.name}({', '.join([repr(p) for p in g.params] + [str(q) for q in g.qubits])})"
            for g in moment.segment
        )
        c = moment.constraint
        qm = list(c.measured)
        if c.flag in (Flag.IN, Flag.NOT_IN):
            target = [qm, qm, [s for s in c.observations]]
        elif c.flag is Flag.EQ:
            target = [qm, [d for d in c.distribution]]
        else:
            target = [qm, [[x, p] for x, p in c.pairs]]
        blocks.append(
            f"gates: [{gates}]\ntarget_prob: {target!r}\nflag: \"{c.flag.value}\"\n"
        )
    return "\n".join(blocks)


def emit_report(
    outcome: SolveOutcome,
    problem: ProblemSpec,
    seed: int | None = None,
) -> str:
    """Machine-readable JSON report for a solve outcome."""

    def state_pairs(state):
        return [[float(a.real), float(a.imag)] for a in state.amps]

    report = {
        "status": outcome.status.value,
        "n": problem.n,
        "moments": len(problem.moments),
        "attempts": outcome.attempt,
        "elapsed_seconds": outcome.elapsed,
        "state": state_pairs(outcome.state) if outcome.state is not None else None,
        "verdicts": [v.to_dict() for v in outcome.verdicts],
        "seed": seed,
    }
    if outcome.status is Status.NO_FEASIBLE:
        report["failed_states"] = [state_pairs(s) for s in outcome.failed_states]
    return json.dumps(report, indent=2)
