"""Emission of QF_NRA SMT-LIB2 problems over real amplitude variables.

Variables are named a_<i>_<t> / b_<i>_<t> for the real/imaginary part of
basis amplitude i at moment t (t=0 is the input state). The document
contains, in order: declarations, the t=0 normalization, then per moment
the transition equalities followed by the moment's constraint, then one
exclusion clause per previously rejected model.

Assertion builders return bare formulas; the document wraps each in
(assert ...) at render time. Numeric literals use plain decimal notation
(no exponents) at round-trip precision; negatives are written (- x).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from typing import Mapping, Sequence

import numpy as np

from .gates import compose_segment, split_real_imag
from .model import (
    ConstraintSpec,
    Flag,
    ProblemSpec,
    marginal_index,
    observed_indices,
)

# transition coefficients below this are dropped to shrink the file
COEF_PRUNE = 1e-12


def smt_real(x: float) -> str:
    """Shortest round-trip decimal literal, SMT-LIB2 style."""
    if x < 0:
        return f"(- {smt_real(-x)})"
    s = repr(float(x))
    if "e" in s or "E" in s:
        s = format(Decimal(s), "f")
    if "." not in s:
        s += ".0"
    return s


def avar(i: int, t: int) -> str:
    return f"a_{i}_{t}"


def bvar(i: int, t: int) -> str:
    return f"b_{i}_{t}"


def _sq(v: str) -> str:
    return f"(* {v} {v})"


def _prob(i: int, t: int) -> str:
    return f"(+ {_sq(avar(i, t))} {_sq(bvar(i, t))})"


def _sum(terms: Sequence[str]) -> str:
    if not terms:
        return "0.0"
    if len(terms) == 1:
        return terms[0]
    return f"(+ {' '.join(terms)})"


def _scaled(coef: float, var: str) -> str:
    if coef == 1.0:
        return var
    if coef == -1.0:
        return f"(- {var})"
    return f"(* {smt_real(coef)} {var})"


@dataclass
class SmtDocument:
    """An SMT-LIB2 problem: declared real variables plus assertion formulas."""

    logic: str = "QF_NRA"
    declarations: list[str] = field(default_factory=list)
    assertions: list[str] = field(default_factory=list)

    def render(self) -> str:
        lines = [f"(set-logic {self.logic})"]
        lines += [f"(declare-fun {name} () Real)" for name in self.declarations]
        lines += [f"(assert {formula})" for formula in self.assertions]
        lines += ["(check-sat)", "(get-model)"]
        return "\n".join(lines) + "\n"


def encode_transition(R: np.ndarray, M: np.ndarray, t: int) -> list[str]:
    """Equalities mapping moment t-1 amplitudes to moment t through the
    split unitary: a' = R a - M b and b' = M a + R b, rowwise."""
    dim = R.shape[0]
    formulas = []
    for i in range(dim):
        a_terms, b_terms = [], []
        for j in range(dim):
            r, m = float(R[i, j]), float(M[i, j])
            if abs(r) >= COEF_PRUNE:
                a_terms.append(_scaled(r, avar(j, t - 1)))
                b_terms.append(_scaled(r, bvar(j, t - 1)))
            if abs(m) >= COEF_PRUNE:
                a_terms.append(_scaled(-m, bvar(j, t - 1)))
                b_terms.append(_scaled(m, avar(j, t - 1)))
        formulas.append(f"(= {avar(i, t)} {_sum(a_terms)})")
        formulas.append(f"(= {bvar(i, t)} {_sum(b_terms)})")
    return formulas


def _marginal_groups(qm: Sequence[int], n: int) -> list[list[int]]:
    groups: list[list[int]] = [[] for _ in range(1 << len(qm))]
    for x in range(1 << n):
        groups[marginal_index(x, qm)].append(x)
    return groups


def encode_constraint(c: ConstraintSpec, t: int, n: int, delta_eq: float) -> list[str]:
    """Formulas for one constraint at moment t.

    in/not_in zero out the probability of every full basis index outside/
    inside the observed set; ==, > and < act on the marginal distribution
    over the measured qubits with slack delta_eq.
    """
    if c.flag in (Flag.IN, Flag.NOT_IN):
        s_r = observed_indices(c, n)
        zeroed = (
            sorted(set(range(1 << n)) - s_r) if c.flag is Flag.IN else sorted(s_r)
        )
        return [f"(= {_prob(x, t)} 0.0)" for x in zeroed]

    groups = _marginal_groups(c.measured, n)
    if c.flag is Flag.EQ:
        formulas = []
        for m, dx in enumerate(c.distribution):
            p = _sum([_prob(x, t) for x in groups[m]])
            d = smt_real(dx)
            eps = smt_real(delta_eq)
            formulas.append(
                f"(and (<= (- {p} {d}) {eps}) (<= (- {d} {p}) {eps}))"
            )
        return formulas
    if c.flag is Flag.GT:
        return [
            f"(> {_sum([_prob(x, t) for x in groups[xs]])} {smt_real(ps - delta_eq)})"
            for xs, ps in c.pairs
        ]
    # LT: non-strict, bound widened by delta_eq
    return [
        f"(<= {_sum([_prob(x, t) for x in groups[xs]])} {smt_real(ps + delta_eq)})"
        for xs, ps in c.pairs
    ]


def encode_exclusion(
    model: Mapping[str, tuple[float, float]], eps: float
) -> str | None:
    """One disjunction forcing at least one t=0 variable to leave its prior
    interval by more than eps. Returns None for an empty model."""
    disjuncts = []
    for name in sorted(model, key=_var_sort_key):
        if not name.endswith("_0"):
            continue
        lo, hi = model[name]
        disjuncts.append(f"(< {name} {smt_real(lo - eps)})")
        disjuncts.append(f"(> {name} {smt_real(hi + eps)})")
    if not disjuncts:
        return None
    return f"(or {' '.join(disjuncts)})"


def _var_sort_key(name: str):
    kind, i, t = name.split("_")
    return int(t), int(i), kind


def encode_problem(
    problem: ProblemSpec,
    exclusions: Sequence[Mapping[str, tuple[float, float]]] = (),
    eps: float = 0.0005,
    delta_eq: float = 0.01,
) -> SmtDocument:
    """Full document for a problem: declarations, t=0 normalization, one
    transition+constraint pair per moment, and prior-model exclusions."""
    n = problem.n
    dim = 1 << n
    doc = SmtDocument()
    for t in range(len(problem.moments) + 1):
        for i in range(dim):
            doc.declarations += [avar(i, t), bvar(i, t)]

    doc.assertions.append(f"(= {_sum([_prob(i, 0) for i in range(dim)])} 1.0)")
    for k, moment in enumerate(problem.moments):
        R, M = split_real_imag(compose_segment(moment.segment, n))
        doc.assertions += encode_transition(R, M, k + 1)
        doc.assertions += encode_constraint(moment.constraint, k + 1, n, delta_eq)
    for model in exclusions:
        clause = encode_exclusion(model, eps)
        if clause is not None:
            doc.assertions.append(clause)
    return doc
