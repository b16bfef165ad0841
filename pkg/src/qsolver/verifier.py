"""Assertion checking of candidate states and standalone assertion-script
rendering.

A candidate passes moment k when the sampled outcome frequencies over the
measured qubits satisfy the acceptance rule for the moment's flag with
tolerance delta_i:

    in      sum of observed-set frequencies  > 0.95 - delta_i
    not_in  sum of observed-set frequencies  < 0.05 + delta_i
    ==      |mp_x - D_x| <= delta_i for every outcome x
    >       mp_x > p_s - delta_i for every pair
    <       mp_x < p_s + delta_i for every pair

The < rule uses the widened bound p_s + delta_i, mirroring the solve-time
constraint; a shrunken bound would reject exactly-satisfying states.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

from .model import (
    AssertionVerdict,
    ConstraintSpec,
    Flag,
    ProblemSpec,
    StateVector,
    index_to_bits,
)
from .simulator import MeasurementCounts, run_to_moment, sample

DEFAULT_DELTA_I = 0.05
DEFAULT_SHOTS = 100000


def check_assertion(
    counts: MeasurementCounts, c: ConstraintSpec, delta_i: float, moment: int = 0
) -> AssertionVerdict:
    """Verdict for one constraint given sampled counts over its qubits."""
    width = len(c.measured)
    if any(len(k) != width for k in counts.counts):
        raise ValueError(
            f"counts outcome width does not match {width} measured qubit(s)"
        )
    mp = counts.frequencies

    if c.flag in (Flag.IN, Flag.NOT_IN):
        total = sum(mp.get(s, 0.0) for s in c.observations)
        observed = {s: mp.get(s, 0.0) for s in c.observations}
        if c.flag is Flag.IN:
            bound = 0.95 - delta_i
            margin = total - bound
            required = f"sum over {sorted(c.observations)} > {bound:g}"
        else:
            bound = 0.05 + delta_i
            margin = bound - total
            required = f"sum over {sorted(c.observations)} < {bound:g}"
        passed = margin > 0
    elif c.flag is Flag.EQ:
        worst = 0.0
        observed = {}
        for m, dx in enumerate(c.distribution):
            s = index_to_bits(m, width)
            observed[s] = mp.get(s, 0.0)
            worst = max(worst, abs(observed[s] - dx))
        margin = delta_i - worst
        passed = margin >= 0
        required = f"|mp - D| <= {delta_i:g} for all {1 << width} outcomes"
    elif c.flag is Flag.GT:
        margin = float("inf")
        observed = {}
        parts = []
        for xs, ps in c.pairs:
            s = index_to_bits(xs, width)
            observed[s] = mp.get(s, 0.0)
            margin = min(margin, observed[s] - (ps - delta_i))
            parts.append(f"mp[{s}] > {ps - delta_i:g}")
        passed = margin > 0
        required = " and ".join(parts)
    else:  # LT
        margin = float("inf")
        observed = {}
        parts = []
        for xs, ps in c.pairs:
            s = index_to_bits(xs, width)
            observed[s] = mp.get(s, 0.0)
            margin = min(margin, (ps + delta_i) - observed[s])
            parts.append(f"mp[{s}] < {ps + delta_i:g}")
        passed = margin > 0
        required = " and ".join(parts)

    return AssertionVerdict(
        moment=moment, passed=passed, observed=observed,
        required=required, margin=margin,
    )


def verify_solution(
    state: StateVector,
    problem: ProblemSpec,
    shots: int = DEFAULT_SHOTS,
    delta_i: float = DEFAULT_DELTA_I,
    seed: int = 0,
) -> list[AssertionVerdict]:
    """Check every moment: truncated re-simulation from the candidate state,
    sampled measurement over that moment's qubits, then the flag's rule."""
    verdicts = []
    for k, moment in enumerate(problem.moments):
        reached = run_to_moment(state, problem, k)
        counts = sample(reached, moment.constraint.measured, shots, seed=seed + k)
        verdicts.append(check_assertion(counts, moment.constraint, delta_i, moment=k))
    return verdicts


# --- standalone assertion scripts ---------------------------------------

_SCRIPT_BODY = '''

def run_qiskit():
    from qiskit import QuantumCircuit, transpile
    try:
        from qiskit_aer import AerSimulator
        backend, backend_name = AerSimulator(), "qiskit-aer"
    except ImportError:
        from qiskit.providers.basic_provider import BasicSimulator
        backend, backend_name = BasicSimulator(), "qiskit-basic"
    qc = QuantumCircuit(NUM_QUBITS, len(MEASURED))
    qc.initialize([re + 1j * im for re, im in AMPLITUDES], range(NUM_QUBITS))
    for name, params, qubits in GATES:
        getattr(qc, name)(*params, *qubits)
    for j, q in enumerate(MEASURED):
        qc.measure(q, j)
    raw = backend.run(transpile(qc, backend), shots=SHOTS,
                      seed_simulator=SEED).result().get_counts()
    counts = {}
    for key, c in raw.items():
        key = key.replace(" ", "")[::-1]  # classical bit j -> character j
        counts[key] = counts.get(key, 0) + c
    return counts, backend_name


def gate_matrix(name, params):
    import numpy as np
    from math import cos, sin, sqrt, pi
    from cmath import exp
    s2 = 1 / sqrt(2)
    fixed = {
        "x": [[0, 1], [1, 0]],
        "y": [[0, -1j], [1j, 0]],
        "z": [[1, 0], [0, -1]],
        "h": [[s2, s2], [s2, -s2]],
        "s": [[1, 0], [0, 1j]],
        "sdg": [[1, 0], [0, -1j]],
        "t": [[1, 0], [0, exp(1j * pi / 4)]],
        "tdg": [[1, 0], [0, exp(-1j * pi / 4)]],
        "sx": [[(1 + 1j) / 2, (1 - 1j) / 2], [(1 - 1j) / 2, (1 + 1j) / 2]],
        "sxdg": [[(1 - 1j) / 2, (1 + 1j) / 2], [(1 + 1j) / 2, (1 - 1j) / 2]],
        "swap": [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]],
        "iswap": [[1, 0, 0, 0], [0, 0, 1j, 0], [0, 1j, 0, 0], [0, 0, 0, 1]],
    }
    if name in fixed:
        return np.array(fixed[name], dtype=complex)
    if name == "rx":
        t = params[0]
        return np.array([[cos(t / 2), -1j * sin(t / 2)],
                         [-1j * sin(t / 2), cos(t / 2)]], dtype=complex)
    if name == "ry":
        t = params[0]
        return np.array([[cos(t / 2), -sin(t / 2)],
                         [sin(t / 2), cos(t / 2)]], dtype=complex)
    if name == "rz":
        t = params[0]
        return np.array([[exp(-1j * t / 2), 0], [0, exp(1j * t / 2)]], dtype=complex)
    if name == "p":
        return np.array([[1, 0], [0, exp(1j * params[0])]], dtype=complex)
    if name == "u":
        th, ph, lm = params
        return np.array([[cos(th / 2), -exp(1j * lm) * sin(th / 2)],
                         [exp(1j * ph) * sin(th / 2),
                          exp(1j * (ph + lm)) * cos(th / 2)]], dtype=complex)
    # controlled family: control bits are the low local bits
    import numpy
    if name == "cswap":
        base, nc = gate_matrix("swap", []), 1
    elif name.startswith("cc"):
        base, nc = gate_matrix(name[2:], params), 2
    else:
        base, nc = gate_matrix(name[1:], params), 1
    kb = base.shape[0]
    out = numpy.eye(kb << nc, dtype=complex)
    block = [(b << nc) | ((1 << nc) - 1) for b in range(kb)]
    out[numpy.ix_(block, block)] = base
    return out


def run_builtin():
    import numpy as np
    state = np.array([re + 1j * im for re, im in AMPLITUDES], dtype=complex)
    for name, params, qubits in GATES:
        base = gate_matrix(name, params)
        k = len(qubits)
        mask = 0
        for q in qubits:
            mask |= 1 << q
        new = state.copy()
        for rest in range(1 << NUM_QUBITS):
            if rest & mask:
                continue
            idx = [rest | sum(((l >> j) & 1) << q for j, q in enumerate(qubits))
                   for l in range(1 << k)]
            vec = state[idx]
            for r in range(1 << k):
                new[idx[r]] = sum(base[r, c] * vec[c] for c in range(1 << k))
        state = new
    marg = [0.0] * (1 << len(MEASURED))
    for x, amp in enumerate(state):
        m = 0
        for j, q in enumerate(MEASURED):
            m |= ((x >> q) & 1) << j
        marg[m] += abs(amp) ** 2
    total = sum(marg)
    draws = np.random.default_rng(SEED).multinomial(SHOTS, [p / total for p in marg])
    counts = {}
    for m, c in enumerate(draws):
        if c:
            key = "".join(str((m >> j) & 1) for j in range(len(MEASURED)))
            counts[key] = int(c)
    return counts, "builtin-numpy"


def evaluate(mp):
    def key_of(x):
        return "".join(str((x >> j) & 1) for j in range(len(MEASURED)))

    if FLAG == "in":
        total = sum(mp.get(s, 0.0) for s in TARGET)
        margin = total - (0.95 - DELTA)
        return margin > 0, margin, "sum(mp over target) > %g" % (0.95 - DELTA)
    if FLAG == "not_in":
        total = sum(mp.get(s, 0.0) for s in TARGET)
        margin = (0.05 + DELTA) - total
        return margin > 0, margin, "sum(mp over target) < %g" % (0.05 + DELTA)
    if FLAG == "==":
        worst = max(abs(mp.get(key_of(x), 0.0) - d) for x, d in enumerate(TARGET))
        margin = DELTA - worst
        return margin >= 0, margin, "|mp - D| <= %g for all outcomes" % DELTA
    if FLAG == ">":
        margin = min(mp.get(key_of(x), 0.0) - (p - DELTA) for x, p in TARGET)
        return margin > 0, margin, "mp[x] > p - %g for all pairs" % DELTA
    margin = min((p + DELTA) - mp.get(key_of(x), 0.0) for x, p in TARGET)
    return margin > 0, margin, "mp[x] < p + %g for all pairs" % DELTA


def main():
    try:
        counts, backend_name = run_qiskit()
    except ImportError:
        try:
            counts, backend_name = run_builtin()
        except ImportError:
            print(json.dumps({"moment": MOMENT, "status": "skip",
                              "reason": "neither qiskit nor numpy is available"}))
            return 75
    mp = {k: v / SHOTS for k, v in counts.items()}
    passed, margin, condition = evaluate(mp)
    print(json.dumps({
        "moment": MOMENT,
        "status": "pass" if passed else "fail",
        "passed": passed,
        "backend": backend_name,
        "shots": SHOTS,
        "margin": margin,
        "condition": condition,
        "frequencies": mp,
        "counts": counts,
    }))
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
'''


def render_assertion_script(
    problem: ProblemSpec,
    k: int,
    state: StateVector,
    shots: int = DEFAULT_SHOTS,
    delta_i: float = DEFAULT_DELTA_I,
) -> str:
    """Self-contained script checking moment k's constraint for the given
    input state: initialize, apply segments 0..k, measure, assert. Prefers
    qiskit, falls back to an embedded numpy sampler, exits 75 when neither
    is importable. Output is a deterministic function of the inputs."""
    if not 0 <= k < len(problem.moments):
        raise IndexError(f"moment index {k} out of range")
    c = problem.moments[k].constraint
    gates = [
        (g.name, list(g.params), list(g.qubits))
        for moment in problem.moments[: k + 1]
        for g in moment.segment
    ]
    if c.flag in (Flag.IN, Flag.NOT_IN):
        target = sorted(c.observations)
    elif c.flag is Flag.EQ:
        target = list(c.distribution)
    else:
        target = [[x, p] for x, p in c.pairs]
    amplitudes = [(float(a.real), float(a.imag)) for a in state.amps]

    header = "\n".join([
        '"""Sampling-based assertion for one program moment. Generated file."""',
        "import json",
        "import os",
        "import sys",
        "",
        f"MOMENT = {k}",
        f"NUM_QUBITS = {problem.n}",
        f"MEASURED = {list(c.measured)!r}",
        f"FLAG = {c.flag.value!r}",
        f"TARGET = {target!r}",
        f"DELTA = {delta_i!r}",
        f"SHOTS = {shots}",
        f'SEED = int(os.environ.get("QSOLVER_ASSERT_SEED", "{1000003 * (k + 1)}"))',
        f"AMPLITUDES = {amplitudes!r}",
        f"GATES = {gates!r}",
    ])
    return header + "\n" + _SCRIPT_BODY


def write_assertion_scripts(
    problem: ProblemSpec,
    state: StateVector,
    out_dir: str | Path,
    shots: int = DEFAULT_SHOTS,
    delta_i: float = DEFAULT_DELTA_I,
) -> list[Path]:
    """One script per moment: assert_moment_<k>.py under out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for k in range(len(problem.moments)):
        path = out_dir / f"assert_moment_{k}.py"
        path.write_text(render_assertion_script(problem, k, state, shots, delta_i))
        paths.append(path)
    return paths
