"""Seeded experiment runner emitting deterministic CSV/JSON reports.

Every subcommand evaluates one experiment, writes a report file with a
fixed column schema, prints a one-line JSON summary to stdout, and
exits 0 on success, 2 on validation errors (with a machine-readable
error JSON on stdout), or 3 when a requested acceptance threshold
fails.  Reports are byte-identical for identical specs in CSV format;
the JSON mirror adds metadata including wall time, which is excluded
from the determinism guarantee.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .applications import (
    GroverTask,
    addition_target,
    add_states,
    binomial_tv,
    diag_state,
    discrimination_rates,
    discrimination_trials,
    orthogonality_test,
    phase_estimate,
    sample_grover,
    tomography_bound,
)
from .gadgets import (
    HermitianPolynomial,
    PolynomialTerm,
    commutator_gadget,
    eval_jordan_lie,
    jordan_lie_expand,
    polynomial_matrix,
    simulate_polynomial,
)
from .linalg import (
    dagger,
    ket,
    kron,
    projector,
    random_state,
    trace_distance,
)
from .lmr import LmrConfig, ideal_conjugation, lmr_simulate, lmr_step
from .rng import substream
from .universal import (
    ChainMachine,
    circuit_from_json,
    circuit_unitary,
    euler_decompose,
    exchange_evolution,
    run_circuit,
)

STOCHASTIC = {"lmr-converge", "discriminate", "phase-est", "ortho-test", "grover",
              "poly-sim", "jordan-lie"}
_SUBCOMMANDS = sorted(STOCHASTIC | {"add-states", "universal-demo", "tomo-compare"})


@dataclass
class RunSpec:
    """Fully resolved run request (flags + defaults + env seed)."""

    subcommand: str
    params: dict
    seed: int
    output_path: str
    format: str = "csv"

    def __post_init__(self) -> None:
        if self.subcommand not in _SUBCOMMANDS:
            raise ValueError(f"unknown subcommand {self.subcommand!r}")
        if self.format not in ("csv", "json"):
            raise ValueError(f"format must be csv or json, got {self.format!r}")


class _CliError(Exception):
    """Validation failure that should exit 2."""


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _write_report(spec: RunSpec, columns: list[str], rows: list[tuple], summary: dict,
                  wall_time: float) -> None:
    if spec.format == "csv":
        lines = [",".join(columns)]
        lines.extend(",".join(_fmt(v) for v in row) for row in rows)
        payload = "\n".join(lines) + "\n"
    else:
        payload = json.dumps(
            {
                "version": __version__,
                "subcommand": spec.subcommand,
                "seed": spec.seed,
                "params": spec.params,
                "columns": columns,
                "rows": [[v if isinstance(v, str) else float(v) for v in row] for row in rows],
                "summary": summary,
                "wall_time_s": round(wall_time, 3),
            },
            sort_keys=True,
            indent=2,
        ) + "\n"
    with open(spec.output_path, "w", encoding="utf-8") as handle:
        handle.write(payload)


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part]
    except ValueError as exc:
        raise _CliError(f"expected comma-separated numbers, got {text!r}") from exc


def _parse_ints(text: str) -> list[int]:
    values = _parse_floats(text)
    if any(v != int(v) for v in values):
        raise _CliError(f"expected comma-separated integers, got {text!r}")
    return [int(v) for v in values]


def _loglog_slope(xs: list[float], ys: list[float]) -> float:
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


# ---------------------------------------------------------------------------
# Subcommand handlers: each returns (columns, rows, summary, exit_code)


def _run_lmr_converge(args, seed):
    ns = _parse_ints(args.ns)
    if any(n < 1 for n in ns) or len(ns) < 2:
        raise _CliError("--ns needs at least two positive step counts")
    rng = substream(seed, "lmr-converge")
    sigma = random_state(args.dim, args.dim, rng)
    rho = random_state(args.dim, args.dim, rng)
    target = ideal_conjugation(rho, args.t, sigma)
    rows = []
    for n in ns:
        approx, _ = lmr_simulate(sigma, rho, LmrConfig(t=args.t, delta=1.0, n_override=n))
        rows.append((n, trace_distance(approx, target)))
    slope = _loglog_slope([float(r[0]) for r in rows], [max(r[1], 1e-300) for r in rows])
    summary = {"slope": slope}
    code = 0 if -1.1 <= slope <= -0.9 else 3
    return ["n", "trace_distance"], rows, summary, code


def _run_discriminate(args, seed):
    if args.eta is not None and not (0.0 < args.eps < args.eta < 0.5):
        raise _CliError(f"need 0 < eps < eta < 1/2, got eps={args.eps}, eta={args.eta}")
    if not 0.0 < args.eps <= 1.0 or not 0.0 <= args.x <= 1.0 - args.eps:
        raise _CliError(f"need 0 < eps and 0 <= x <= 1-eps, got x={args.x}, eps={args.eps}")
    if args.trials < 1:
        raise _CliError("--trials must be positive")
    budget = LmrConfig(t=1.0, delta=args.delta) if args.protocol == "lmr" else None
    p_plus = discrimination_rates(args.x, args.eps, args.protocol, budget)
    rows_raw = discrimination_trials(p_plus, args.trials, seed)
    rows = [(i, h, g, c) for i, (h, g, c) in enumerate(rows_raw)]
    rate = sum(r[3] for r in rows) / args.trials
    summary = {"success_rate": rate, "p_plus_a": p_plus[0], "p_plus_b": p_plus[1]}
    code = 0 if args.min_success is None or rate >= args.min_success else 3
    return ["trial", "hidden", "guess", "correct"], rows, summary, code


def _run_phase_est(args, seed):
    weights = _parse_floats(args.diag)
    if not weights or any(w < 0 for w in weights) or sum(weights) <= 0:
        raise _CliError("--diag needs nonnegative weights with positive sum")
    rho = np.diag(np.array(weights) / sum(weights)).astype(complex)
    index = args.index if args.index >= 0 else None
    estimates, details = phase_estimate(
        rho, args.precision, args.protocol, seed,
        mode=args.mode, eigenvector_index=index, runs=args.runs, reps=args.reps,
        return_details=True,
    )
    rows = [(i, est) for i, est in enumerate(estimates)]
    summary = {"estimates": [float(e) for e in estimates],
               "lmr_steps": details["lmr_steps"], "u_uses": details["u_uses"]}
    code = 0
    if args.expect is not None:
        hits = [abs(e - args.expect) <= args.precision for e in estimates]
        code = 0 if any(hits) else 3
    return ["index", "estimate"], rows, summary, code


def _run_ortho_test(args, seed):
    if args.pair == "orthogonal":
        psi1, psi2 = ket(0, 2), ket(1, 2)
    else:
        psi1 = ket(0, 2)
        psi2 = math.sqrt(args.w) * ket(0, 2) + math.sqrt(1.0 - args.w) * ket(1, 2)
    verdict = orthogonality_test(psi1, psi2, args.w, args.eps_fail, args.protocol, seed)
    rows = [(args.pair, verdict)]
    summary = {"verdict": verdict}
    code = 0 if args.expect is None or verdict == args.expect else 3
    return ["pair", "verdict"], rows, summary, code


def _run_add_states(args, seed):
    psi1 = ket(0, 2)
    psi2 = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
    delta_angle = math.acos(abs(np.vdot(psi1, psi2)))
    chi = args.chi if args.chi is not None else delta_angle / 2.0
    budget = LmrConfig(t=1.0, delta=args.delta) if args.protocol == "lmr" else None
    out = add_states(psi1, psi2, chi, args.protocol, budget)
    target = addition_target(psi1, psi2, chi)
    fidelity = float(np.real(np.vdot(target, out @ target)))
    rows = [(chi, fidelity)]
    summary = {"chi": chi, "fidelity": fidelity}
    code = 0 if args.min_fidelity is None or fidelity >= args.min_fidelity else 3
    return ["chi", "fidelity"], rows, summary, code


def _run_grover(args, seed):
    if not 0.0 <= args.lam <= 1.0:
        raise _CliError(f"--lam must be in [0, 1], got {args.lam}")
    target = projector(ket(3, 4))
    task = GroverTask(target_projector=target, w=args.w, epsilon_fail=args.eps_fail,
                      state_budget_delta=math.sqrt(args.w) / 10.0)
    if args.lam == 0.0:
        start = ket(0, 4)
    else:
        start = math.sqrt(args.lam) * ket(3, 4) + math.sqrt(1.0 - args.lam) * ket(0, 4)
    rows = []
    found = 0
    for run in range(args.runs):
        verdict = sample_grover(task, start, args.protocol, substream_seed(seed, run))
        found += int(verdict == "found")
        rows.append((run, verdict))
    rate = found / args.runs
    summary = {"found_rate": rate}
    code = 0
    if args.expect == "found" and rate < 0.9:
        code = 3
    if args.expect == "not_found" and rate > 0.0:
        code = 3
    return ["run", "verdict"], rows, summary, code


def substream_seed(seed: int, run: int) -> int:
    """Derive a per-run integer seed (keeps sample_grover's signature simple)."""
    return int(substream(seed, "grover-run", run).integers(2**62))


def _run_poly_sim(args, seed):
    rng = substream(seed, "poly-sim")
    rows = []
    worst = 0.0
    for case in range(args.cases):
        states = tuple(random_state(2, 2, rng) for _ in range(args.n_states))
        terms = []
        for _ in range(args.n_terms):
            k = int(rng.integers(1, args.max_k + 1))
            indices = tuple(int(i) + 1 for i in rng.integers(0, args.n_states, size=k))
            phi = 0.0 if k == 1 else float(rng.uniform(0.0, 2.0 * math.pi))
            terms.append(PolynomialTerm(indices=indices, phi=phi, c=float(rng.uniform(0.2, 1.0))))
        poly = HermitianPolynomial(k=args.n_states, terms=tuple(terms))
        sigma = random_state(2, 2, rng)
        target = ideal_conjugation(polynomial_matrix(poly, states), args.t, sigma)
        approx, _ = simulate_polynomial(sigma, poly, states,
                                        LmrConfig(t=args.t, delta=args.delta), mode="exact")
        err = trace_distance(approx, target)
        worst = max(worst, err)
        rows.append((case, err))
    summary = {"max_error": worst, "delta": args.delta}
    code = 0 if worst <= args.delta else 3
    return ["case", "trace_distance"], rows, summary, code


def _run_jordan_lie(args, seed):
    rng = substream(seed, "jordan-lie")
    rows = []
    worst = 0.0
    for case in range(args.cases):
        k = int(rng.integers(1, args.max_k + 1))
        indices = "".join(str(int(i) + 1) for i in rng.integers(0, k, size=k))
        z = complex(rng.standard_normal(), rng.standard_normal())
        states = tuple(random_state(2, 2, rng) for _ in range(k))
        expr = jordan_lie_expand(indices, z)
        lhs = eval_jordan_lie(expr, states)
        prod = np.eye(2, dtype=complex)
        for ch in indices:
            prod = prod @ states[int(ch) - 1]
        rhs = z * prod + dagger(z * prod)
        dev = float(np.max(np.abs(lhs - rhs)))
        worst = max(worst, dev)
        rows.append((case, k, dev))
    summary = {"max_deviation": worst}
    code = 0 if worst <= 1e-10 else 3
    return ["case", "k", "deviation"], rows, summary, code


_BELL = "bell"


def _named_circuit(name: str):
    h = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)
    x = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    if name == _BELL:
        return [{"gate": "u", "q": 0, "matrix": h}, {"gate": "cnot", "c": 0, "t": 1}], 2
    if name == "x":
        return [{"gate": "u", "q": 0, "matrix": x}], 1
    raise _CliError(f"unknown named circuit {name!r} (use 'bell', 'x', or a JSON file path)")


def _run_universal_demo(args, seed):
    if args.circuit in (_BELL, "x"):
        circuit, n_qubits = _named_circuit(args.circuit)
    else:
        try:
            with open(args.circuit, "r", encoding="utf-8") as handle:
                circuit = circuit_from_json(json.load(handle))
        except OSError as exc:
            raise _CliError(f"cannot read circuit file: {exc}") from exc
        n_qubits = max(
            max((g["q"] for g in circuit if g["gate"] == "u"), default=0),
            max((max(g["c"], g["t"]) for g in circuit if g["gate"] == "cnot"), default=0),
        ) + 1
    machine = ChainMachine(n_qubits, depolarize=args.depolarize)
    final, report = run_circuit(machine, circuit, args.delta)
    ideal_u = circuit_unitary(circuit, n_qubits)
    zero = np.zeros(2**n_qubits, dtype=complex)
    zero[0] = 1.0
    ideal_vec = ideal_u @ zero
    fidelity = float(np.real(np.vdot(ideal_vec, final @ ideal_vec)))
    rows = [(key, value) for key, value in sorted(report.items())]
    rows.append(("fidelity", fidelity))
    summary = {"fidelity": fidelity, **{k: report[k] for k in
                                        ("exchange_pulses", "resource_total",
                                         "predicted_resource_shape")}}
    code = 0 if args.min_fidelity is None or fidelity >= args.min_fidelity else 3
    return ["key", "value"], rows, summary, code


def _run_tomo_compare(args, seed):
    deltas = _parse_floats(args.deltas)
    if not deltas or any(not 0.0 < d < args.t for d in deltas):
        raise _CliError("--deltas must be positive and below t")
    rows = []
    for delta in deltas:
        lmr_budget = math.ceil(4.0 * args.t**2 / delta)
        tomo = tomography_bound(args.d, args.r, args.t, delta)
        rows.append((delta, lmr_budget, tomo, tomo / lmr_budget))
    summary = {"ratios": [r[3] for r in rows]}
    return ["delta", "lmr_budget", "tomography_bound", "ratio"], rows, summary, 0


_HANDLERS = {
    "lmr-converge": _run_lmr_converge,
    "discriminate": _run_discriminate,
    "phase-est": _run_phase_est,
    "ortho-test": _run_ortho_test,
    "add-states": _run_add_states,
    "grover": _run_grover,
    "poly-sim": _run_poly_sim,
    "jordan-lie": _run_jordan_lie,
    "universal-demo": _run_universal_demo,
    "tomo-compare": _run_tomo_compare,
}


# ---------------------------------------------------------------------------
# Selftests: module-level exact identities, 1e-12 class


def _selftest_lmr() -> list[tuple[str, bool]]:
    rho = projector(ket(0, 2))
    sigma = np.full((2, 2), 0.5, dtype=complex)
    out = lmr_step(sigma, rho, math.pi / 4.0)
    expect = np.array([[0.75, 0.25 - 0.25j], [0.25 + 0.25j, 0.25]])
    checks = [("lmr_step quarter-swap desk value", bool(np.max(np.abs(out - expect)) < 1e-12))]
    approx, n = lmr_simulate(sigma, rho, LmrConfig(t=0.0, delta=1.0))
    checks.append(("zero-time evolution is identity", bool(np.max(np.abs(approx - sigma)) < 1e-12 and n == 1)))
    return checks


def _selftest_discriminate() -> list[tuple[str, bool]]:
    p_a, p_b = discrimination_rates(0.5, 0.5, "ideal")
    checks = [("complementary rates at eps*t = pi/2", bool(abs(p_a - 1.0) < 1e-12 and abs(p_b) < 1e-12))]
    checks.append(("binomial_tv(1, 0, 1) = 1", bool(abs(binomial_tv(1, 0.0, 1.0) - 1.0) < 1e-12)))
    return checks


def _selftest_phase_est() -> list[tuple[str, bool]]:
    rho = diag_state(0.8)
    ests = phase_estimate(rho, 0.05, "ideal", 7, eigenvector_index=1)
    return [("ideal eigenphase 0.8 recovered", bool(abs(ests[0] - 0.8) <= 0.05))]


def _selftest_ortho() -> list[tuple[str, bool]]:
    verdict = orthogonality_test(ket(0, 2), ket(1, 2), 0.5, 0.1, "ideal", 3)
    return [("orthogonal kets reported orthogonal", verdict == "orthogonal")]


def _selftest_add_states() -> list[tuple[str, bool]]:
    psi1 = ket(0, 2)
    psi2 = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
    out = add_states(psi1, psi2, 0.0, "ideal")
    return [("chi = 0 returns psi1", bool(np.max(np.abs(out - projector(psi1))) < 1e-12))]


def _selftest_grover() -> list[tuple[str, bool]]:
    task = GroverTask(projector(ket(3, 4)), 0.25, 0.1, 0.05)
    verdict = sample_grover(task, ket(0, 4), "ideal", 11)
    return [("lambda = 0 never found", verdict == "not_found")]


def _selftest_poly_sim() -> list[tuple[str, bool]]:
    rng = substream(5, "selftest-poly")
    r1, r2 = random_state(2, 2, rng), random_state(2, 2, rng)
    pair = commutator_gadget(r1, r2, math.pi / 2.0)
    expect = 0.5 * (1j * (r1 @ r2) + dagger(1j * (r1 @ r2)))
    dev = float(np.max(np.abs(pair.hamiltonian() - expect)))
    return [("commutator gadget block identity", dev < 1e-12)]


def _selftest_jordan_lie() -> list[tuple[str, bool]]:
    rng = substream(6, "selftest-jl")
    r1, r2 = random_state(2, 2, rng), random_state(2, 2, rng)
    expr = jordan_lie_expand("12", 1.0 + 0.0j)
    lhs = eval_jordan_lie(expr, (r1, r2))
    rhs = r1 @ r2 + r2 @ r1
    return [("'12' at z=1 is the anticommutator", bool(np.max(np.abs(lhs - rhs)) < 1e-12))]


def _selftest_universal() -> list[tuple[str, bool]]:
    checks = []
    machine = ChainMachine(2, data_state=kron(projector(ket(0, 2)), projector(ket(1, 2))))
    exchange_evolution(machine, 0, 1, math.pi / 4.0)
    swapped = machine.data_state()
    expect = kron(projector(ket(1, 2)), projector(ket(0, 2)))
    checks.append(("t = pi/4 pulse swaps the pair", bool(np.max(np.abs(swapped - expect)) < 1e-12)))
    phi, theta, xi, gamma = euler_decompose(np.array([[1, 1], [1, -1]]) / math.sqrt(2.0))
    from .universal import _paper_x, _paper_z

    recon = _paper_x(phi) @ _paper_z(theta) @ _paper_x(xi)
    target = np.exp(1j * gamma) * np.array([[1, 1], [1, -1]]) / math.sqrt(2.0)
    checks.append(("euler round trip on Hadamard", bool(np.max(np.abs(recon - target)) < 1e-10)))
    return checks


def _selftest_tomo() -> list[tuple[str, bool]]:
    value = tomography_bound(2, 1, 1.0, 0.1)
    expect = 2 * 1 * (0.9**2) / (0.01 * math.log(20.0)) + 100.0
    return [("formula spot value", bool(abs(value - expect) < 1e-9))]


_SELFTESTS = {
    "lmr-converge": _selftest_lmr,
    "discriminate": _selftest_discriminate,
    "phase-est": _selftest_phase_est,
    "ortho-test": _selftest_ortho,
    "add-states": _selftest_add_states,
    "grover": _selftest_grover,
    "poly-sim": _selftest_poly_sim,
    "jordan-lie": _selftest_jordan_lie,
    "universal-demo": _selftest_universal,
    "tomo-compare": _selftest_tomo,
}


# ---------------------------------------------------------------------------
# Argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # machine-readable exit 2
        print(json.dumps({"error": message, "exit": 2}))
        raise SystemExit(2)


def _build_parser() -> _Parser:
    parser = _Parser(prog="dmexp", description=__doc__)
    parser.add_argument("--version", action="version", version=f"dmexp {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=None,
                        help="RNG seed (default: DMEXP_SEED env var)")
        sp.add_argument("--out", default=None, help="report file path")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--selftest", action="store_true",
                        help="run the module's exact-identity checks and exit")

    sp = subs.add_parser("lmr-converge", help="error-vs-n curve and fitted slope")
    sp.add_argument("--dim", type=int, default=2)
    sp.add_argument("--t", type=float, default=math.pi)
    sp.add_argument("--ns", default="16,32,64,128,256,512,1024")
    common(sp)

    sp = subs.add_parser("discriminate", help="two-state discrimination success rate")
    sp.add_argument("--x", type=float, default=0.5)
    sp.add_argument("--eps", type=float, required=False, default=0.5)
    sp.add_argument("--eta", type=float, default=None)
    sp.add_argument("--protocol", choices=("ideal", "lmr"), default="ideal")
    sp.add_argument("--delta", type=float, default=1.0 / 3.0)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--min-success", type=float, default=None)
    common(sp)

    sp = subs.add_parser("phase-est", help="iterative phase estimation")
    sp.add_argument("--diag", default="0.8,0.2", help="diagonal weights of rho")
    sp.add_argument("--precision", type=float, default=0.1)
    sp.add_argument("--protocol", choices=("ideal", "lmr"), default="ideal")
    sp.add_argument("--mode", choices=("eigenvector", "spectrum"), default="eigenvector")
    sp.add_argument("--index", type=int, default=-1, help="eigenvector index, -1 for all")
    sp.add_argument("--runs", type=int, default=1)
    sp.add_argument("--reps", type=int, default=32)
    sp.add_argument("--expect", type=float, default=None)
    common(sp)

    sp = subs.add_parser("ortho-test", help="orthogonality vs overlap decision")
    sp.add_argument("--pair", choices=("orthogonal", "overlapping"), default="orthogonal")
    sp.add_argument("--w", type=float, default=0.5)
    sp.add_argument("--eps-fail", type=float, default=0.1)
    sp.add_argument("--protocol", choices=("ideal", "lmr"), default="ideal")
    sp.add_argument("--expect", choices=("orthogonal", "overlapping"), default=None)
    common(sp)

    sp = subs.add_parser("add-states", help="coherent |0>+|+> addition fidelity")
    sp.add_argument("--chi", type=float, default=None, help="rotation amount (default Delta/2)")
    sp.add_argument("--protocol", choices=("ideal", "lmr"), default="ideal")
    sp.add_argument("--delta", type=float, default=0.01)
    sp.add_argument("--min-fidelity", type=float, default=None)
    common(sp)

    sp = subs.add_parser("grover", help="sample-based search verdict rate")
    sp.add_argument("--lam", type=float, default=0.25, help="start-target overlap lambda")
    sp.add_argument("--w", type=float, default=0.25)
    sp.add_argument("--eps-fail", type=float, default=0.1)
    sp.add_argument("--protocol", choices=("ideal", "lmr"), default="ideal")
    sp.add_argument("--runs", type=int, default=20)
    sp.add_argument("--expect", choices=("found", "not_found"), default=None)
    common(sp)

    sp = subs.add_parser("poly-sim", help="polynomial simulation vs oracle")
    sp.add_argument("--cases", type=int, default=5)
    sp.add_argument("--n-states", type=int, default=3)
    sp.add_argument("--n-terms", type=int, default=2)
    sp.add_argument("--max-k", type=int, default=2)
    sp.add_argument("--t", type=float, default=1.0)
    sp.add_argument("--delta", type=float, default=0.02)
    common(sp)

    sp = subs.add_parser("jordan-lie", help="expansion round-trip deviation table")
    sp.add_argument("--cases", type=int, default=50)
    sp.add_argument("--max-k", type=int, default=4)
    common(sp)

    sp = subs.add_parser("universal-demo", help="chain-machine circuit fidelity and cost")
    sp.add_argument("--circuit", default="bell", help="'bell', 'x', or a circuit JSON path")
    sp.add_argument("--delta", type=float, default=0.01, help="per-gate error budget")
    sp.add_argument("--depolarize", type=float, default=0.0)
    sp.add_argument("--min-fidelity", type=float, default=None)
    common(sp)

    sp = subs.add_parser("tomo-compare", help="protocol budget vs tomography bound")
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--r", type=int, default=1)
    sp.add_argument("--t", type=float, default=1.0)
    sp.add_argument("--deltas", default="0.1,0.01,0.001")
    common(sp)

    return parser


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("DMEXP_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise _CliError(f"DMEXP_SEED must be an integer, got {env!r}") from exc
    if args.subcommand in STOCHASTIC:
        raise _CliError(f"{args.subcommand} is stochastic: pass --seed or set DMEXP_SEED")
    return 0


def run(spec: RunSpec, args) -> int:
    """Execute a resolved spec: compute, write the report, print a summary."""
    start = time.perf_counter()
    columns, rows, summary, code = _HANDLERS[spec.subcommand](args, spec.seed)
    wall = time.perf_counter() - start
    _write_report(spec, columns, rows, summary, wall)
    print(json.dumps({"subcommand": spec.subcommand, "summary": summary,
                      "report": spec.output_path, "exit": code}, sort_keys=True))
    return code


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        if args.selftest:
            checks = _SELFTESTS[args.subcommand]()
            for name, ok in checks:
                print(f"selftest {args.subcommand}: {name}: {'pass' if ok else 'FAIL'}")
            return 0 if all(ok for _, ok in checks) else 3
        seed = _resolve_seed(args)
        out = args.out or f"dmexp-{args.subcommand}.{args.format}"
        params = {k: v for k, v in vars(args).items()
                  if k not in ("subcommand", "seed", "out", "format", "selftest")
                  and not callable(v)}
        spec = RunSpec(subcommand=args.subcommand, params=params, seed=seed,
                       output_path=out, format=args.format)
        return run(spec, args)
    except (_CliError, ValueError) as exc:
        print(json.dumps({"error": str(exc), "exit": 2}))
        return 2


if __name__ == "__main__":
    sys.exit(main())
