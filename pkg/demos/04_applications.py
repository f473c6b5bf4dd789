"""Protocols built on sample-based evolution: spectroscopy, addition, search.

Four experiments, each runnable with copies of the relevant states as
the only access: eigenvalue estimation of an unknown density matrix,
coherent addition of two pure states, deciding orthogonality, and
Grover search from copies of the start state.
"""

import math

import numpy as np

from dmexp import (
    GroverTask,
    LmrConfig,
    add_states,
    addition_target,
    diag_state,
    ket,
    orthogonality_test,
    phase_estimate,
    projector,
    pure_fidelity,
    sample_grover,
)


def main():
    print("== eigenvalue spectroscopy on rho = diag(0.8, 0.2) ==")
    rho = diag_state(0.8)
    ests = phase_estimate(rho, 0.05, "lmr", seed=11)
    print(f"eigenvector mode, precision 0.05: estimates {[f'{e:.3f}' for e in ests]}")
    ests = phase_estimate(rho, 0.1, "ideal", seed=11, mode="spectrum", runs=6)
    print(f"spectrum mode, 6 runs: measurement back-action collapses each run onto")
    print(f"one eigenvalue: {[f'{e:.3f}' for e in ests]}")

    print()
    print("== coherent state addition |0> + |+> ==")
    psi1 = ket(0, 2)
    psi2 = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2)
    big_delta = math.acos(abs(np.vdot(psi1, psi2)))
    budget = LmrConfig(t=1.0, delta=0.01)
    for label, chi in (("chi=0 (psi1)", 0.0), ("chi=Delta/2 (sum)", big_delta / 2),
                       ("chi=Delta (psi2)", big_delta)):
        out = add_states(psi1, psi2, chi, "lmr", budget)
        fid = pure_fidelity(addition_target(psi1, psi2, chi), out)
        print(f"{label:<18} fidelity with target: {fid:.4f}")

    print()
    print("== orthogonality testing ==")
    for label, other in (("orthogonal pair", ket(1, 2)),
                         ("overlap w=0.5", (ket(0, 2) + ket(1, 2)) / math.sqrt(2))):
        verdict = orthogonality_test(ket(0, 2), other, 0.5, 0.05, "ideal", seed=4)
        print(f"{label:<16} -> {verdict}")

    print()
    print("== sample-based Grover ==")
    w = 0.25
    task = GroverTask(target_projector=projector(ket(3, 4)), w=w, epsilon_fail=0.1,
                      state_budget_delta=math.sqrt(w) / 10)
    marked = math.sqrt(w) * ket(3, 4) + math.sqrt(1 - w) * ket(0, 4)
    for label, start in (("lambda = 1/4", marked), ("lambda = 0", ket(0, 4))):
        verdicts = [sample_grover(task, start, "lmr", seed) for seed in range(10)]
        found = verdicts.count("found")
        print(f"{label:<12} found in {found}/10 runs")


if __name__ == "__main__":
    main()
