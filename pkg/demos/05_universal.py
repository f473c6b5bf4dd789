"""A universal computer from exchange pulses and resource states.

Qubits sit on a chain next to a star site.  The only operations are
Heisenberg exchange pulses between neighbors and loading fresh |0> or
|+> qubits at the star.  Partial swaps against those resource states
synthesize Z- and X-axis rotations, Euler angles give arbitrary
single-qubit gates, and a corrected CZ construction gives CNOT; swap
routing moves logical qubits to the star as needed.
"""

import math

import numpy as np

from dmexp import (
    ChainMachine,
    RotationRequest,
    euler_decompose,
    ideal_conjugation,
    ket,
    projector,
    pure_fidelity,
    resource_rotation,
    run_circuit,
    trace_distance,
)

H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def main():
    print("== one rotation, error vs resources consumed ==")
    data = projector(np.array([1, 1], dtype=complex) / math.sqrt(2))
    ideal = ideal_conjugation(np.diag([1.0, 0.0]).astype(complex), math.pi / 2, data)
    print(f"{'delta':>8}  {'|0> qubits':>10}  {'trace distance':>14}")
    for delta in (0.04, 0.01, 0.0025):
        m = ChainMachine(1, data_state=data)
        resource_rotation(m, RotationRequest(qubit=0, axis="Z", angle=math.pi / 2, delta=delta))
        err = trace_distance(m.data_state(), ideal)
        print(f"{delta:>8}  {m.resource_counter['zero']:>10}  {err:>14.3e}")

    print()
    print("== Euler angles for an arbitrary gate ==")
    phi, theta, xi, gamma = euler_decompose(H)
    print(f"Hadamard = e^(-i gamma) X(phi) Z(theta) X(xi) with "
          f"phi={phi:.4f} theta={theta:.4f} xi={xi:.4f} gamma={gamma:.4f}")

    print()
    print("== Bell circuit on the chain ==")
    circuit = [{"gate": "u", "q": 0, "matrix": H}, {"gate": "cnot", "c": 0, "t": 1}]
    final, report = run_circuit(ChainMachine(2), circuit, per_gate_delta=0.01)
    bell = (np.kron(ket(0, 2), ket(0, 2)) + np.kron(ket(1, 2), ket(1, 2))) / math.sqrt(2)
    print(f"fidelity with the Bell state: {pure_fidelity(bell, final):.4f}")
    for key in ("exchange_pulses", "swap_pulses", "resource_zero", "resource_plus",
                "resource_total", "predicted_resource_shape"):
        print(f"  {key}: {report[key]}")

    print()
    print("== cost scales as (gates / per-gate error)^2 ==")
    print(f"{'gates':>6}  {'resource_total':>14}  {'total / gates^2':>15}")
    for reps in (1, 2, 4):
        gates = circuit * reps
        g = len(gates)
        _, rep = run_circuit(ChainMachine(2), gates, per_gate_delta=0.2 / g)
        print(f"{g:>6}  {rep['resource_total']:>14}  {rep['resource_total'] / g**2:>15.0f}")


if __name__ == "__main__":
    main()
