"""Chain-of-qubits computer driven by exchange pulses and resource streams.

The machine holds data qubits q0..q_{N-1} on a line plus one resource
qubit q_* attached to position 0.  The only physical primitives are
Heisenberg exchange pulses between chain-adjacent sites and loads of
fresh |0> or |+> resource states onto q_*.  Everything else is
synthesized: full SWAPs (t = pi/4 pulses) move logical qubits along the
chain, single-qubit rotations are streamed as n tiny pulses against
fresh resources (the sampling protocol with the resource state playing
the program role), and CNOT reduces to two t = pi/8 pulses plus
single-qubit corrections.

Internally the state is a density matrix over tensor factors
(q_*, position 0, ..., position N-1); `layout` maps positions to
logical qubit ids as routing permutes them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    ComplexMatrix,
    DensityMatrix,
    assert_unitary,
    clip_to_density,
    dagger,
    kron,
    permute_subsystems,
    swap_operator,
    validate_density_matrix,
)
from .lmr import LmrConfig, sample_budget

STAR = -1  # chain slot of the resource qubit (adjacent to position 0 only)

_TWO_PI = 2.0 * math.pi
_P0 = np.diag([1.0, 0.0]).astype(complex)
_PLUS = np.full((2, 2), 0.5, dtype=complex)
_SWAP4 = swap_operator(2)
_FRESH = {"zero": _P0, "plus": _PLUS}


def _exchange_unitary(t: float) -> ComplexMatrix:
    """e^{-it H} on two qubits, H = XX + YY + ZZ = 2S - 1."""
    return np.exp(1j * t) * (math.cos(2.0 * t) * np.eye(4) - 1j * math.sin(2.0 * t) * _SWAP4)


@dataclass(frozen=True)
class RotationRequest:
    """One synthesized rotation e^{-i angle P} on a data qubit.

    P is |0><0| for axis Z and |+><+| for axis X; angle is stored
    normalized to [0, 2pi).
    """

    qubit: int
    axis: str
    angle: float
    delta: float

    def __post_init__(self) -> None:
        if self.qubit < 0:
            raise ValueError(f"qubit index must be nonnegative, got {self.qubit}")
        if self.axis not in ("Z", "X"):
            raise ValueError(f"axis must be 'Z' or 'X', got {self.axis!r}")
        if not math.isfinite(self.angle):
            raise ValueError(f"angle must be finite, got {self.angle}")
        object.__setattr__(self, "angle", float(self.angle) % _TWO_PI)
        if not 0.0 < self.delta <= 1.0:
            raise ValueError(f"delta must be in (0, 1], got {self.delta}")


class ChainMachine:
    """Single-owner mutable simulation of the chain computer.

    gate_log entries are dicts with op "pulse" or "load" only; the "n"
    field run-length compresses the load/pulse alternation inside one
    streamed rotation (n loads interleaved with n identical pulses).
    Global phase factors shed by pulses accumulate in `global_phase`
    rather than the density matrix.
    """

    def __init__(self, n_qubits: int, data_state: DensityMatrix | None = None,
                 depolarize: float = 0.0) -> None:
        if n_qubits < 1:
            raise ValueError(f"need at least one data qubit, got {n_qubits}")
        if not 0.0 <= depolarize <= 1.0:
            raise ValueError(f"depolarize must be in [0, 1], got {depolarize}")
        self.n_qubits = n_qubits
        self.depolarize = depolarize
        dim = 2**n_qubits
        if data_state is None:
            data = np.zeros((dim, dim), dtype=complex)
            data[0, 0] = 1.0
        else:
            data = np.asarray(data_state, dtype=complex)
            validate_density_matrix(data, "data_state")
            if data.shape[0] != dim:
                raise ValueError(f"data_state dim {data.shape[0]} != 2^{n_qubits}")
        self.state: DensityMatrix = kron(_P0, data)
        self.layout: list[int] = list(range(n_qubits))
        self.gate_log: list[dict] = []
        self.resource_counter: dict[str, int] = {"zero": 0, "plus": 0}
        self.global_phase: float = 0.0

    def position_of(self, qubit: int) -> int:
        return self.layout.index(qubit)

    def data_state(self) -> DensityMatrix:
        """Data-register state in logical qubit order (q_* traced out)."""
        dim = 2**self.n_qubits
        block = self.state.reshape(2, dim, 2, dim)
        traced = block[0, :, 0, :] + block[1, :, 1, :]
        if self.n_qubits > 1:
            perm = tuple(self.position_of(q) for q in range(self.n_qubits))
            traced = permute_subsystems(traced, (2,) * self.n_qubits, perm)
        return clip_to_density(traced)

    # -- internal state plumbing -------------------------------------------

    def _apply_full(self, u: ComplexMatrix) -> None:
        self.state = u @ self.state @ dagger(u)

    def _replace_star(self, fresh: ComplexMatrix) -> None:
        dim = 2**self.n_qubits
        block = self.state.reshape(2, dim, 2, dim)
        traced = block[0, :, 0, :] + block[1, :, 1, :]
        self.state = np.kron(fresh, traced)


def _slot_factor(machine: ChainMachine, slot: int) -> int:
    """Tensor factor index of a chain slot (STAR -> 0, position p -> p+1)."""
    if slot == STAR:
        return 0
    if not 0 <= slot < machine.n_qubits:
        raise ValueError(f"chain position {slot} out of range for {machine.n_qubits} qubits")
    return slot + 1


def _embed_pair(machine: ChainMachine, low_factor: int, u4: ComplexMatrix) -> ComplexMatrix:
    left = 2**low_factor
    right = 2 ** (machine.n_qubits + 1) // (left * 4)
    return kron(np.eye(left), u4, np.eye(right))


def exchange_evolution(machine: ChainMachine, i: int, j: int, t: float) -> ChainMachine:
    """Exact pulse e^{-it H_ij} between adjacent chain slots.

    Slots are chain positions, with STAR (=-1) naming the resource
    qubit; the admissible pairs are (STAR, 0) and (p, p+1).  The pulse
    equals e^{it} e^{-2it S}; the scalar e^{it} goes to global_phase.
    """
    lo, hi = min(i, j), max(i, j)
    fa = _slot_factor(machine, lo)
    fb = _slot_factor(machine, hi)
    if fb - fa != 1:
        raise ValueError(f"slots {i} and {j} are not chain-adjacent")
    machine._apply_full(_embed_pair(machine, fa, _exchange_unitary(t)))
    machine.global_phase = (machine.global_phase + t) % _TWO_PI
    machine.gate_log.append({"op": "pulse", "i": lo, "j": hi, "t": t, "n": 1})
    return machine


def resource_rotation(machine: ChainMachine, req: RotationRequest) -> ChainMachine:
    """Stream e^{-i angle P} onto the qubit at position 0.

    Runs n = sample_budget(angle, delta) cycles of (load fresh resource
    onto q_*, pulse q_* <-> position 0 for time angle/2n), which is the
    sampling protocol with program state |0><0| (axis Z) or |+><+|
    (axis X).  The resulting channel on the target is within delta in
    trace norm of conjugation by e^{-i angle P}; the machine's
    depolarize knob mixes each loaded resource with 1/2.
    """
    if machine.position_of(req.qubit) != 0:
        raise ValueError(f"qubit {req.qubit} is at position {machine.position_of(req.qubit)}, "
                         "rotations act on position 0 only")
    which = "zero" if req.axis == "Z" else "plus"
    fresh = _FRESH[which]
    if machine.depolarize > 0.0:
        fresh = (1.0 - machine.depolarize) * fresh + machine.depolarize * np.eye(2) / 2.0
    n = sample_budget(LmrConfig(t=req.angle, delta=req.delta))
    tau = req.angle / n / 2.0
    pulse = _embed_pair(machine, 0, _exchange_unitary(tau))
    pulse_dag = dagger(pulse)
    dim = 2**machine.n_qubits

    def step(state: ComplexMatrix) -> ComplexMatrix:
        block = state.reshape(2, dim, 2, dim)
        state = np.kron(fresh, block[0, :, 0, :] + block[1, :, 1, :])
        return pulse @ state @ pulse_dag

    if n <= 128:
        state = machine.state
        for _ in range(n):
            state = step(state)
    else:
        # the step is a fixed linear map on the full state, so n
        # applications equal one superoperator matrix power (identical
        # output, log n cost)
        full = 2 * dim
        basis = np.zeros((full * full, full, full), dtype=complex)
        idx = np.arange(full * full)
        basis[idx, idx // full, idx % full] = 1.0
        superop = np.array([step(b).reshape(-1) for b in basis]).T
        state = (np.linalg.matrix_power(superop, n) @ machine.state.reshape(-1)).reshape(full, full)
    machine.state = clip_to_density(state)
    machine.global_phase = (machine.global_phase + n * tau) % _TWO_PI
    machine.resource_counter[which] += n
    machine.gate_log.append({"op": "load", "which": which, "n": n})
    machine.gate_log.append({"op": "pulse", "i": STAR, "j": 0, "t": tau, "n": n})
    return machine


def route(machine: ChainMachine, qubit: int, to_position: int) -> tuple[ChainMachine, int]:
    """Move a logical qubit to a chain position with full SWAP pulses.

    Each hop is one t = pi/4 pulse (a SWAP up to global phase) plus the
    matching relabel of `layout`, recorded on the pulse log entry.
    Returns the machine and the swap count, which equals the chain
    distance exactly.
    """
    if qubit not in machine.layout:
        raise ValueError(f"unknown qubit {qubit}")
    if not 0 <= to_position < machine.n_qubits:
        raise ValueError(f"position {to_position} out of range")
    swaps = 0
    cur = machine.position_of(qubit)
    while cur != to_position:
        nxt = cur + (1 if to_position > cur else -1)
        lo = min(cur, nxt)
        fa = _slot_factor(machine, lo)
        machine._apply_full(_embed_pair(machine, fa, _exchange_unitary(math.pi / 4.0)))
        machine.global_phase = (machine.global_phase + math.pi / 4.0) % _TWO_PI
        machine.gate_log.append({
            "op": "pulse", "i": lo, "j": lo + 1, "t": math.pi / 4.0, "n": 1,
            "relabel": (machine.layout[lo], machine.layout[lo + 1]),
        })
        machine.layout[lo], machine.layout[lo + 1] = machine.layout[lo + 1], machine.layout[lo]
        cur = nxt
        swaps += 1
    return machine, swaps


# ---------------------------------------------------------------------------
# Euler decomposition in the X-Z-X convention


def _paper_x(angle: float) -> ComplexMatrix:
    """X_angle = cos(angle/2) 1 + i sin(angle/2) X."""
    c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
    return np.array([[c, 1j * s], [1j * s, c]])


def _paper_z(angle: float) -> ComplexMatrix:
    """Z_angle = cos(angle/2) 1 + i sin(angle/2) Z."""
    return np.diag([np.exp(1j * angle / 2.0), np.exp(-1j * angle / 2.0)])


def _euler_candidate(v: ComplexMatrix) -> tuple[float, float, float]:
    """Angles for v in SU(2): v = X_phi Z_theta X_xi.

    Writing a = (phi+xi)/2, b = (phi-xi)/2 the product has
    v00 = cos(theta/2) e^{ia} ... in the combinations
    z+ = Re v00 + i Im v01 = cos(theta/2) e^{ia} and
    z- = Im v00 + i Re v01 = sin(theta/2) e^{ib}.
    """
    z_plus = complex(v[0, 0].real, v[0, 1].imag)
    z_minus = complex(v[0, 0].imag, v[0, 1].real)
    half_theta = math.atan2(abs(z_minus), abs(z_plus))
    if abs(z_minus) < 1e-9:
        # pure X rotation: canonical xi = 0
        a = np.angle(z_plus)
        return (2.0 * a) % _TWO_PI, 2.0 * half_theta, 0.0
    if abs(z_plus) < 1e-9:
        b = np.angle(z_minus)
        return b % _TWO_PI, 2.0 * half_theta, (-b) % _TWO_PI
    a = np.angle(z_plus)
    b = np.angle(z_minus)
    return (a + b) % _TWO_PI, 2.0 * half_theta, (a - b) % _TWO_PI


def euler_decompose(u: ComplexMatrix) -> tuple[float, float, float, float]:
    """Angles (phi, theta, xi, gamma) with X_phi Z_theta X_xi = e^{i gamma} u.

    Canonical branch: theta in [0, pi], phi and xi in [0, 2pi), pure Z
    rotations returned as (0, theta, 0), pure X rotations as
    (phi, 0, 0).  The reconstruction is verified to 1e-10; the
    half-angle parametrization covers SU(2) only up to sign, so both
    branches of gamma = -arg(det u)/2 are tried.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {u.shape}")
    assert_unitary(u, "u")
    gamma0 = -0.5 * float(np.angle(u[0, 0] * u[1, 1] - u[0, 1] * u[1, 0]))
    diagonal = abs(u[0, 1]) + abs(u[1, 0]) <= 1e-12
    for gamma in (gamma0, gamma0 + math.pi):
        v = np.exp(1j * gamma) * u
        if diagonal:
            phi, theta, xi = 0.0, (2.0 * float(np.angle(v[0, 0]))) % _TWO_PI, 0.0
        else:
            phi, theta, xi = _euler_candidate(v)
        recon = _paper_x(phi) @ _paper_z(theta) @ _paper_x(xi)
        if np.max(np.abs(recon - v)) <= 1e-10:
            return phi, theta, xi, gamma % _TWO_PI
    raise AssertionError("euler decomposition failed to reconstruct within 1e-10")


# ---------------------------------------------------------------------------
# Circuit execution

_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)

# CZ from two half-swap pulses, verified against the exact matrices
# (V(pi/4) A_c(pi) V(pi/4) = diag(-i, 1, -1, i), then Z corrections):
#   CZ ~ A_c(3pi/2) B_t(pi/2) V(pi/4) A_c(pi) V(pi/4)
# with V(a) = e^{-i a S} (one t = a/2 exchange pulse up to phase) and
# A(b)/B(b) = e^{-i b |1><1|} on control/target, which is a Z-axis
# resource rotation by (-b) mod 2pi up to phase.  CNOT adds Hadamards
# on the target.  Order below: middle A_c(pi), final A_c(3pi/2),
# final B_t(pi/2).
_CNOT_CORRECTIONS = (math.pi, 3.0 * math.pi / 2.0, math.pi / 2.0)


def _apply_single(machine: ChainMachine, qubit: int, u: ComplexMatrix, delta: float) -> int:
    """Route, decompose, and stream one single-qubit gate; returns swap count."""
    _, swaps = route(machine, qubit, 0)
    phi, theta, xi, _ = euler_decompose(u)
    for angle, axis in ((xi, "X"), (theta, "Z"), (phi, "X")):
        resource_rotation(machine, RotationRequest(qubit=qubit, axis=axis,
                                                   angle=(-angle) % _TWO_PI, delta=delta / 3.0))
    return swaps


def _apply_cnot(machine: ChainMachine, control: int, target: int, delta: float) -> int:
    """CNOT via two t = pi/8 pulses plus nine streamed rotations."""
    swaps = _apply_single(machine, target, _HADAMARD, delta / 3.0)
    _, s = route(machine, control, 0)
    swaps += s
    _, s = route(machine, target, 1)
    swaps += s
    sub = delta / 9.0
    exchange_evolution(machine, 0, 1, math.pi / 8.0)
    resource_rotation(machine, RotationRequest(qubit=control, axis="Z",
                                               angle=(-_CNOT_CORRECTIONS[0]) % _TWO_PI, delta=sub))
    exchange_evolution(machine, 0, 1, math.pi / 8.0)
    resource_rotation(machine, RotationRequest(qubit=control, axis="Z",
                                               angle=(-_CNOT_CORRECTIONS[1]) % _TWO_PI, delta=sub))
    _, s = route(machine, target, 0)
    swaps += s
    resource_rotation(machine, RotationRequest(qubit=target, axis="Z",
                                               angle=(-_CNOT_CORRECTIONS[2]) % _TWO_PI, delta=sub))
    swaps += _apply_single(machine, target, _HADAMARD, delta / 3.0)
    return swaps


def _validate_gate(gate: dict, n_qubits: int) -> None:
    kind = gate.get("gate")
    if kind == "u":
        q = gate.get("q")
        if not isinstance(q, (int, np.integer)) or not 0 <= q < n_qubits:
            raise ValueError(f"bad qubit index in gate {gate!r}")
        m = np.asarray(gate.get("matrix"), dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"gate matrix must be 2x2, got {m.shape}")
    elif kind == "cnot":
        c, t = gate.get("c"), gate.get("t")
        for idx in (c, t):
            if not isinstance(idx, (int, np.integer)) or not 0 <= idx < n_qubits:
                raise ValueError(f"bad qubit index in gate {gate!r}")
        if c == t:
            raise ValueError("cnot control and target must differ")
    else:
        raise ValueError(f"unknown gate kind {kind!r}")


def run_circuit(machine: ChainMachine, circuit: list[dict],
                per_gate_delta: float) -> tuple[DensityMatrix, dict]:
    """Execute a circuit of single-qubit gates and CNOTs on the machine.

    Each single-qubit gate becomes a route to position 0 plus three
    streamed rotations at delta/3 each; each CNOT becomes two exact
    t = pi/8 pulses plus nine rotations.  The final data state is
    within the sum of per-gate deltas (trace norm) of the ideal circuit
    output.  The cost report carries pulse and resource tallies plus
    the predicted O(N (M+M')^2) resource shape.
    """
    if not 0.0 < per_gate_delta <= 1.0:
        raise ValueError(f"per_gate_delta must be in (0, 1], got {per_gate_delta}")
    for gate in circuit:
        _validate_gate(gate, machine.n_qubits)
    zero0 = machine.resource_counter["zero"]
    plus0 = machine.resource_counter["plus"]
    log0 = len(machine.gate_log)
    singles = 0
    cnots = 0
    swap_pulses = 0
    for gate in circuit:
        if gate["gate"] == "u":
            singles += 1
            swap_pulses += _apply_single(machine, gate["q"],
                                         np.asarray(gate["matrix"], dtype=complex), per_gate_delta)
        else:
            cnots += 1
            swap_pulses += _apply_cnot(machine, gate["c"], gate["t"], per_gate_delta)
    zero_used = machine.resource_counter["zero"] - zero0
    plus_used = machine.resource_counter["plus"] - plus0
    pulses = sum(entry["n"] for entry in machine.gate_log[log0:] if entry["op"] == "pulse")
    report = {
        "exchange_pulses": int(pulses),
        "swap_pulses": int(swap_pulses),
        "resource_zero": int(zero_used),
        "resource_plus": int(plus_used),
        "resource_total": int(zero_used + plus_used),
        "single_qubit_gates": singles,
        "cnot_gates": cnots,
        "predicted_resource_shape": machine.n_qubits * (singles + cnots) ** 2,
        "global_phase": float(machine.global_phase),
    }
    return machine.data_state(), report


def circuit_unitary(circuit: list[dict], n_qubits: int) -> ComplexMatrix:
    """Ideal-circuit oracle: the exact unitary the gate list describes."""
    dim = 2**n_qubits
    total = np.eye(dim, dtype=complex)
    for gate in circuit:
        _validate_gate(gate, n_qubits)
        if gate["gate"] == "u":
            ops = [np.eye(2, dtype=complex)] * n_qubits
            ops[gate["q"]] = np.asarray(gate["matrix"], dtype=complex)
            full = ops[0] if n_qubits == 1 else kron(*ops)
        else:
            zeros = [np.eye(2, dtype=complex)] * n_qubits
            ones = [np.eye(2, dtype=complex)] * n_qubits
            zeros[gate["c"]] = np.diag([1.0, 0.0]).astype(complex)
            ones[gate["c"]] = np.diag([0.0, 1.0]).astype(complex)
            ones[gate["t"]] = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
            full = kron(*zeros) + kron(*ones)
        total = full @ total
    return total


def circuit_from_json(obj: list) -> list[dict]:
    """Parse the circuit JSON format.

    Single-qubit gates are {"gate": "u", "q": i, "matrix": [[..]]} with
    matrix entries either plain reals or [re, im] pairs; CNOTs are
    {"gate": "cnot", "c": i, "t": j}.
    """
    if not isinstance(obj, list):
        raise ValueError("circuit JSON must be a list of gate objects")
    circuit = []
    for raw in obj:
        if not isinstance(raw, dict):
            raise ValueError(f"gate entry must be an object, got {raw!r}")
        kind = raw.get("gate")
        if kind == "u":
            rows = raw.get("matrix")
            if not isinstance(rows, list) or len(rows) != 2:
                raise ValueError("matrix must be a 2x2 nested list")
            m = np.zeros((2, 2), dtype=complex)
            for i, row in enumerate(rows):
                if not isinstance(row, list) or len(row) != 2:
                    raise ValueError("matrix must be a 2x2 nested list")
                for j, cell in enumerate(row):
                    if isinstance(cell, (int, float)):
                        m[i, j] = cell
                    elif isinstance(cell, list) and len(cell) == 2:
                        m[i, j] = complex(cell[0], cell[1])
                    else:
                        raise ValueError(f"matrix entry must be a number or [re, im], got {cell!r}")
            circuit.append({"gate": "u", "q": raw.get("q"), "matrix": m})
        elif kind == "cnot":
            circuit.append({"gate": "cnot", "c": raw.get("c"), "t": raw.get("t")})
        else:
            raise ValueError(f"unknown gate kind {kind!r}")
    return circuit


def circuit_to_json(circuit: list[dict]) -> list[dict]:
    """Inverse of circuit_from_json ([re, im] matrix entries)."""
    out = []
    for gate in circuit:
        if gate["gate"] == "u":
            m = np.asarray(gate["matrix"], dtype=complex)
            out.append({"gate": "u", "q": int(gate["q"]),
                        "matrix": [[[float(c.real), float(c.imag)] for c in row] for row in m]})
        else:
            out.append({"gate": "cnot", "c": int(gate["c"]), "t": int(gate["t"])})
    return out
