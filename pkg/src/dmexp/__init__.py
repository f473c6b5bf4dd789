"""Desk-scale numerical toolkit for sample-based Hamiltonian simulation.

Dense-matrix implementation of the partial-swap sampling protocol (the
channel that consumes copies of an unknown state rho to enact
e^{-i rho t}), its controlled and signed generalizations, gadget
circuits for Hermitian polynomials of states, protocol-level
experiments (discrimination, phase estimation, orthogonality testing,
state addition, sample-based search), and a chain-of-qubits universal
computation model, all verified against exact matrix-exponential
oracles.
"""

from .applications import (
    DiscriminationTask,
    ExperimentReport,
    GroverTask,
    add_states,
    addition_target,
    binomial_tv,
    diag_state,
    discriminate,
    discrimination_rates,
    discrimination_trials,
    orthogonality_test,
    phase_estimate,
    sample_grover,
    tomography_bound,
)
from .gadgets import (
    AntiComm,
    BlockPair,
    HermitianPolynomial,
    IComm,
    Leaf,
    PolynomialTerm,
    Scale,
    Sum,
    commutator_gadget,
    eval_jordan_lie,
    jordan_lie_expand,
    mix_linear_combination,
    polynomial_gadget,
    polynomial_matrix,
    signed_lmr_simulate,
    signed_lmr_step,
    simulate_polynomial,
)
from .linalg import (
    clip_to_density,
    cyclic_shift,
    dagger,
    hadamard_series,
    herm_exp,
    is_density_matrix,
    ket,
    kron,
    partial_trace,
    permute_subsystems,
    projector,
    pure_fidelity,
    random_pure_state,
    random_state,
    state_from_json,
    state_to_json,
    swap_operator,
    trace_distance,
    unitary_diamond_distance,
    validate_density_matrix,
    validate_pure_state,
)
from .lmr import (
    LmrConfig,
    controlled_lmr_simulate,
    controlled_lmr_step,
    ideal_conjugation,
    linear_channel_power,
    lmr_simulate,
    lmr_step,
    sample_budget,
)
from .rng import substream, substream_key
from .universal import (
    STAR,
    ChainMachine,
    RotationRequest,
    circuit_from_json,
    circuit_to_json,
    circuit_unitary,
    euler_decompose,
    exchange_evolution,
    resource_rotation,
    route,
    run_circuit,
)

__version__ = "0.1.0"

__all__ = [
    "AntiComm",
    "BlockPair",
    "ChainMachine",
    "DiscriminationTask",
    "ExperimentReport",
    "GroverTask",
    "HermitianPolynomial",
    "IComm",
    "Leaf",
    "LmrConfig",
    "PolynomialTerm",
    "RotationRequest",
    "STAR",
    "Scale",
    "Sum",
    "add_states",
    "addition_target",
    "binomial_tv",
    "circuit_from_json",
    "circuit_to_json",
    "circuit_unitary",
    "clip_to_density",
    "commutator_gadget",
    "controlled_lmr_simulate",
    "controlled_lmr_step",
    "cyclic_shift",
    "dagger",
    "diag_state",
    "discriminate",
    "discrimination_rates",
    "discrimination_trials",
    "euler_decompose",
    "eval_jordan_lie",
    "exchange_evolution",
    "hadamard_series",
    "herm_exp",
    "ideal_conjugation",
    "is_density_matrix",
    "jordan_lie_expand",
    "ket",
    "kron",
    "linear_channel_power",
    "lmr_simulate",
    "lmr_step",
    "mix_linear_combination",
    "orthogonality_test",
    "partial_trace",
    "permute_subsystems",
    "phase_estimate",
    "polynomial_gadget",
    "polynomial_matrix",
    "projector",
    "pure_fidelity",
    "random_pure_state",
    "random_state",
    "resource_rotation",
    "route",
    "run_circuit",
    "sample_budget",
    "sample_grover",
    "signed_lmr_simulate",
    "signed_lmr_step",
    "simulate_polynomial",
    "state_from_json",
    "state_to_json",
    "substream",
    "substream_key",
    "swap_operator",
    "tomography_bound",
    "trace_distance",
    "unitary_diamond_distance",
    "validate_density_matrix",
    "validate_pure_state",
]
