"""Sample-based simulation of e^{-i rho t} by repeated partial swaps.

The protocol consumes n fresh copies of a program state rho and applies
the partial swap exp(-i S delta) between the target and each copy in
turn, with delta = t / n.  Each step advances the target by one Trotter
slice of the conjugation by e^{-i rho t}; the per-step channel has the
exact closed form

    sigma  ->  cos^2(d) sigma - i sin(d) cos(d) [rho (x) 1, sigma]
               + sin^2(d) rho (x) Tr_A(sigma)

so n = O(t^2 / delta) steps land within trace distance delta of the
ideal conjugation.  Every step can be cross-checked against an explicit
tensor-product evaluation at the 1e-12 level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    ATOL_EXACT,
    ComplexMatrix,
    DensityMatrix,
    clip_to_density,
    dagger,
    herm_exp,
    kron,
    partial_trace,
    permute_subsystems,
    swap_operator,
    validate_density_matrix,
)


@dataclass(frozen=True)
class LmrConfig:
    """Budget parameters for a simulation run.

    t: total evolution time (may be negative).
    delta: target trace-distance error, in (0, 1].
    budget_constant: multiplier in n = ceil(budget_constant * t^2 / delta).
    n_override: fixed step count, bypassing the budget formula.
    """

    t: float
    delta: float
    budget_constant: float = 4.0
    n_override: int | None = None

    def __post_init__(self) -> None:
        if not math.isfinite(self.t):
            raise ValueError(f"t must be finite, got {self.t}")
        if not 0.0 < self.delta <= 1.0:
            raise ValueError(f"delta must be in (0, 1], got {self.delta}")
        if self.budget_constant <= 0.0:
            raise ValueError(f"budget_constant must be positive, got {self.budget_constant}")
        if self.n_override is not None and self.n_override < 1:
            raise ValueError(f"n_override must be >= 1, got {self.n_override}")


def sample_budget(config: LmrConfig) -> int:
    """Number of program-state copies the run will consume."""
    if config.n_override is not None:
        return config.n_override
    return max(1, math.ceil(config.budget_constant * config.t**2 / config.delta))


def linear_channel_power(step, state: DensityMatrix, n: int) -> DensityMatrix:
    """Apply a fixed linear step map n times.

    For large n at small dimension the n-fold composition is computed
    as one superoperator matrix power (identical output up to float
    roundoff, log n cost); otherwise a plain loop with periodic
    eigenvalue clipping against drift.
    """
    d = state.shape[0]
    if n > 256 and d <= 16:
        basis = np.zeros((d * d, d, d), dtype=complex)
        idx = np.arange(d * d)
        basis[idx, idx // d, idx % d] = 1.0
        superop = np.array([step(b).reshape(-1) for b in basis]).T
        return (np.linalg.matrix_power(superop, n) @ state.reshape(-1)).reshape(d, d)
    out = state
    for count in range(n):
        out = step(out)
        if count % 256 == 255:
            out = clip_to_density(out)
    return out


def _lift(h: ComplexMatrix, target_dim: int) -> ComplexMatrix:
    """Pad a generator on A with identity on B when the target lives on A (x) B."""
    d = h.shape[0]
    if d == target_dim:
        return np.asarray(h, dtype=complex)
    if target_dim % d != 0:
        raise ValueError(f"generator dim {d} does not divide target dim {target_dim}")
    return kron(h, np.eye(target_dim // d))


def ideal_conjugation(h: ComplexMatrix, t: float, sigma: DensityMatrix) -> DensityMatrix:
    """Exact e^{-i h t} sigma e^{i h t}; h may act on a leading factor of sigma."""
    sigma = np.asarray(sigma, dtype=complex)
    u = herm_exp(_lift(h, sigma.shape[0]), t)
    return u @ sigma @ dagger(u)


def _split_dims(sigma_dim: int, rho_dim: int) -> tuple[int, int]:
    if sigma_dim % rho_dim != 0:
        raise ValueError(f"program dim {rho_dim} does not divide target dim {sigma_dim}")
    return rho_dim, sigma_dim // rho_dim


def _lmr_step_tensor(sigma: DensityMatrix, rho: DensityMatrix, delta_step: float) -> DensityMatrix:
    """One step evaluated literally: adjoin a fresh copy, partial swap, discard."""
    da, db = _split_dims(sigma.shape[0], rho.shape[0])
    w = math.cos(delta_step) * np.eye(da * da) - 1j * math.sin(delta_step) * swap_operator(da)
    if db == 1:
        u = w
        full = kron(sigma, rho)
        out = u @ full @ dagger(u)
        return partial_trace(out, (da, da), 1)
    # target holds (A, B); the fresh copy joins as a trailing A' factor
    u = permute_subsystems(kron(w, np.eye(db)), (da, da, db), (0, 2, 1))
    full = kron(sigma, rho)
    out = u @ full @ dagger(u)
    return partial_trace(out, (da, db, da), 2)


def lmr_step(
    sigma: DensityMatrix,
    rho: DensityMatrix,
    delta_step: float,
    *,
    self_check: bool = True,
    validate: bool = True,
) -> DensityMatrix:
    """Advance the target by one partial-swap step of angle delta_step.

    sigma lives on A (x) B (B may be trivial) and rho on A.  With
    self_check on, the closed form is compared against the explicit
    tensor evaluation and must agree to 1e-12.

    The channel is exact (and 2 pi periodic) for any delta_step; the
    per-step accuracy contract against the ideal conjugation only holds
    for |delta_step| <= pi/2.
    """
    sigma = np.asarray(sigma, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    if validate:
        validate_density_matrix(sigma, "target")
        validate_density_matrix(rho, "program state")
    da, db = _split_dims(sigma.shape[0], rho.shape[0])
    c = math.cos(delta_step)
    s = math.sin(delta_step)
    rho_full = rho if db == 1 else kron(rho, np.eye(db))
    cross = rho_full @ sigma - sigma @ rho_full
    if db == 1:
        refresh = rho * np.trace(sigma)
    else:
        refresh = kron(rho, partial_trace(sigma, (da, db), 0))
    out = c * c * sigma - 1j * s * c * cross + s * s * refresh
    if self_check:
        literal = _lmr_step_tensor(sigma, rho, delta_step)
        err = float(np.max(np.abs(out - literal)))
        if err > ATOL_EXACT:
            raise AssertionError(f"closed form disagrees with tensor evaluation by {err:.3e}")
    return out


def lmr_simulate(
    sigma: DensityMatrix,
    rho: DensityMatrix,
    config: LmrConfig,
    *,
    self_check: bool = False,
) -> tuple[DensityMatrix, int]:
    """Approximate e^{-i rho t} sigma e^{i rho t} with n partial-swap steps.

    Returns (final state, n).  n comes from sample_budget(config); each
    step uses angle t/n, so negative t simply reverses the swap angle.
    The step channel is exactly trace preserving and positive, so
    eigenvalue clipping is applied only periodically against float
    drift, never renormalizing beyond that.
    """
    validate_density_matrix(sigma, "target")
    validate_density_matrix(rho, "program state")
    n = sample_budget(config)
    delta_step = config.t / n
    state = np.asarray(sigma, dtype=complex)
    if self_check:
        for step in range(n):
            state = lmr_step(state, rho, delta_step, self_check=True, validate=False)
            if step % 256 == 255:
                state = clip_to_density(state)
    else:
        state = linear_channel_power(
            lambda x: lmr_step(x, rho, delta_step, self_check=False, validate=False), state, n)
    return clip_to_density(state), n


def _controlled_step_tensor(joint: DensityMatrix, rho: DensityMatrix, delta_step: float) -> DensityMatrix:
    da = rho.shape[0]
    w = math.cos(delta_step) * np.eye(da * da) - 1j * math.sin(delta_step) * swap_operator(da)
    p0 = np.diag([1.0, 0.0])
    p1 = np.diag([0.0, 1.0])
    v = kron(p0, np.eye(da * da)) + kron(p1, w)
    full = kron(joint, rho)
    out = v @ full @ dagger(v)
    return partial_trace(out, (2, da, da), 2)


def controlled_lmr_step(
    joint: DensityMatrix,
    rho: DensityMatrix,
    delta_step: float,
    *,
    self_check: bool = True,
    validate: bool = True,
) -> DensityMatrix:
    """One controlled partial-swap step on a control-qubit (x) A target.

    The swap with the fresh copy fires only on the control-1 branch, so
    the off-diagonal control blocks pick up one-sided factors
    (cos(d) 1 -+ i sin(d) rho) and the protocol converges to the
    controlled conjugation |0><0| (x) 1 + |1><1| (x) e^{-i rho t}.
    """
    joint = np.asarray(joint, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    if validate:
        validate_density_matrix(joint, "joint state")
        validate_density_matrix(rho, "program state")
    da = rho.shape[0]
    if joint.shape[0] != 2 * da:
        raise ValueError(f"joint dim {joint.shape[0]} is not control (x) program dim 2*{da}")
    c = math.cos(delta_step)
    s = math.sin(delta_step)
    j00 = joint[:da, :da]
    j01 = joint[:da, da:]
    j10 = joint[da:, :da]
    j11 = joint[da:, da:]
    out = np.empty_like(joint)
    out[:da, :da] = j00
    out[:da, da:] = c * j01 + 1j * s * (j01 @ rho)
    out[da:, :da] = c * j10 - 1j * s * (rho @ j10)
    out[da:, da:] = (
        c * c * j11 - 1j * s * c * (rho @ j11 - j11 @ rho) + s * s * rho * np.trace(j11)
    )
    if self_check:
        literal = _controlled_step_tensor(joint, rho, delta_step)
        err = float(np.max(np.abs(out - literal)))
        if err > ATOL_EXACT:
            raise AssertionError(f"closed form disagrees with tensor evaluation by {err:.3e}")
    return out


def controlled_lmr_simulate(
    joint: DensityMatrix,
    rho: DensityMatrix,
    config: LmrConfig,
    *,
    self_check: bool = False,
) -> tuple[DensityMatrix, int]:
    """Approximate the controlled conjugation on a control (x) A state."""
    validate_density_matrix(joint, "joint state")
    validate_density_matrix(rho, "program state")
    n = sample_budget(config)
    delta_step = config.t / n
    state = np.asarray(joint, dtype=complex)
    if self_check:
        for step in range(n):
            state = controlled_lmr_step(state, rho, delta_step, self_check=True, validate=False)
            if step % 256 == 255:
                state = clip_to_density(state)
    else:
        state = linear_channel_power(
            lambda x: controlled_lmr_step(x, rho, delta_step, self_check=False, validate=False),
            state, n)
    return clip_to_density(state), n
