import math

import numpy as np
import pytest

from dmexp import (
    LmrConfig,
    controlled_lmr_simulate,
    controlled_lmr_step,
    herm_exp,
    ideal_conjugation,
    ket,
    kron,
    linear_channel_power,
    lmr_simulate,
    lmr_step,
    projector,
    random_pure_state,
    random_state,
    sample_budget,
    substream,
    trace_distance,
)

PLUS = np.full((2, 2), 0.5, dtype=complex)
P0 = np.diag([1.0, 0.0]).astype(complex)


def test_step_desk_value():
    out = lmr_step(PLUS, P0, math.pi / 4)
    want = np.array([[0.75, 0.25 - 0.25j], [0.25 + 0.25j, 0.25]])
    assert np.max(np.abs(out - want)) < 1e-15


def test_step_closed_form_random_pairs():
    # self_check cross-validates against the literal tensor circuit
    rng = substream(3, "pairs")
    for dim in (2, 3, 4):
        for _ in range(10):
            sigma = random_state(dim, dim, rng)
            rho = random_state(dim, 2, rng)
            lmr_step(sigma, rho, float(rng.uniform(-2, 2)), self_check=True)


def test_step_tensor_target():
    # program on A, target on A (x) B: the fresh copy swaps with A only
    rng = substream(4, "tensor")
    sigma = random_state(6, 3, rng)
    rho = random_state(3, 2, rng)
    out = lmr_step(sigma, rho, 0.3, self_check=True)
    assert abs(np.trace(out) - 1.0) < 1e-12
    with pytest.raises(ValueError):
        lmr_step(random_state(3, 2, rng), random_state(2, 2, rng), 0.1)


def test_step_identity_and_periodicity():
    sigma = random_state(2, 2, 5)
    rho = random_state(2, 1, 6)
    assert np.max(np.abs(lmr_step(sigma, rho, 0.0) - sigma)) < 1e-15
    a = lmr_step(sigma, rho, 0.7)
    b = lmr_step(sigma, rho, 0.7 + 2 * math.pi)
    assert np.max(np.abs(a - b)) < 1e-12


def test_step_is_channel_beyond_pi_half():
    # exact CPTP map at any angle, not just the small-step regime
    sigma = random_state(2, 2, 7)
    rho = random_state(2, 2, 8)
    out = lmr_step(sigma, rho, 2.0)
    assert abs(np.trace(out) - 1.0) < 1e-12
    assert np.max(np.abs(out - out.conj().T)) < 1e-12
    assert np.linalg.eigvalsh(out)[0] > -1e-12


def test_sample_budget_formula():
    assert sample_budget(LmrConfig(t=math.pi, delta=0.1)) == math.ceil(4 * math.pi**2 / 0.1)
    assert sample_budget(LmrConfig(t=-math.pi, delta=0.1)) == sample_budget(LmrConfig(t=math.pi, delta=0.1))
    assert sample_budget(LmrConfig(t=1.0, delta=0.5, budget_constant=2.0)) == 4
    assert sample_budget(LmrConfig(t=1.0, delta=0.5, n_override=3)) == 3
    assert sample_budget(LmrConfig(t=0.0, delta=0.5)) == 1


def test_config_validation():
    with pytest.raises(ValueError):
        LmrConfig(t=1.0, delta=0.0)
    with pytest.raises(ValueError):
        LmrConfig(t=1.0, delta=1.5)
    with pytest.raises(ValueError):
        LmrConfig(t=math.inf, delta=0.1)
    with pytest.raises(ValueError):
        LmrConfig(t=1.0, delta=0.1, budget_constant=0.0)
    with pytest.raises(ValueError):
        LmrConfig(t=1.0, delta=0.1, n_override=0)


def test_simulate_fast_path_matches_loop():
    # the superoperator power must reproduce the literal step loop
    sigma = random_state(2, 2, 9)
    rho = projector(random_pure_state(2, 10))
    cfg = LmrConfig(t=math.pi, delta=0.05)  # n = 790, above the fast-path threshold
    fast, n_fast = lmr_simulate(sigma, rho, cfg)
    slow, n_slow = lmr_simulate(sigma, rho, cfg, self_check=True)
    assert n_fast == n_slow == 790
    assert np.max(np.abs(fast - slow)) < 1e-12


def test_simulate_error_within_budget():
    sigma = random_state(2, 2, 11)
    rho = random_state(2, 2, 12)
    for t, delta in ((1.0, 0.1), (math.pi, 0.05), (-2.0, 0.1)):
        out, n = lmr_simulate(sigma, rho, LmrConfig(t=t, delta=delta))
        assert n == sample_budget(LmrConfig(t=t, delta=delta))
        assert trace_distance(out, ideal_conjugation(rho, t, sigma)) <= delta


def test_simulate_first_order_convergence():
    sigma = random_state(2, 2, 13)
    rho = random_state(2, 1, 14)
    ideal = ideal_conjugation(rho, math.pi, sigma)
    errs = []
    for n in (64, 256, 1024):
        out, _ = lmr_simulate(sigma, rho, LmrConfig(t=math.pi, delta=0.5, n_override=n))
        errs.append(trace_distance(out, ideal))
    # quadrupling n should cut the error by about 4
    assert 3.0 < errs[0] / errs[1] < 5.0
    assert 3.0 < errs[1] / errs[2] < 5.0


def test_linear_channel_power_paths_agree():
    rho = random_state(2, 1, 15)
    sigma = random_state(2, 2, 16)

    def step(x):
        return lmr_step(x, rho, 0.01, self_check=False, validate=False)

    slow = sigma
    for _ in range(300):
        slow = step(slow)
    fast = linear_channel_power(step, sigma, 300)  # n > 256: superoperator path
    assert np.max(np.abs(fast - slow)) < 1e-12
    assert np.max(np.abs(linear_channel_power(step, sigma, 1) - step(sigma))) < 1e-15


def test_controlled_step_blocks():
    rng = substream(17, "ctrl")
    rho = random_state(2, 2, rng)
    joint = random_state(4, 4, rng)
    d = 0.3
    out = controlled_lmr_step(joint, rho, d, self_check=True)
    # control-0 block rides through untouched
    assert np.max(np.abs(out[:2, :2] - joint[:2, :2])) < 1e-12
    # coherences pick up exactly one one-sided factor
    c, s = math.cos(d), math.sin(d)
    want01 = c * joint[:2, 2:] + 1j * s * (joint[:2, 2:] @ rho)
    assert np.max(np.abs(out[:2, 2:] - want01)) < 1e-12
    assert np.max(np.abs(out[2:, :2] - want01.conj().T)) < 1e-12


def test_controlled_step_rejects_bad_dims():
    with pytest.raises(ValueError):
        controlled_lmr_step(random_state(6, 2, 18), random_state(2, 2, 19), 0.1)


def test_controlled_simulate_vs_ideal():
    rng = substream(20, "ctrl-sim")
    rho = random_state(2, 2, rng)
    psi = np.kron(np.array([1, 1]) / math.sqrt(2), random_pure_state(2, rng))
    joint = projector(psi)
    t, delta = 1.2, 0.02
    out, n = controlled_lmr_simulate(joint, rho, LmrConfig(t=t, delta=delta))
    u = kron(projector(ket(0, 2)), np.eye(2)) + kron(projector(ket(1, 2)), herm_exp(rho, t))
    ideal = u @ joint @ u.conj().T
    assert trace_distance(out, ideal) <= delta
    # fast path agrees with the literal loop here too
    slow, _ = controlled_lmr_simulate(joint, rho, LmrConfig(t=t, delta=delta), self_check=True)
    assert np.max(np.abs(out - slow)) < 1e-12


def test_controlled_preserves_control_coherence():
    # |+><+| control with identity-like program keeps off-diagonal weight
    rho = np.eye(2, dtype=complex) / 2
    plus = np.array([1, 1, 1, 1], dtype=complex) / 2
    joint = projector(plus)
    out, _ = controlled_lmr_simulate(joint, rho, LmrConfig(t=0.8, delta=0.05))
    assert np.max(np.abs(out[:2, 2:])) > 0.1
