import math

import numpy as np
import pytest
import scipy.linalg

from dmexp import (
    clip_to_density,
    cyclic_shift,
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
    substream,
    swap_operator,
    trace_distance,
    unitary_diamond_distance,
    validate_density_matrix,
    validate_pure_state,
)

Z = np.diag([1.0, -1.0]).astype(complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)


def test_ket_projector():
    v = ket(1, 3)
    assert v.shape == (3,)
    assert v[1] == 1.0 and abs(v).sum() == 1.0
    p = projector(v)
    assert np.allclose(p, np.diag([0, 1, 0]))
    assert np.allclose(p @ p, p)


def test_kron_associates():
    a = random_state(2, 2, 1)
    b = random_state(3, 3, 2)
    c = random_state(2, 1, 3)
    assert np.allclose(kron(a, b, c), np.kron(np.kron(a, b), c))
    with pytest.raises(ValueError):
        kron(a)


def test_partial_trace_factors():
    a = random_state(2, 2, 4)
    b = random_state(3, 2, 5)
    full = kron(a, b)
    assert np.max(np.abs(partial_trace(full, (2, 3), 1) - a)) < 1e-12
    assert np.max(np.abs(partial_trace(full, (2, 3), 0) - b)) < 1e-12
    # tracing everything but one factor of a triple
    c = random_state(2, 1, 6)
    full3 = kron(a, b, c)
    assert np.max(np.abs(partial_trace(full3, (2, 3, 2), (0, 2)) - b)) < 1e-12


def test_partial_trace_preserves_trace():
    rho = random_state(6, 4, 7)
    out = partial_trace(rho, (2, 3), 0)
    assert abs(np.trace(out) - 1.0) < 1e-12


def test_permute_subsystems_roundtrip():
    a = random_state(2, 2, 8)
    b = random_state(3, 3, 9)
    ab = kron(a, b)
    ba = permute_subsystems(ab, (2, 3), (1, 0))
    assert np.max(np.abs(ba - kron(b, a))) < 1e-12
    back = permute_subsystems(ba, (3, 2), (1, 0))
    assert np.max(np.abs(back - ab)) < 1e-12


def test_swap_operator_action():
    s = swap_operator(3)
    for a in range(3):
        for b in range(3):
            v = np.kron(ket(a, 3), ket(b, 3))
            assert np.allclose(s @ v, np.kron(ket(b, 3), ket(a, 3)))
    assert np.allclose(s @ s, np.eye(9))


def test_cyclic_shift_cases():
    assert np.allclose(cyclic_shift(1, 4), np.eye(4))
    assert np.allclose(cyclic_shift(2, 3), swap_operator(3))
    s = cyclic_shift(3, 2)
    v = kron_vec = np.kron(np.kron(ket(1, 2), ket(0, 2)), ket(1, 2))
    # |j1 j2 j3> -> |j3 j1 j2>
    assert np.allclose(s @ v, np.kron(np.kron(ket(1, 2), ket(1, 2)), ket(0, 2)))
    with pytest.raises(ValueError):
        cyclic_shift(0, 2)


def test_herm_exp_matches_expm():
    rng = substream(11, "herm")
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    h = (m + m.conj().T) / 2
    for t in (0.0, 0.7, -2.3):
        assert np.max(np.abs(herm_exp(h, t) - scipy.linalg.expm(-1j * h * t))) < 1e-10
    with pytest.raises(ValueError):
        herm_exp(m)  # not Hermitian


def test_trace_distance_range():
    p0 = projector(ket(0, 2))
    p1 = projector(ket(1, 2))
    assert abs(trace_distance(p0, p1) - 1.0) < 1e-12
    assert trace_distance(p0, p0) < 1e-12
    rho = random_state(3, 2, 12)
    sig = random_state(3, 3, 13)
    d = trace_distance(rho, sig)
    assert 0.0 <= d <= 1.0 + 1e-12


def test_pure_fidelity():
    plus = np.array([1, 1], dtype=complex) / math.sqrt(2)
    assert abs(pure_fidelity(plus, projector(plus)) - 1.0) < 1e-12
    assert abs(pure_fidelity(plus, projector(ket(0, 2))) - 0.5) < 1e-12


def test_clip_to_density_repairs_and_rejects():
    rho = np.diag([1.0 + 5e-11, -5e-11]).astype(complex)
    fixed = clip_to_density(rho)
    validate_density_matrix(fixed)
    assert np.linalg.eigvalsh(fixed)[0] >= 0.0
    with pytest.raises(ValueError):
        clip_to_density(np.diag([1.2, -0.2]).astype(complex))
    with pytest.raises(ValueError):
        clip_to_density(np.array([[1.0, 1.0], [0.0, 0.0]], dtype=complex))


def test_validators():
    validate_density_matrix(np.eye(2, dtype=complex) / 2)
    assert is_density_matrix(np.diag([0.3, 0.7]).astype(complex))
    assert not is_density_matrix(np.diag([0.3, 0.8]).astype(complex))
    with pytest.raises(ValueError):
        validate_pure_state(np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        validate_pure_state(np.eye(2))


def test_diamond_distance_unitary_cases():
    # identical channels, and global phase invariance
    u = herm_exp(Z + 0.3 * X, 0.9)
    assert unitary_diamond_distance(u, u) < 1e-12
    # degenerate eigenvalues of u†v move by sqrt(ulp) under the
    # non-normal float perturbation, so the phase case is only ~1e-7
    assert unitary_diamond_distance(u, np.exp(0.4j) * u) < 1e-6
    # eigenphase spread >= pi covers the origin: distance saturates at 1
    assert abs(unitary_diamond_distance(np.eye(2), herm_exp(Z, math.pi / 2)) - 1.0) < 1e-10
    # qubit Z rotation below saturation: sin of the half-spread
    theta = 0.4
    got = unitary_diamond_distance(np.eye(2), herm_exp(theta * Z, 1.0))
    assert abs(got - math.sin(theta)) < 1e-10


def test_hadamard_series_converges():
    rng = substream(14, "series")
    m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    h = (m + m.conj().T) / 2
    b = random_state(3, 3, 15)
    a = -0.2j * h
    exact = scipy.linalg.expm(a) @ b @ scipy.linalg.expm(-a)
    assert np.max(np.abs(hadamard_series(a, b, 20) - exact)) < 1e-12
    # order 0 is just b
    assert np.allclose(hadamard_series(a, b, 0), b)
    with pytest.raises(ValueError):
        hadamard_series(a, b, -1)


def test_random_states_seeded():
    psi = random_pure_state(4, 21)
    validate_pure_state(psi)
    assert np.allclose(psi, random_pure_state(4, 21))
    rho = random_state(4, 2, 22)
    validate_density_matrix(rho)
    assert np.allclose(rho, random_state(4, 2, 22))
    assert np.linalg.matrix_rank(rho, tol=1e-9) == 2


def test_state_json_roundtrip():
    rho = random_state(3, 2, 23)
    blob = state_to_json(rho)
    assert blob["dim"] == 3
    back = state_from_json(blob)
    assert np.max(np.abs(back - rho)) < 1e-15
