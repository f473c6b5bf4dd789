import math

import numpy as np
import pytest

from dmexp import (
    AntiComm,
    BlockPair,
    HermitianPolynomial,
    IComm,
    Leaf,
    LmrConfig,
    Scale,
    Sum,
    commutator_gadget,
    eval_jordan_lie,
    ideal_conjugation,
    jordan_lie_expand,
    mix_linear_combination,
    polynomial_gadget,
    polynomial_matrix,
    random_state,
    signed_lmr_simulate,
    signed_lmr_step,
    simulate_polynomial,
    substream,
    trace_distance,
)


def product_generator(states, phi):
    """Oracle: (1/2)(e^{i phi} rho_1 ... rho_k + h.c.)."""
    prod = np.eye(states[0].shape[0], dtype=complex)
    for rho in states:
        prod = prod @ rho
    half = 0.5 * np.exp(1j * phi) * prod
    return half + half.conj().T


def test_block_pair_validation():
    p = np.diag([0.5, 0.0]).astype(complex)
    m = np.diag([0.0, 0.5]).astype(complex)
    pair = BlockPair(p, m)
    assert np.allclose(pair.hamiltonian(), np.diag([0.5, -0.5]))
    assert np.allclose(pair.mixture(), np.eye(2) / 2)
    assert pair.dim == 2
    with pytest.raises(ValueError):
        BlockPair(p, np.diag([0.0, 0.6]).astype(complex))  # traces sum to 1.1
    with pytest.raises(ValueError):
        BlockPair(np.diag([1.1, -0.1]).astype(complex), np.zeros((2, 2)))  # not PSD
    with pytest.raises(ValueError):
        BlockPair(p, np.zeros((3, 3)))  # shape mismatch


def test_signed_step_closed_form():
    rng = substream(1, "signed")
    for _ in range(8):
        rho1 = random_state(2, 2, rng)
        rho2 = random_state(2, 2, rng)
        pair = BlockPair(rho1 / 2, rho2 / 2)
        sigma = random_state(2, 2, rng)
        signed_lmr_step(sigma, pair, float(rng.uniform(-2, 2)), self_check=True)


def test_signed_step_tensor_target():
    rng = substream(2, "signed-tensor")
    pair = BlockPair(random_state(2, 2, rng) / 2, random_state(2, 1, rng) / 2)
    sigma = random_state(4, 3, rng)
    out = signed_lmr_step(sigma, pair, 0.4, self_check=True)
    assert abs(np.trace(out) - 1.0) < 1e-12
    with pytest.raises(ValueError):
        signed_lmr_step(random_state(3, 2, rng), pair, 0.1)


def test_signed_step_reduces_to_plain():
    from dmexp import lmr_step

    rng = substream(3, "reduce")
    rho = random_state(2, 2, rng)
    sigma = random_state(2, 2, rng)
    pair = BlockPair(rho, np.zeros_like(rho))
    a = signed_lmr_step(sigma, pair, 0.7)
    b = lmr_step(sigma, rho, 0.7)
    assert np.max(np.abs(a - b)) < 1e-14


def test_signed_simulate_matches_ideal_and_loop():
    rng = substream(4, "signed-sim")
    pair = BlockPair(random_state(2, 1, rng) / 2, random_state(2, 2, rng) / 2)
    sigma = random_state(2, 2, rng)
    cfg = LmrConfig(t=1.5, delta=0.02)
    fast, n = signed_lmr_simulate(sigma, pair, cfg)
    slow, _ = signed_lmr_simulate(sigma, pair, cfg, self_check=True)
    assert np.max(np.abs(fast - slow)) < 1e-12
    ideal = ideal_conjugation(pair.hamiltonian(), 1.5, sigma)
    assert trace_distance(fast, ideal) <= 0.02


def test_commutator_gadget_identity():
    rng = substream(5, "comm")
    for phi in (0.0, math.pi / 2, 1.234):
        rho1 = random_state(3, 2, rng)
        rho2 = random_state(3, 3, rng)
        pair = commutator_gadget(rho1, rho2, phi)
        want = product_generator([rho1, rho2], phi)
        assert np.max(np.abs(pair.hamiltonian() - want)) < 1e-12
        # blocks stay PSD with traces summing to one (BlockPair revalidates)
        assert abs(np.trace(pair.mixture()) - 1.0) < 1e-12
    with pytest.raises(ValueError):
        commutator_gadget(random_state(2, 2, rng), random_state(3, 2, rng), 0.0)


def test_commutator_gadget_phi_conventions():
    rng = substream(6, "phi")
    rho1 = random_state(2, 2, rng)
    rho2 = random_state(2, 2, rng)
    anti = commutator_gadget(rho1, rho2, 0.0).hamiltonian()
    assert np.max(np.abs(anti - 0.5 * (rho1 @ rho2 + rho2 @ rho1))) < 1e-12
    comm = commutator_gadget(rho1, rho2, math.pi / 2).hamiltonian()
    assert np.max(np.abs(comm - 0.5j * (rho1 @ rho2 - rho2 @ rho1))) < 1e-12


def test_polynomial_gadget_higher_degree():
    rng = substream(7, "polygad")
    states = [random_state(2, 2, rng) for _ in range(3)]
    pair = polynomial_gadget(states, 0.9)
    want = product_generator(states, 0.9)
    assert np.max(np.abs(pair.hamiltonian() - want)) < 1e-12


def test_polynomial_gadget_single_state():
    rho = random_state(2, 2, 8)
    pair = polynomial_gadget([rho], 0.0)
    assert np.max(np.abs(pair.plus - rho)) < 1e-15
    assert np.max(np.abs(pair.minus)) == 0.0
    with pytest.raises(ValueError):
        polynomial_gadget([rho], 0.3)  # no interference with one register
    with pytest.raises(ValueError):
        polynomial_gadget([], 0.0)


def test_mix_linear_combination_exact():
    rng = substream(9, "mix")
    states = [random_state(2, 2, rng) for _ in range(3)]
    coeffs = [0.5, -1.0, 0.25]
    pair = mix_linear_combination(states, coeffs)
    c = sum(abs(x) for x in coeffs)
    want = sum(cj * rj for cj, rj in zip(coeffs, states)) / c
    assert np.max(np.abs(pair.hamiltonian() - want)) < 1e-12
    with pytest.raises(ValueError):
        mix_linear_combination(states, [1.0, 2.0])
    with pytest.raises(ValueError):
        mix_linear_combination(states, [0.0, 0.0, 0.0])


def test_mix_linear_combination_sampled():
    rng = substream(10, "mix-sampled")
    states = [random_state(2, 1, rng) for _ in range(2)]
    draws = mix_linear_combination(states, [3.0, -1.0], mode="sampled", seed=11)
    seen_minus = 0
    total = 400
    for _ in range(total):
        pair = next(draws)
        if np.max(np.abs(pair.minus)) > 0:
            seen_minus += 1
            assert np.max(np.abs(pair.minus - states[1])) < 1e-14
        else:
            assert np.max(np.abs(pair.plus - states[0])) < 1e-14
    # negative coefficient drawn with probability 1/4
    assert 0.15 < seen_minus / total < 0.35


def test_polynomial_term_validation():
    from dmexp import PolynomialTerm

    with pytest.raises(ValueError):
        PolynomialTerm(indices=(), phi=0.0, c=1.0)
    with pytest.raises(ValueError):
        PolynomialTerm(indices=(0,), phi=0.0, c=1.0)  # 1-based
    with pytest.raises(ValueError):
        PolynomialTerm(indices=(1,), phi=0.0, c=0.0)
    term = PolynomialTerm(indices=(2, 1), phi=0.5, c=-0.7)
    assert term.degree == 2


def test_hermitian_polynomial_structure():
    from dmexp import PolynomialTerm

    poly = HermitianPolynomial(k=2, terms=(
        PolynomialTerm(indices=(1, 2), phi=0.3, c=0.6),
        PolynomialTerm(indices=(2,), phi=0.0, c=-0.4),
    ))
    assert abs(poly.coefficient_norm - 1.0) < 1e-15
    assert abs(poly.kappa(1) - 0.6) < 1e-15
    assert abs(poly.kappa(2) - 1.0) < 1e-15
    back = HermitianPolynomial.from_json(poly.to_json())
    assert back == poly
    with pytest.raises(ValueError):
        HermitianPolynomial(k=1, terms=(PolynomialTerm(indices=(2,), phi=0.0, c=1.0),))
    with pytest.raises(ValueError):
        HermitianPolynomial(k=1, terms=())


def test_polynomial_matrix_is_hermitian():
    from dmexp import PolynomialTerm

    rng = substream(12, "polymat")
    states = [random_state(2, 2, rng) for _ in range(2)]
    poly = HermitianPolynomial(k=2, terms=(
        PolynomialTerm(indices=(1, 2, 1), phi=1.1, c=0.8),
        PolynomialTerm(indices=(2,), phi=0.0, c=-0.3),
    ))
    h = polynomial_matrix(poly, states)
    assert np.max(np.abs(h - h.conj().T)) < 1e-14
    # one-term hand check
    single = HermitianPolynomial(k=2, terms=(PolynomialTerm(indices=(1, 2), phi=0.4, c=2.0),))
    want = 2.0 * product_generator(states, 0.4)
    assert np.max(np.abs(polynomial_matrix(single, states) - want)) < 1e-13


def test_simulate_polynomial_exact_mode():
    from dmexp import PolynomialTerm

    rng = substream(13, "simpoly")
    states = [random_state(2, 1, rng) for _ in range(2)]
    sigma = random_state(2, 2, rng)
    poly = HermitianPolynomial(k=2, terms=(
        PolynomialTerm(indices=(1, 2), phi=math.pi / 2, c=0.7),
        PolynomialTerm(indices=(1,), phi=0.0, c=-0.5),
    ))
    out, counts = simulate_polynomial(sigma, poly, states, LmrConfig(t=1.0, delta=0.02))
    ideal = ideal_conjugation(polynomial_matrix(poly, states), 1.0, sigma)
    assert trace_distance(out, ideal) <= 0.02
    # exact mode reports expected copy counts kappa_j * n
    n = sum(counts) / (poly.kappa(1) + poly.kappa(2))
    assert abs(counts[0] - poly.kappa(1) * n) < 1e-9
    assert abs(counts[1] - poly.kappa(2) * n) < 1e-9


def test_simulate_polynomial_sampled_mode():
    from dmexp import PolynomialTerm

    rng = substream(14, "simpoly-sampled")
    states = [random_state(2, 1, rng) for _ in range(2)]
    sigma = random_state(2, 2, rng)
    poly = HermitianPolynomial(k=2, terms=(
        PolynomialTerm(indices=(1, 2), phi=math.pi / 2, c=0.7),
        PolynomialTerm(indices=(2,), phi=0.0, c=0.5),
    ))
    out, counts = simulate_polynomial(sigma, poly, states, LmrConfig(t=1.0, delta=0.05),
                                      mode="sampled", seed=15)
    ideal = ideal_conjugation(polynomial_matrix(poly, states), 1.0, sigma)
    # sampling adds variance on top of the step budget
    assert trace_distance(out, ideal) <= 0.15
    assert counts.sum() > 0
    with pytest.raises(ValueError):
        simulate_polynomial(sigma, poly, states, LmrConfig(t=1.0, delta=0.05), mode="bogus")
    with pytest.raises(ValueError):
        simulate_polynomial(sigma, poly, states[:1], LmrConfig(t=1.0, delta=0.05))


def test_jordan_lie_expand_roundtrip():
    rng = substream(16, "jordan")
    states = [random_state(2, 2, rng) for _ in range(4)]
    for _ in range(12):
        k = int(rng.integers(1, 5))
        indices = [int(rng.integers(1, 5)) for _ in range(k)]
        z = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        expr = jordan_lie_expand(indices, z)
        got = eval_jordan_lie(expr, states)
        prod = np.eye(2, dtype=complex)
        for i in indices:
            prod = prod @ states[i - 1]
        want = z * prod + (z * prod).conj().T
        assert np.max(np.abs(got - want)) < 1e-10


def test_jordan_lie_structure():
    # real z on two states: pure anticommutator, no commutator node
    expr = jordan_lie_expand([1, 2], 1.0)
    assert isinstance(expr, (AntiComm, Scale))
    # imaginary z on two states: the i[.,.] branch
    expr_i = jordan_lie_expand([1, 2], 1j)
    node = expr_i.node if isinstance(expr_i, Scale) else expr_i
    assert isinstance(node, IComm)
    # z = 0 collapses to an explicit zero
    zero = jordan_lie_expand([1, 2, 3], 0.0)
    states = [random_state(2, 2, substream(17, "z", i)) for i in range(3)]
    assert np.max(np.abs(eval_jordan_lie(zero, states))) == 0.0
    with pytest.raises(ValueError):
        jordan_lie_expand([], 1.0)
    with pytest.raises(ValueError):
        jordan_lie_expand([0, 1], 1.0)


def test_eval_jordan_lie_nodes():
    states = [np.diag([1.0, 0.0]).astype(complex), np.full((2, 2), 0.5, dtype=complex)]
    a, b = states
    got = eval_jordan_lie(AntiComm(Leaf(1), Leaf(2)), states)
    assert np.max(np.abs(got - (a @ b + b @ a))) < 1e-15
    got = eval_jordan_lie(IComm(Leaf(1), Leaf(2)), states)
    assert np.max(np.abs(got - 1j * (a @ b - b @ a))) < 1e-15
    got = eval_jordan_lie(Sum((Scale(2.0, Leaf(1)), Leaf(2))), states)
    assert np.max(np.abs(got - (2 * a + b))) < 1e-15
    with pytest.raises(ValueError):
        eval_jordan_lie(Leaf(3), states)
