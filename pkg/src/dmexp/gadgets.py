"""Hamiltonians beyond a single program state.

A signed pair of subnormalized states (rho_plus, rho_minus) drives the
same partial-swap protocol as a single state, but with the swap
conjugated by -1 on an ancilla branch, so the effective generator is
the difference H = rho_plus - rho_minus.  Small circuits built from a
controlled cyclic shift (one ancilla, k data registers, trace all but
the first) produce pairs whose difference is

    H_r = (1/2) (e^{i phi} rho_r1 ... rho_rk + h.c.),

and convex mixtures of such pairs realize arbitrary Hermitian
polynomials in the program states.  The same products expand into
nested anticommutators {.,.} and Hermitized commutators i[.,.] with
real weights, which keeps every intermediate Hermitian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .linalg import (
    ATOL_EXACT,
    ATOL_VALIDATE,
    ComplexMatrix,
    DensityMatrix,
    assert_hermitian,
    clip_to_density,
    cyclic_shift,
    dagger,
    kron,
    partial_trace,
    validate_density_matrix,
)
from .lmr import LmrConfig, linear_channel_power, sample_budget
from .rng import substream

_P0 = np.diag([1.0, 0.0]).astype(complex)
_P1 = np.diag([0.0, 1.0]).astype(complex)
_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)


@dataclass(frozen=True)
class BlockPair:
    """Subnormalized pair encoding the generator plus - minus.

    Both blocks must be Hermitian and PSD, with traces summing to one;
    either block may be zero.
    """

    plus: DensityMatrix
    minus: DensityMatrix

    def __post_init__(self) -> None:
        plus = np.asarray(self.plus, dtype=complex)
        minus = np.asarray(self.minus, dtype=complex)
        object.__setattr__(self, "plus", plus)
        object.__setattr__(self, "minus", minus)
        if plus.shape != minus.shape or plus.ndim != 2 or plus.shape[0] != plus.shape[1]:
            raise ValueError(f"blocks must be square and same shape, got {plus.shape}, {minus.shape}")
        for name, block in (("plus", plus), ("minus", minus)):
            assert_hermitian(block, f"{name} block")
            if np.linalg.eigvalsh(block)[0] < -ATOL_VALIDATE:
                raise ValueError(f"{name} block is not PSD")
        total = np.trace(plus).real + np.trace(minus).real
        if abs(total - 1.0) > ATOL_VALIDATE:
            raise ValueError(f"block traces sum to {total:.12f}, expected 1")

    @property
    def dim(self) -> int:
        return self.plus.shape[0]

    def hamiltonian(self) -> ComplexMatrix:
        """Effective generator plus - minus."""
        return self.plus - self.minus

    def mixture(self) -> ComplexMatrix:
        """Unsigned mixture plus + minus (a density matrix)."""
        return self.plus + self.minus


def _signed_step_tensor(sigma: DensityMatrix, pair: BlockPair, delta_step: float) -> DensityMatrix:
    """Literal evaluation on ancilla (x) fresh (x) target."""
    d = pair.dim
    dt = sigma.shape[0]
    c, s = math.cos(delta_step), math.sin(delta_step)
    # swap between the fresh register and the leading d-dimensional factor
    # of the target; any trailing factor rides along
    db = dt // d
    swap = np.zeros((d * d, d * d), dtype=complex)
    for a in range(d):
        for b in range(d):
            swap[b * d + a, a * d + b] = 1.0
    w_minus = c * np.eye(d * d) - 1j * s * swap
    w_plus = c * np.eye(d * d) + 1j * s * swap
    eye_b = np.eye(db)
    u = kron(_P0, w_minus, eye_b) + kron(_P1, w_plus, eye_b)
    rho_prime = kron(_P0, pair.plus) + kron(_P1, pair.minus)
    full = kron(rho_prime, sigma)
    out = u @ full @ dagger(u)
    return partial_trace(out, (2, d, d, db), (0, 1))


def signed_lmr_step(
    sigma: DensityMatrix,
    pair: BlockPair,
    delta_step: float,
    *,
    self_check: bool = True,
    validate: bool = True,
) -> DensityMatrix:
    """One partial-swap step driven by a signed pair.

    The closed form is

        sigma -> cos^2(d) sigma - i sin(d) cos(d) [H (x) 1, sigma]
                 + sin^2(d) (plus + minus) (x) Tr_A(sigma)

    with H = plus - minus, reducing to the plain step when minus = 0.
    """
    sigma = np.asarray(sigma, dtype=complex)
    if validate:
        validate_density_matrix(sigma, "target")
    d = pair.dim
    dt = sigma.shape[0]
    if dt % d != 0:
        raise ValueError(f"pair dim {d} does not divide target dim {dt}")
    db = dt // d
    c, s = math.cos(delta_step), math.sin(delta_step)
    ham = pair.hamiltonian() if db == 1 else kron(pair.hamiltonian(), np.eye(db))
    if db == 1:
        refresh = pair.mixture() * np.trace(sigma)
    else:
        refresh = kron(pair.mixture(), partial_trace(sigma, (d, db), 0))
    out = c * c * sigma - 1j * s * c * (ham @ sigma - sigma @ ham) + s * s * refresh
    if self_check:
        literal = _signed_step_tensor(sigma, pair, delta_step)
        err = float(np.max(np.abs(out - literal)))
        if err > ATOL_EXACT:
            raise AssertionError(f"closed form disagrees with tensor evaluation by {err:.3e}")
    return out


def signed_lmr_simulate(
    sigma: DensityMatrix,
    pair: BlockPair,
    config: LmrConfig,
    *,
    self_check: bool = False,
) -> tuple[DensityMatrix, int]:
    """Approximate conjugation by e^{-i (plus - minus) t} with n signed steps."""
    validate_density_matrix(sigma, "target")
    n = sample_budget(config)
    delta_step = config.t / n
    state = np.asarray(sigma, dtype=complex)
    if self_check:
        for step in range(n):
            state = signed_lmr_step(state, pair, delta_step, self_check=True, validate=False)
            if step % 256 == 255:
                state = clip_to_density(state)
    else:
        state = linear_channel_power(
            lambda x: signed_lmr_step(x, pair, delta_step, self_check=False, validate=False),
            state, n)
    return clip_to_density(state), n


def mix_linear_combination(
    states: Sequence[DensityMatrix],
    coeffs: Sequence[float],
    mode: str = "exact",
    seed: int | np.random.Generator = 0,
) -> BlockPair | Iterator[BlockPair]:
    """Block-encode the combination H = sum_j c_j rho_j, rescaled by 1/c.

    With c = sum_j |c_j|, the exact mode returns the deterministic pair
    whose generator is H/c; simulating it for time c*t then realizes
    e^{-i H t}.  Sampled mode returns an infinite iterator of one-state
    pairs drawn with probability |c_j|/c, identical to the exact pair in
    expectation.
    """
    if len(states) != len(coeffs):
        raise ValueError(f"{len(states)} states but {len(coeffs)} coefficients")
    if len(states) == 0:
        raise ValueError("need at least one state")
    coeffs = [float(x) for x in coeffs]
    dim = np.asarray(states[0]).shape[0]
    for j, rho in enumerate(states):
        validate_density_matrix(rho, f"state {j}")
        if np.asarray(rho).shape[0] != dim:
            raise ValueError("states must share one dimension")
    c_total = sum(abs(x) for x in coeffs)
    if c_total <= 0.0:
        raise ValueError("coefficients must not all vanish")
    if mode == "exact":
        zero = np.zeros((dim, dim), dtype=complex)
        plus = sum((cj / c_total) * np.asarray(rj, dtype=complex) for cj, rj in zip(coeffs, states) if cj > 0)
        minus = sum((-cj / c_total) * np.asarray(rj, dtype=complex) for cj, rj in zip(coeffs, states) if cj < 0)
        plus = zero if isinstance(plus, int) else plus
        minus = zero if isinstance(minus, int) else minus
        return BlockPair(plus, minus)
    if mode == "sampled":
        rng = seed if isinstance(seed, np.random.Generator) else substream(int(seed), "mix")
        weights = np.array([abs(x) for x in coeffs]) / c_total
        zero = np.zeros((dim, dim), dtype=complex)

        def draw() -> Iterator[BlockPair]:
            while True:
                j = int(rng.choice(len(coeffs), p=weights))
                rho = np.asarray(states[j], dtype=complex)
                yield BlockPair(rho, zero) if coeffs[j] > 0 else BlockPair(zero, rho)

        return draw()
    raise ValueError(f"unknown mode {mode!r}")


def _shift_gadget(states: Sequence[DensityMatrix], phi: float) -> BlockPair:
    """Run the controlled-cyclic-shift circuit and dephase the ancilla."""
    k = len(states)
    d = np.asarray(states[0]).shape[0]
    anc = np.array([1.0, np.exp(-1j * phi)], dtype=complex) / math.sqrt(2.0)
    full = np.outer(anc, anc.conj())
    for rho in states:
        full = kron(full, rho)
    shift = cyclic_shift(k, d)
    cs = kron(_P0, np.eye(d**k)) + kron(_P1, shift)
    full = cs @ full @ dagger(cs)
    kept = partial_trace(full, (2,) + (d,) * k, tuple(range(2, k + 1)))
    kept = kron(_HADAMARD, np.eye(d)) @ kept @ kron(_HADAMARD, np.eye(d))
    plus = kept[:d, :d]
    minus = kept[d:, d:]
    return BlockPair(plus, minus)


def commutator_gadget(rho1: DensityMatrix, rho2: DensityMatrix, phi: float) -> BlockPair:
    """Pair whose generator is (1/2)(e^{i phi} rho1 rho2 + e^{-i phi} rho2 rho1).

    phi = 0 gives half the anticommutator, phi = pi/2 half the
    Hermitized commutator i[rho1, rho2].  Built from one ancilla in
    (|0> + e^{-i phi}|1>)/sqrt(2), a controlled swap of the two program
    registers, a trace over the second register, a Hadamard, and a
    Z-basis dephasing of the ancilla.
    """
    rho1 = np.asarray(rho1, dtype=complex)
    rho2 = np.asarray(rho2, dtype=complex)
    validate_density_matrix(rho1, "rho1")
    validate_density_matrix(rho2, "rho2")
    if rho1.shape != rho2.shape:
        raise ValueError(f"shape mismatch {rho1.shape} vs {rho2.shape}")
    return _shift_gadget([rho1, rho2], phi)


def polynomial_gadget(states: Sequence[DensityMatrix], phi: float) -> BlockPair:
    """Pair whose generator is (1/2)(e^{i phi} rho_1 ... rho_k + h.c.).

    Generalizes the commutator gadget with a controlled cyclic shift on
    k registers.  A single register admits no interference, so k = 1 is
    accepted only at phi = 0, where the pair is just (rho_1, 0).
    """
    if len(states) == 0:
        raise ValueError("need at least one state")
    dims = {np.asarray(rho).shape[0] for rho in states}
    if len(dims) != 1:
        raise ValueError("states must share one dimension")
    for j, rho in enumerate(states):
        validate_density_matrix(rho, f"state {j}")
    if len(states) == 1:
        if abs(phi) > ATOL_VALIDATE:
            raise ValueError("a single-state product admits only phi = 0")
        rho = np.asarray(states[0], dtype=complex)
        return BlockPair(rho, np.zeros_like(rho))
    return _shift_gadget(states, phi)


@dataclass(frozen=True)
class PolynomialTerm:
    """One product term c * (1/2)(e^{i phi} rho_r1 ... rho_rk + h.c.).

    indices are 1-based labels into the program state list.
    """

    indices: tuple[int, ...]
    phi: float
    c: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        if len(self.indices) == 0:
            raise ValueError("term needs at least one index")
        if any(i < 1 for i in self.indices):
            raise ValueError(f"indices are 1-based, got {self.indices}")
        if self.c == 0.0:
            raise ValueError("term coefficient must be nonzero")

    @property
    def degree(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class HermitianPolynomial:
    """Sum of Hermitized products of k program states."""

    k: int
    terms: tuple[PolynomialTerm, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.k < 1:
            raise ValueError(f"need k >= 1 program states, got {self.k}")
        if len(self.terms) == 0:
            raise ValueError("polynomial needs at least one term")
        for term in self.terms:
            if max(term.indices) > self.k:
                raise ValueError(f"term {term.indices} references state beyond k={self.k}")

    @property
    def coefficient_norm(self) -> float:
        """c = sum_r |c_r|, the rescaling constant of the block encoding."""
        return sum(abs(t.c) for t in self.terms)

    def kappa(self, j: int) -> float:
        """Expected copies of state j consumed per protocol step (1-based j)."""
        c = self.coefficient_norm
        return sum(t.indices.count(j) * abs(t.c) for t in self.terms) / c

    def to_json(self) -> dict:
        return {
            "K": self.k,
            "terms": [
                {"r": "".join(str(i) for i in t.indices), "phi": float(t.phi), "c": float(t.c)}
                for t in self.terms
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "HermitianPolynomial":
        terms = tuple(
            PolynomialTerm(tuple(int(ch) for ch in item["r"]), float(item["phi"]), float(item["c"]))
            for item in data["terms"]
        )
        return cls(int(data["K"]), terms)


def polynomial_matrix(poly: HermitianPolynomial, states: Sequence[DensityMatrix]) -> ComplexMatrix:
    """Evaluate the polynomial directly: sum_r c_r (1/2)(e^{i phi_r} prod rho + h.c.)."""
    if len(states) != poly.k:
        raise ValueError(f"polynomial expects {poly.k} states, got {len(states)}")
    mats = [np.asarray(rho, dtype=complex) for rho in states]
    d = mats[0].shape[0]
    total = np.zeros((d, d), dtype=complex)
    for term in poly.terms:
        prod = np.eye(d, dtype=complex)
        for i in term.indices:
            prod = prod @ mats[i - 1]
        half = 0.5 * np.exp(1j * term.phi) * prod
        total = total + term.c * (half + dagger(half))
    return total


def _term_pair(term: PolynomialTerm, states: Sequence[DensityMatrix]) -> BlockPair:
    """Gadget pair for one term, with a negative coefficient folded into phi."""
    phi = term.phi if term.c > 0 else term.phi + math.pi
    group = [states[i - 1] for i in term.indices]
    if term.degree == 1:
        rho = np.asarray(group[0], dtype=complex)
        zero = np.zeros_like(rho)
        phase = np.exp(1j * phi)
        if abs(phase - 1.0) <= ATOL_VALIDATE:
            return BlockPair(rho, zero)
        if abs(phase + 1.0) <= ATOL_VALIDATE:
            return BlockPair(zero, rho)
        raise ValueError(
            f"degree-1 term with phi={term.phi}, c={term.c} is not realizable; "
            "only a pure sign is (phi a multiple of pi)"
        )
    return polynomial_gadget(group, phi)


def simulate_polynomial(
    sigma: DensityMatrix,
    poly: HermitianPolynomial,
    states: Sequence[DensityMatrix],
    config: LmrConfig,
    mode: str = "exact",
    seed: int | np.random.Generator = 0,
) -> tuple[DensityMatrix, np.ndarray]:
    """Simulate conjugation by e^{-i H t} for H = polynomial_matrix(poly, states).

    The pair generator equals H/c with c = sum |c_r|, so the protocol
    runs for rescaled time c*t; the step budget is
    ceil(budget_constant * (c t)^2 / delta).  Exact mode mixes all term
    gadgets deterministically each step; sampled mode draws one term per
    step with probability |c_r|/c.  Returns (final state, per-state copy
    counts), the counts being expectations kappa_j * n in exact mode and
    realized tallies in sampled mode.
    """
    validate_density_matrix(sigma, "target")
    if len(states) != poly.k:
        raise ValueError(f"polynomial expects {poly.k} states, got {len(states)}")
    for j, rho in enumerate(states):
        validate_density_matrix(rho, f"state {j}")
    c_total = poly.coefficient_norm
    scaled = LmrConfig(
        t=c_total * config.t,
        delta=config.delta,
        budget_constant=config.budget_constant,
        n_override=config.n_override,
    )
    n = sample_budget(scaled)
    delta_step = scaled.t / n
    pairs = [_term_pair(term, states) for term in poly.terms]
    weights = np.array([abs(t.c) for t in poly.terms]) / c_total
    counts = np.zeros(poly.k)
    state = np.asarray(sigma, dtype=complex)
    if mode == "exact":
        plus = sum(w * p.plus for w, p in zip(weights, pairs))
        minus = sum(w * p.minus for w, p in zip(weights, pairs))
        mixed = BlockPair(plus, minus)
        for term, w in zip(poly.terms, weights):
            for i in term.indices:
                counts[i - 1] += w * n
        state = linear_channel_power(
            lambda x: signed_lmr_step(x, mixed, delta_step, self_check=False, validate=False),
            state, n)
        return clip_to_density(state), counts
    if mode == "sampled":
        rng = seed if isinstance(seed, np.random.Generator) else substream(int(seed), "poly")
        for step in range(n):
            r = int(rng.choice(len(pairs), p=weights))
            for i in poly.terms[r].indices:
                counts[i - 1] += 1
            state = signed_lmr_step(state, pairs[r], delta_step, self_check=False, validate=False)
            if step % 256 == 255:
                state = clip_to_density(state)
        return clip_to_density(state), counts
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# Jordan-Lie expansion: products of Hermitian states as nested {.,.} / i[.,.]


@dataclass(frozen=True)
class Leaf:
    """Program state rho_j (1-based index)."""

    index: int


@dataclass(frozen=True)
class AntiComm:
    left: "JordanLieExpr"
    right: "JordanLieExpr"


@dataclass(frozen=True)
class IComm:
    """Hermitized commutator i[left, right]."""

    left: "JordanLieExpr"
    right: "JordanLieExpr"


@dataclass(frozen=True)
class Scale:
    weight: float
    node: "JordanLieExpr"


@dataclass(frozen=True)
class Sum:
    terms: tuple["JordanLieExpr", ...] = field(default_factory=tuple)


JordanLieExpr = Leaf | AntiComm | IComm | Scale | Sum


def jordan_lie_expand(indices: Sequence[int], z: complex) -> JordanLieExpr:
    """Rewrite z * rho_r1 ... rho_rk + h.c. over the Jordan-Lie basis.

    Each product step splits as AB = ({A,B} + [A,B])/2; a nesting with c
    commutators conjugates to (-1)^c times itself, so even-c nestings
    carry 2 Re(z) and odd-c nestings 2 Im(z), with an extra sign flip
    when c = 2, 3 (mod 4) from converting [.,.] to i[.,.].  Every node
    of the result evaluates to a Hermitian matrix.
    """
    indices = tuple(int(i) for i in indices)
    if len(indices) == 0:
        raise ValueError("need at least one index")
    if any(i < 1 for i in indices):
        raise ValueError(f"indices are 1-based, got {indices}")
    z = complex(z)
    k = len(indices)
    terms: list[JordanLieExpr] = []
    for pattern in range(2**(k - 1)):
        bits = [(pattern >> i) & 1 for i in range(k - 1)]
        c_count = sum(bits)
        if c_count % 2 == 0:
            weight = 2.0 * z.real * (-1.0) ** (c_count // 2)
        else:
            weight = 2.0 * z.imag * (-1.0) ** ((c_count - 1) // 2)
        weight /= 2.0 ** (k - 1)
        if weight == 0.0:
            continue
        node: JordanLieExpr = Leaf(indices[0])
        for pos, bit in enumerate(bits):
            right = Leaf(indices[pos + 1])
            node = IComm(node, right) if bit else AntiComm(node, right)
        terms.append(node if weight == 1.0 else Scale(weight, node))
    if len(terms) == 0:
        return Scale(0.0, Leaf(indices[0]))
    if len(terms) == 1:
        return terms[0]
    return Sum(tuple(terms))


def eval_jordan_lie(expr: JordanLieExpr, states: Sequence[DensityMatrix]) -> ComplexMatrix:
    """Evaluate an expression tree on concrete program states (1-based leaves)."""
    mats = [np.asarray(rho, dtype=complex) for rho in states]
    d = mats[0].shape[0]

    def go(node: JordanLieExpr) -> ComplexMatrix:
        if isinstance(node, Leaf):
            if node.index > len(mats):
                raise ValueError(f"leaf {node.index} exceeds {len(mats)} states")
            return mats[node.index - 1]
        if isinstance(node, AntiComm):
            a, b = go(node.left), go(node.right)
            return a @ b + b @ a
        if isinstance(node, IComm):
            a, b = go(node.left), go(node.right)
            return 1j * (a @ b - b @ a)
        if isinstance(node, Scale):
            return node.weight * go(node.node)
        if isinstance(node, Sum):
            total = np.zeros((d, d), dtype=complex)
            for term in node.terms:
                total = total + go(term)
            return total
        raise TypeError(f"not a JordanLieExpr node: {node!r}")

    out = go(expr)
    assert_hermitian(out, "expansion value")
    return out
