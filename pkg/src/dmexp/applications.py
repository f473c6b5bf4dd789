"""Protocol-level experiments: discrimination, phase estimation,
orthogonality testing, state addition, sample-based search, and the
tomography-bound comparator.

All randomness follows one discipline: measurement probabilities are
computed exactly from the final density matrix (Born rule), then
outcomes are sampled from seeded substreams keyed by (seed, trial), so
every experiment is reproducible bit for bit.  Promise violations
(overlap promises, eigenvalue gaps) are documented preconditions, not
runtime checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats

from .gadgets import commutator_gadget, signed_lmr_simulate, signed_lmr_step
from .linalg import (
    ComplexMatrix,
    DensityMatrix,
    PureState,
    clip_to_density,
    dagger,
    herm_exp,
    kron,
    projector,
    validate_pure_state,
)
from .lmr import (LmrConfig, controlled_lmr_simulate, ideal_conjugation, linear_channel_power,
                  lmr_simulate, sample_budget)
from .rng import substream

_PROTOCOLS = ("ideal", "lmr")

_P0 = np.diag([1.0, 0.0]).astype(complex)
_P1 = np.diag([0.0, 1.0]).astype(complex)
_PLUS = np.full((2, 2), 0.5, dtype=complex)
# X-basis projector pair for the control qubit
_PX = (np.array([[0.5, 0.5], [0.5, 0.5]]), np.array([[0.5, -0.5], [-0.5, 0.5]]))


def _check_protocol(protocol: str) -> None:
    if protocol not in _PROTOCOLS:
        raise ValueError(f"protocol must be one of {_PROTOCOLS}, got {protocol!r}")


@dataclass(frozen=True)
class ExperimentReport:
    """Uniform result record emitted by the experiment runners.

    curve rows are (control value, observable) pairs, e.g. (n, error).
    """

    op: str
    params: dict
    seed: int
    trials: int
    success_rate: float | None = None
    curve: tuple[tuple[float, float], ...] = ()

    def to_json(self) -> dict:
        return {
            "op": self.op,
            "params": self.params,
            "seed": self.seed,
            "trials": self.trials,
            "success_rate": self.success_rate,
            "curve": [[float(a), float(b)] for a, b in self.curve],
        }


# ---------------------------------------------------------------------------
# Two-state discrimination


@dataclass(frozen=True)
class DiscriminationTask:
    """Distinguish rho(x) from rho(x + epsilon), rho(x) = diag(x, 1-x)."""

    x: float
    epsilon: float
    eta: float
    trials: int
    seed: int

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon < self.eta < 0.5:
            raise ValueError(f"need 0 < epsilon < eta < 1/2, got eps={self.epsilon}, eta={self.eta}")
        if not self.eta < self.x < 1.0 - self.eta:
            raise ValueError(f"x must lie in ({self.eta}, {1.0 - self.eta}), got {self.x}")
        if self.trials < 1:
            raise ValueError("need at least one trial")


def diag_state(x: float) -> DensityMatrix:
    """rho(x) = x|0><0| + (1-x)|1><1|."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must be in [0, 1], got {x}")
    return np.diag([x, 1.0 - x]).astype(complex)


def discrimination_rates(x: float, epsilon: float, protocol: str = "ideal",
                         budget: LmrConfig | None = None) -> tuple[float, float]:
    """+X outcome probability under each hypothesis rho(x), rho(x + eps).

    The protocol evolves |+><+| under the hidden state for
    t = (pi/2)/eps, so the two ideal outcome distributions are exactly
    complementary.  This is the unvalidated core shared by
    `discriminate` and the CLI; promise checks live on
    DiscriminationTask.
    """
    _check_protocol(protocol)
    t = (math.pi / 2.0) / epsilon
    plus = _PLUS.copy()
    rates = []
    for rho in (diag_state(x), diag_state(x + epsilon)):
        if protocol == "ideal":
            out = ideal_conjugation(rho, t, plus)
        else:
            if budget is None:
                raise ValueError("lmr protocol needs an LmrConfig budget")
            cfg = LmrConfig(t=t, delta=budget.delta, budget_constant=budget.budget_constant,
                            n_override=budget.n_override)
            out = lmr_simulate(plus, rho, cfg)[0]
        rates.append(float(np.clip(np.real(np.trace(_PX[0] @ out)), 0.0, 1.0)))
    return rates[0], rates[1]


def discrimination_trials(p_plus: tuple[float, float], trials: int, seed: int) -> list[tuple[int, int, int]]:
    """Seeded (hidden, guess, correct) rows under the ML decision rule."""
    rows = []
    for trial in range(trials):
        rng = substream(seed, "discriminate", trial)
        hidden = int(rng.integers(2))
        outcome_plus = rng.random() < p_plus[hidden]
        if outcome_plus:
            guess = 0 if p_plus[0] >= p_plus[1] else 1
        else:
            guess = 0 if 1.0 - p_plus[0] >= 1.0 - p_plus[1] else 1
        rows.append((hidden, guess, int(guess == hidden)))
    return rows


def discriminate(task: DiscriminationTask, protocol: str = "ideal", budget: LmrConfig | None = None) -> float:
    """Empirical success rate of the evolution-based discriminator.

    Each trial hides rho(x) or rho(x + eps) behind a fair coin, runs
    e^{-i rho t} on |+><+| for t = (pi/2)/eps (exactly, or through the
    sampling protocol under `budget`, whose t field is ignored), then
    measures in the X basis and guesses by maximum likelihood.
    """
    p_plus = discrimination_rates(task.x, task.epsilon, protocol, budget)
    rows = discrimination_trials(p_plus, task.trials, task.seed)
    return sum(r[2] for r in rows) / task.trials


def binomial_tv(n: int, x: float, eps: float) -> float:
    """Exact total-variation distance between Binomial(n, x) and Binomial(n, x+eps)."""
    if not (0.0 <= x <= x + eps <= 1.0):
        raise ValueError(f"need 0 <= x <= x+eps <= 1, got x={x}, eps={eps}")
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    k = np.arange(n + 1)
    return 0.5 * float(np.sum(np.abs(stats.binom.pmf(k, n, x) - stats.binom.pmf(k, n, x + eps))))


# ---------------------------------------------------------------------------
# Iterative phase estimation (single-ancilla Hadamard tests)

ApplyPower = Callable[[DensityMatrix, int], tuple[DensityMatrix, int]]


def _kitaev_run(
    data0: DensityMatrix,
    apply_power: ApplyPower,
    k_max: int,
    reps: int,
    rng: np.random.Generator,
    fresh_data: bool,
) -> tuple[float, int, int]:
    """One full estimation run; returns (eigenphase estimate, steps, U uses).

    For each k the control undergoes a Hadamard test against
    controlled-U^(2^k); X- and Y-basis statistics give the angle
    2^k * lambda mod 2pi, and the angles are stitched coarse-to-fine.
    With fresh_data the data register is re-prepared every shot;
    otherwise it persists and measurement back-action (exact projection
    of the sampled outcome) collapses it across shots.
    """
    dim = data0.shape[0]
    data = data0.copy()
    steps_total = 0
    u_uses = 0
    shots = 0
    angles = []
    for k in range(k_max + 1):
        power = 2**k
        quad_means = []
        # control is measured along (|0> + s|1>)/sqrt(2): X basis then Y basis
        for s in (1.0, 1j):
            total = 0
            for _ in range(reps):
                if fresh_data:
                    data = data0.copy()
                joint = np.tile(0.5 * data, (2, 2))  # |+><+| (x) data, blockwise
                joint, steps = apply_power(joint, power)
                steps_total += steps
                u_uses += power
                b00 = joint[:dim, :dim]
                b01 = joint[:dim, dim:]
                b10 = joint[dim:, :dim]
                b11 = joint[dim:, dim:]
                t_diag = float(np.real(np.trace(b00) + np.trace(b11)))
                coherence = complex(np.trace(b01))
                p_plus = float(np.clip(0.5 * t_diag + np.real(s * coherence), 0.0, 1.0))
                hit = rng.random() < p_plus
                sign = s if hit else -s
                # project the control on (|0> + sign|1>)/sqrt(2); what remains
                # of the joint state is exactly the collapsed data register
                post = 0.5 * (b00 + b11 + sign * b01 + np.conj(sign) * b10)
                norm = float(np.real(np.trace(post)))
                if norm < 1e-14:
                    # numerically impossible branch; keep the pre-measurement data
                    post = b00 + b11
                    norm = 1.0
                data = (post + dagger(post)) / (2.0 * norm)
                shots += 1
                if shots % 64 == 0:  # periodic guard against float drift
                    data = clip_to_density(data)
                total += 1 if hit else -1
            quad_means.append(total / reps)
        # E[X] = cos(theta), E[Y] = sin(theta) with theta = -2^k lambda
        theta = math.atan2(quad_means[1], quad_means[0])
        angles.append((-theta) % (2.0 * math.pi))
    lam = angles[0]
    for k in range(1, k_max + 1):
        power = 2**k
        wraps = round((power * lam - angles[k]) / (2.0 * math.pi))
        lam = (angles[k] + 2.0 * math.pi * wraps) / power
    # the stitch can leave the principal window; phases live mod 2pi
    return lam % (2.0 * math.pi), steps_total, u_uses


def _controlled_power_ideal(generator: ComplexMatrix) -> ApplyPower:
    cache: dict[int, ComplexMatrix] = {}

    def apply(joint: DensityMatrix, power: int) -> tuple[DensityMatrix, int]:
        if power not in cache:
            d = generator.shape[0]
            cache[power] = kron(_P0, np.eye(d)) + kron(_P1, herm_exp(generator, float(power)))
        u = cache[power]
        return u @ joint @ dagger(u), 0

    return apply


def _controlled_power_lmr(rho: DensityMatrix, precision: float, error_scale: float) -> ApplyPower:
    def apply(joint: DensityMatrix, power: int) -> tuple[DensityMatrix, int]:
        delta = min(1.0, error_scale * precision * power)
        cfg = LmrConfig(t=float(power), delta=delta)
        return controlled_lmr_simulate(joint, rho, cfg)

    return apply


def phase_estimate(
    rho: DensityMatrix,
    precision: float,
    protocol: str = "ideal",
    seed: int = 0,
    *,
    mode: str = "eigenvector",
    eigenvector_index: int | None = None,
    runs: int = 1,
    reps: int = 32,
    per_use_error_scale: float = 0.5,
    return_details: bool = False,
) -> list[float] | tuple[list[float], dict]:
    """Estimate eigenphases of U = e^{-i rho} by iterative phase estimation.

    For k = 0 .. ceil(log2(1/precision)), controlled-U^(2^k) is applied
    to a |+> control (exactly, or through the controlled sampling
    protocol with per-use error per_use_error_scale * precision per
    unit application), and X/Y Hadamard-test statistics are stitched
    into an eigenvalue estimate, good to `precision` with probability
    at least 3/4 at the default repetition count.

    mode "eigenvector" prepares the data register in an eigenvector of
    rho (all of them, or just eigenvector_index in eigendecomposition
    ascending order) and re-prepares it each shot.  mode "spectrum"
    prepares rho itself `runs` times and lets measurement back-action
    pick an eigenvector per run.  With return_details, also returns
    {"lmr_steps": total protocol steps, "u_uses": controlled-U
    applications, "k_max": top power index}.
    """
    _check_protocol(protocol)
    if not 0.0 < precision < 0.5:
        raise ValueError(f"precision must be in (0, 1/2), got {precision}")
    rho = np.asarray(rho, dtype=complex)
    k_max = math.ceil(math.log2(1.0 / precision))
    estimates: list[float] = []
    steps_total = 0
    u_total = 0
    if mode == "eigenvector":
        eigs, vecs = np.linalg.eigh(rho)
        indices = range(len(eigs)) if eigenvector_index is None else [eigenvector_index]
        for run_id, idx in enumerate(indices):
            data0 = projector(vecs[:, idx])
            apply = (
                _controlled_power_ideal(rho)
                if protocol == "ideal"
                else _controlled_power_lmr(rho, precision, per_use_error_scale)
            )
            rng = substream(seed, "phase", run_id, idx)
            lam, steps, uses = _kitaev_run(data0, apply, k_max, reps, rng, fresh_data=True)
            estimates.append(lam)
            steps_total += steps
            u_total += uses
    elif mode == "spectrum":
        for run_id in range(runs):
            apply = (
                _controlled_power_ideal(rho)
                if protocol == "ideal"
                else _controlled_power_lmr(rho, precision, per_use_error_scale)
            )
            rng = substream(seed, "phase-spectrum", run_id)
            lam, steps, uses = _kitaev_run(rho.copy(), apply, k_max, reps, rng, fresh_data=False)
            estimates.append(lam)
            steps_total += steps
            u_total += uses
    else:
        raise ValueError(f"mode must be 'eigenvector' or 'spectrum', got {mode!r}")
    if return_details:
        return estimates, {"lmr_steps": steps_total, "u_uses": u_total, "k_max": k_max}
    return estimates


# ---------------------------------------------------------------------------
# Orthogonality testing via commutator evolution


def _pad_states(psi1: PureState, psi2: PureState) -> tuple[PureState, PureState]:
    """Append |0> to psi1 and |+> to psi2, halving the squared overlap."""
    zero = np.array([1.0, 0.0], dtype=complex)
    plus = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
    return np.kron(psi1, zero), np.kron(psi2, plus)


def _controlled_commutator_lmr(
    pad1: PureState, pad2: PureState, precision: float, error_scale: float
) -> ApplyPower:
    """Controlled e^{-i H_c t}, H_c = i[P1, P2], via the commutator gadget.

    Priming each projector with |1><1| on the control makes the gadget
    generator |1><1| (x) H_c / 2, so the plain signed protocol on the
    control+data register enacts the controlled evolution; running for
    time 2t compensates the 1/2.
    """
    prime1 = kron(_P1, projector(pad1))
    prime2 = kron(_P1, projector(pad2))
    pair = commutator_gadget(prime1, prime2, math.pi / 2.0)

    def apply(joint: DensityMatrix, power: int) -> tuple[DensityMatrix, int]:
        delta = min(1.0, error_scale * precision * power)
        cfg = LmrConfig(t=2.0 * power, delta=delta)
        n = sample_budget(cfg)
        step = cfg.t / n
        state = linear_channel_power(
            lambda x: signed_lmr_step(x, pair, step, self_check=False, validate=False), joint, n)
        return clip_to_density(state), n

    return apply


def orthogonality_test(
    psi1: PureState,
    psi2: PureState,
    w: float,
    eps_fail: float,
    protocol: str = "ideal",
    seed: int = 0,
    *,
    reps: int = 32,
    precision_scale: float = 0.2,
    threshold_scale: float = 0.3,
    per_use_error_scale: float = 0.5,
) -> str:
    """Decide whether |<psi1|psi2>|^2 is zero or at least w.

    Padding the states halves the squared overlap lam, making
    U = exp([P1~, P2~]) a rotation by sqrt(lam/2 (1 - lam/2)) >=
    sqrt(w)/2 in a two-dimensional subspace containing psi1~.  Phase
    estimation at precision precision_scale*sqrt(w) then separates zero
    rotation from the promised minimum; majority voting over
    O(log(1/eps_fail)) runs drives the failure rate below eps_fail.
    Under the orthogonal promise the commutator vanishes identically,
    so ideal mode can never report overlapping.
    """
    _check_protocol(protocol)
    validate_pure_state(psi1, "psi1")
    validate_pure_state(psi2, "psi2")
    if not 0.0 < w <= 1.0:
        raise ValueError(f"w must be in (0, 1], got {w}")
    if not 0.0 < eps_fail < 1.0:
        raise ValueError(f"eps_fail must be in (0, 1), got {eps_fail}")
    pad1, pad2 = _pad_states(psi1, psi2)
    p1, p2 = projector(pad1), projector(pad2)
    generator = 1j * (p1 @ p2 - p2 @ p1)
    precision = precision_scale * math.sqrt(w)
    threshold = threshold_scale * math.sqrt(w)
    k_max = math.ceil(math.log2(1.0 / precision))
    repeats = max(1, math.ceil(math.log2(1.0 / eps_fail)))
    if repeats % 2 == 0:
        repeats += 1
    votes = 0
    for rep in range(repeats):
        if protocol == "ideal":
            apply = _controlled_power_ideal(generator)
        else:
            apply = _controlled_commutator_lmr(pad1, pad2, precision, per_use_error_scale)
        rng = substream(seed, "ortho", rep)
        lam, _, _ = _kitaev_run(p1.copy(), apply, k_max, reps, rng, fresh_data=False)
        dist = abs(math.remainder(lam, 2.0 * math.pi))
        votes += int(dist >= threshold)
    return "overlapping" if votes > repeats // 2 else "orthogonal"


# ---------------------------------------------------------------------------
# Coherent state addition


def add_states(
    psi1: PureState,
    psi2: PureState,
    chi: float,
    protocol: str = "ideal",
    budget: LmrConfig | None = None,
) -> DensityMatrix:
    """Rotate psi1 toward psi2 through the commutator Hamiltonian.

    With Delta = arccos|<psi1|psi2>|, evolving psi1 under
    H = i[P2, P1] for time chi/(cos Delta sin Delta) produces the
    superposition (sin(Delta-chi) psi1 + e^{i phi} sin(chi) psi2)/sin
    Delta; chi = 0 returns psi1 and chi = Delta lands on psi2 up to a
    phase.  Fails (by rejection) when the states are parallel or
    orthogonal, where the commutator vanishes.
    """
    _check_protocol(protocol)
    validate_pure_state(psi1, "psi1")
    validate_pure_state(psi2, "psi2")
    overlap = complex(np.vdot(psi1, psi2))
    delta_angle = math.acos(min(1.0, abs(overlap)))
    if delta_angle < 1e-8 or abs(delta_angle - math.pi / 2.0) < 1e-8:
        raise ValueError(f"overlap angle {delta_angle:.3e} is degenerate; the commutator vanishes")
    t = chi / (math.cos(delta_angle) * math.sin(delta_angle))
    p1, p2 = projector(psi1), projector(psi2)
    if protocol == "ideal":
        return ideal_conjugation(1j * (p2 @ p1 - p1 @ p2), t, p1)
    if budget is None:
        raise ValueError("lmr protocol needs an LmrConfig budget")
    pair = commutator_gadget(p2, p1, math.pi / 2.0)
    cfg = LmrConfig(t=2.0 * t, delta=budget.delta, budget_constant=budget.budget_constant,
                    n_override=budget.n_override)
    out, _ = signed_lmr_simulate(p1, pair, cfg)
    return out


def addition_target(psi1: PureState, psi2: PureState, chi: float) -> PureState:
    """Closed-form target (sin(Delta-chi) psi1 + e^{i phi} sin(chi) psi2)/sin Delta."""
    overlap = complex(np.vdot(psi1, psi2))
    delta_angle = math.acos(min(1.0, abs(overlap)))
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    vec = (math.sin(delta_angle - chi) * psi1 + phase * math.sin(chi) * psi2) / math.sin(delta_angle)
    return vec / np.linalg.norm(vec)


# ---------------------------------------------------------------------------
# Sample-based Grover search


@dataclass(frozen=True)
class GroverTask:
    """Search instance: find whether the start state overlaps the target space.

    target_projector must be Hermitian idempotent; the promise is that
    lambda = <s|P_T|s> is either 0 or at least w.
    """

    target_projector: ComplexMatrix
    w: float
    epsilon_fail: float
    state_budget_delta: float

    def __post_init__(self) -> None:
        proj = np.asarray(self.target_projector, dtype=complex)
        object.__setattr__(self, "target_projector", proj)
        if np.max(np.abs(proj - dagger(proj))) > 1e-10 or np.max(np.abs(proj @ proj - proj)) > 1e-10:
            raise ValueError("target_projector must be Hermitian idempotent within 1e-10")
        if not 0.0 < self.w <= 1.0:
            raise ValueError(f"w must be in (0, 1], got {self.w}")
        if not 0.0 < self.epsilon_fail < 1.0:
            raise ValueError(f"epsilon_fail must be in (0, 1), got {self.epsilon_fail}")
        if not 0.0 < self.state_budget_delta <= 1.0:
            raise ValueError(f"state_budget_delta must be in (0, 1], got {self.state_budget_delta}")


def sample_grover(
    task: GroverTask,
    start: PureState,
    protocol: str = "ideal",
    seed: int = 0,
    *,
    growth: float = 1.2,
    schedule_constant: float = 6.0,
) -> str:
    """Amplitude amplification with the start reflection built from copies.

    The target reflection R_T = 1 - 2 P_T is exact (checking membership
    is free); the start reflection R_s = e^{-i pi |s><s|} is exact in
    ideal mode or synthesized by the sampling protocol at per-use error
    state_budget_delta.  Iterate counts follow the exponentially
    growing randomized schedule: each round draws k uniformly below a
    cap that grows by `growth` per miss, and the total iterate budget
    is ceil(schedule_constant * ln(1/epsilon_fail) / sqrt(w)).  Each
    round measures the target projector on a fresh iterated copy.
    """
    _check_protocol(protocol)
    validate_pure_state(start, "start")
    p_t = task.target_projector
    if p_t.shape[0] != start.shape[0]:
        raise ValueError(f"projector dim {p_t.shape[0]} vs start dim {start.shape[0]}")
    r_t = np.eye(p_t.shape[0]) - 2.0 * p_t
    rho_s = projector(start)
    rng = substream(seed, "grover")

    def reflect_start(sigma: DensityMatrix) -> DensityMatrix:
        if protocol == "ideal":
            u = np.eye(rho_s.shape[0]) - 2.0 * rho_s
            return u @ sigma @ dagger(u)
        cfg = LmrConfig(t=math.pi, delta=task.state_budget_delta)
        return lmr_simulate(sigma, rho_s, cfg)[0]

    budget = math.ceil(schedule_constant * math.log(1.0 / task.epsilon_fail) / math.sqrt(task.w))
    cap = max(3.0, math.ceil(1.0 / math.sqrt(task.w)) + 1.0)
    m = 1.0
    used = 0
    while used < budget:
        k = int(rng.integers(0, max(1, math.ceil(m))))
        k = min(k, budget - used)
        sigma = rho_s.copy()
        for _ in range(k):
            sigma = reflect_start(r_t @ sigma @ dagger(r_t))
            used += 1
        p_hit = float(np.clip(np.real(np.trace(p_t @ sigma)), 0.0, 1.0))
        if rng.random() < p_hit:
            return "found"
        used += 1 if k == 0 else 0  # a zero-iterate round still spends one probe
        m = min(m * growth, cap)
    return "not_found"


# ---------------------------------------------------------------------------
# Tomography sample-count comparator


def tomography_bound(d: int, r: int, t: float, delta: float) -> float:
    """Shape of the copy count full tomography would need for the same task.

    Evaluates d r (t - delta)^2 / (delta^2 ln(d t / (r delta)))
    + t^2 / delta^2 with unit leading constant; meaningful as a
    comparator against the ceil(4 t^2 / delta) protocol budget, not as
    an absolute count.
    """
    if not (isinstance(d, (int, np.integer)) and isinstance(r, (int, np.integer))):
        raise ValueError("d and r must be integers")
    if not d >= r >= 1:
        raise ValueError(f"need d >= r >= 1, got d={d}, r={r}")
    if not t > delta > 0.0:
        raise ValueError(f"need t > delta > 0, got t={t}, delta={delta}")
    log_arg = d * t / (r * delta)
    if log_arg <= 1.0:
        raise ValueError(f"log argument d t/(r delta) = {log_arg:.6f} must exceed 1")
    return d * r * (t - delta) ** 2 / (delta**2 * math.log(log_arg)) + t**2 / delta**2
