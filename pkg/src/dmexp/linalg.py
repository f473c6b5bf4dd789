"""Dense linear algebra kernels for density matrix experiments.

Everything in this package runs at desk scale (dimensions up to a few
dozen), so all operators are dense complex arrays and all spectral work
goes through exact eigendecompositions.  Three array aliases are used
throughout:

* ``ComplexMatrix``: any square complex matrix.
* ``DensityMatrix``: Hermitian, positive semidefinite, unit trace.
* ``PureState``: one-dimensional unit vector.

Validation uses the 1e-10 tolerance class; self-checks of closed-form
identities use the stricter 1e-12 class.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np
import numpy.typing as npt

ComplexMatrix = npt.NDArray[np.complex128]
DensityMatrix = npt.NDArray[np.complex128]
PureState = npt.NDArray[np.complex128]

ATOL_VALIDATE = 1e-10
ATOL_EXACT = 1e-12


def dagger(m: ComplexMatrix) -> ComplexMatrix:
    return np.asarray(m).conj().T


def is_hermitian(m: ComplexMatrix, atol: float = ATOL_VALIDATE) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and bool(np.max(np.abs(m - dagger(m))) <= atol)


def assert_hermitian(m: ComplexMatrix, name: str = "matrix", atol: float = ATOL_VALIDATE) -> None:
    if not is_hermitian(m, atol):
        raise ValueError(f"{name} is not Hermitian within {atol}")


def assert_unitary(u: ComplexMatrix, name: str = "matrix", atol: float = ATOL_VALIDATE) -> None:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"{name} must be square, got shape {u.shape}")
    if np.max(np.abs(u @ dagger(u) - np.eye(u.shape[0]))) > atol:
        raise ValueError(f"{name} is not unitary within {atol}")


def validate_density_matrix(rho: DensityMatrix, name: str = "state", atol: float = ATOL_VALIDATE) -> None:
    """Raise unless rho is Hermitian, PSD, and unit trace within atol."""
    rho = np.asarray(rho)
    assert_hermitian(rho, name, atol)
    eigs = np.linalg.eigvalsh(rho)
    if eigs[0] < -atol:
        raise ValueError(f"{name} has negative eigenvalue {eigs[0]:.3e}")
    if abs(np.trace(rho) - 1.0) > atol:
        raise ValueError(f"{name} has trace {np.trace(rho):.12f}, expected 1")


def is_density_matrix(rho: DensityMatrix, atol: float = ATOL_VALIDATE) -> bool:
    try:
        validate_density_matrix(rho, atol=atol)
    except ValueError:
        return False
    return True


def validate_pure_state(psi: PureState, name: str = "state", atol: float = ATOL_VALIDATE) -> None:
    psi = np.asarray(psi)
    if psi.ndim != 1:
        raise ValueError(f"{name} must be a vector, got shape {psi.shape}")
    if abs(np.linalg.norm(psi) - 1.0) > atol:
        raise ValueError(f"{name} has norm {np.linalg.norm(psi):.12f}, expected 1")


def clip_to_density(rho: DensityMatrix, atol: float = ATOL_VALIDATE) -> DensityMatrix:
    """Repair roundoff on a nominal density matrix.

    Eigenvalues in [-atol, 0) are clipped to zero and the trace is
    renormalized.  Anything more negative than -atol is a genuine
    invariant violation and raises.
    """
    rho = np.asarray(rho)
    herm = 0.5 * (rho + dagger(rho))
    if np.max(np.abs(rho - herm)) > atol:
        raise ValueError(f"state is not Hermitian within {atol}")
    eigs, vecs = np.linalg.eigh(herm)
    if eigs[0] < -atol:
        raise ValueError(f"state has negative eigenvalue {eigs[0]:.3e}")
    eigs = np.clip(eigs, 0.0, None)
    out = (vecs * eigs) @ dagger(vecs)
    return out / np.trace(out).real


def ket(index: int, dim: int) -> PureState:
    """Computational basis vector |index> in the given dimension."""
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector(psi: PureState) -> DensityMatrix:
    """Rank-one density matrix |psi><psi|."""
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def kron(*ops: ComplexMatrix) -> ComplexMatrix:
    """Kronecker product of two or more operators, left to right."""
    if len(ops) < 2:
        raise ValueError("kron needs at least two factors")
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def partial_trace(m: ComplexMatrix, dims: Sequence[int], which: int | Iterable[int]) -> ComplexMatrix:
    """Trace out the subsystems listed in `which`.

    `dims` gives the tensor factor dimensions of m in order; `which`
    indexes into `dims`.  Returns the operator on the remaining factors
    in their original order.
    """
    dims = tuple(int(d) for d in dims)
    traced = (which,) if isinstance(which, (int, np.integer)) else tuple(which)
    m = np.asarray(m, dtype=complex)
    total = int(np.prod(dims))
    if m.shape != (total, total):
        raise ValueError(f"matrix shape {m.shape} does not match dims {dims}")
    if any(w < 0 or w >= len(dims) for w in traced) or len(set(traced)) != len(traced):
        raise ValueError(f"invalid subsystems {traced} for {len(dims)} factors")
    if len(traced) == len(dims):
        return np.array([[np.trace(m)]], dtype=complex)
    t = m.reshape(dims + dims)
    for ax in sorted(traced, reverse=True):
        half = t.ndim // 2
        t = np.trace(t, axis1=ax, axis2=ax + half)
    kept = int(np.prod([d for i, d in enumerate(dims) if i not in traced]))
    return t.reshape(kept, kept)


def permute_subsystems(m: ComplexMatrix, dims: Sequence[int], perm: Sequence[int]) -> ComplexMatrix:
    """Reorder tensor factors so new factor i is old factor perm[i]."""
    dims = tuple(int(d) for d in dims)
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(len(dims))):
        raise ValueError(f"perm {perm} is not a permutation of {len(dims)} factors")
    m = np.asarray(m, dtype=complex)
    k = len(dims)
    t = m.reshape(dims + dims)
    t = t.transpose(perm + tuple(p + k for p in perm))
    total = int(np.prod(dims))
    return t.reshape(total, total)


def swap_operator(d: int) -> ComplexMatrix:
    """Unitary S with S(|a> ⊗ |b>) = |b> ⊗ |a> on two d-dimensional factors."""
    s = np.zeros((d * d, d * d), dtype=complex)
    for a in range(d):
        for b in range(d):
            s[b * d + a, a * d + b] = 1.0
    return s


def cyclic_shift(k: int, d: int) -> ComplexMatrix:
    """Permutation sending |j1, ..., jk> to |jk, j1, ..., j_{k-1}>.

    For k = 2 this is the swap operator; for k = 1 the identity.
    """
    if k < 1:
        raise ValueError(f"need at least one factor, got k={k}")
    shape = (d,) * k
    n = d**k
    s = np.zeros((n, n), dtype=complex)
    for col in range(n):
        digits = np.unravel_index(col, shape)
        row = np.ravel_multi_index((digits[-1],) + digits[:-1], shape)
        s[row, col] = 1.0
    return s


def herm_exp(h: ComplexMatrix, t: float = 1.0) -> ComplexMatrix:
    """Unitary exp(-i h t) of a Hermitian generator, by eigendecomposition."""
    h = np.asarray(h, dtype=complex)
    assert_hermitian(h, "generator")
    eigs, vecs = np.linalg.eigh(h)
    return (vecs * np.exp(-1j * eigs * t)) @ dagger(vecs)


def trace_distance(a: ComplexMatrix, b: ComplexMatrix) -> float:
    """Half the sum of singular values of (a - b)."""
    diff = np.asarray(a, dtype=complex) - np.asarray(b, dtype=complex)
    return 0.5 * float(np.sum(np.linalg.svd(diff, compute_uv=False)))


def pure_fidelity(psi: PureState, rho: DensityMatrix) -> float:
    """Overlap <psi|rho|psi> of a pure target with a mixed state."""
    psi = np.asarray(psi, dtype=complex)
    return float(np.real(np.vdot(psi, np.asarray(rho, dtype=complex) @ psi)))


def _convex_hull(points: np.ndarray) -> np.ndarray:
    """Monotone-chain hull of 2D points, counterclockwise; degenerate
    inputs collapse to their extreme points."""
    pts = np.unique(np.round(points, 14), axis=0)
    if len(pts) <= 2:
        return pts
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[np.ndarray] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[np.ndarray] = []
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def _dist_to_segment(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.linalg.norm(p - a))
    s = float(np.clip((p - a) @ ab / denom, 0.0, 1.0))
    return float(np.linalg.norm(p - (a + s * ab)))


def unitary_diamond_distance(u: ComplexMatrix, v: ComplexMatrix) -> float:
    """Half the diamond distance between the channels of two unitaries.

    Equals sqrt(1 - d^2) where d is the distance from the origin to the
    convex hull of the eigenvalues of u† v; the hull test replaces the
    usual semidefinite program, which would be overkill for unitaries.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    assert_unitary(u, "u")
    assert_unitary(v, "v")
    if u.shape != v.shape:
        raise ValueError(f"shape mismatch {u.shape} vs {v.shape}")
    eigs = np.linalg.eigvals(dagger(u) @ v)
    points = np.column_stack([eigs.real, eigs.imag])
    hull = _convex_hull(points)
    origin = np.zeros(2)
    if len(hull) == 1:
        d = float(np.linalg.norm(hull[0]))
    elif len(hull) == 2:
        d = _dist_to_segment(origin, hull[0], hull[1])
    else:
        inside = all(
            (hull[(i + 1) % len(hull)][0] - hull[i][0]) * (0.0 - hull[i][1])
            - (hull[(i + 1) % len(hull)][1] - hull[i][1]) * (0.0 - hull[i][0])
            >= -1e-14
            for i in range(len(hull))
        )
        if inside:
            d = 0.0
        else:
            d = min(
                _dist_to_segment(origin, hull[i], hull[(i + 1) % len(hull)])
                for i in range(len(hull))
            )
    return float(np.sqrt(max(0.0, 1.0 - d * d)))


def hadamard_series(a: ComplexMatrix, b: ComplexMatrix, order: int) -> ComplexMatrix:
    """Truncated nested-commutator series for e^A b e^{-A}.

    Returns sum_{n=0}^{order} [a, b]_n / n! with [a, b]_0 = b and
    [a, b]_n = [a, [a, b]_{n-1}].
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"need square matrices of equal shape, got {a.shape} and {b.shape}")
    if order < 0:
        raise ValueError(f"order must be nonnegative, got {order}")
    term = b.copy()
    total = b.copy()
    for n in range(1, order + 1):
        term = (a @ term - term @ a) / n
        total = total + term
    return total


def random_pure_state(dim: int, rng: int | np.random.Generator) -> PureState:
    """Haar-random unit vector."""
    if not isinstance(rng, np.random.Generator):
        from .rng import substream

        rng = substream(int(rng), "pure", dim)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_state(dim: int, rank: int, seed: int | np.random.Generator) -> DensityMatrix:
    """Random density matrix of the given rank.

    Drawn by tracing an environment of dimension `rank` out of a Haar
    random pure state, i.e. the induced (Ginibre) measure.
    """
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must be in [1, {dim}], got {rank}")
    if isinstance(seed, np.random.Generator):
        rng = seed
    else:
        from .rng import substream

        rng = substream(int(seed), "state", dim, rank)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def state_to_json(rho: DensityMatrix) -> dict:
    """Serialize a density matrix to the interchange dict form.

    Format: {"dim": d, "entries": [[re, im], ...]} with entries row-major.
    """
    rho = np.asarray(rho, dtype=complex)
    validate_density_matrix(rho)
    flat = rho.reshape(-1)
    return {"dim": int(rho.shape[0]), "entries": [[float(z.real), float(z.imag)] for z in flat]}


def state_from_json(data: dict) -> DensityMatrix:
    """Parse and validate the interchange dict form of a density matrix."""
    dim = int(data["dim"])
    entries = data["entries"]
    if len(entries) != dim * dim:
        raise ValueError(f"expected {dim * dim} entries, got {len(entries)}")
    flat = np.array([complex(re, im) for re, im in entries])
    rho = flat.reshape(dim, dim)
    validate_density_matrix(rho, "loaded state")
    return rho
