"""Linear algebra for bipartite systems: operators, partial transpose, Schmidt data.

Composite indices are A-major throughout: i = i_A * d_b + i_B.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-9
PSD_EIG_FLOOR = -1e-9
RANK_TOL = 1e-8


def _as_readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=complex, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class HermitianOperator:
    """Dense complex Hermitian matrix on a d_a x d_b bipartite system."""

    d_a: int
    d_b: int
    mat: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.d_a < 1 or self.d_b < 1:
            raise ValueError("dimensions must be positive")
        m = _as_readonly(self.mat)
        n = self.d_a * self.d_b
        if m.shape != (n, n):
            raise ValueError(f"expected shape {(n, n)}, got {m.shape}")
        dev = np.max(np.abs(m - m.conj().T))
        if dev > HERMITICITY_TOL:
            raise ValueError(f"not Hermitian: max deviation {dev:.3e}")
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return self.d_a * self.d_b

    def trace(self) -> float:
        return float(np.trace(self.mat).real)


@dataclass(frozen=True)
class DensityOperator(HermitianOperator):
    """Unit-trace positive semidefinite HermitianOperator."""

    def __post_init__(self) -> None:
        super().__post_init__()
        tr = np.trace(self.mat).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {tr} is not 1")
        lam_min = float(np.linalg.eigvalsh(self.mat)[0])
        if lam_min < PSD_EIG_FLOOR:
            raise ValueError(f"not PSD: min eigenvalue {lam_min:.3e}")


@dataclass(frozen=True)
class PureState:
    """Normalised state vector on a d_a x d_b system."""

    d_a: int
    d_b: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        v = np.array(self.amplitudes, dtype=complex, copy=True).reshape(-1)
        if v.shape != (self.d_a * self.d_b,):
            raise ValueError("amplitude vector has wrong length")
        nrm = np.linalg.norm(v)
        if abs(nrm - 1.0) > TRACE_TOL:
            raise ValueError(f"norm {nrm} is not 1")
        v.flags.writeable = False
        object.__setattr__(self, "amplitudes", v)

    def density(self) -> DensityOperator:
        v = self.amplitudes
        return DensityOperator(self.d_a, self.d_b, np.outer(v, v.conj()))


@dataclass(frozen=True)
class SchmidtVector:
    """Non-increasing, non-negative vector of Schmidt coefficients with unit l2 norm."""

    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        c = np.array(self.coefficients, dtype=float, copy=True).reshape(-1)
        if c.size == 0:
            raise ValueError("empty Schmidt vector")
        if np.any(c < -1e-12):
            raise ValueError("negative Schmidt coefficient")
        if np.any(np.diff(c) > 1e-12):
            raise ValueError("coefficients must be sorted non-increasing")
        nrm = np.linalg.norm(c)
        if abs(nrm - 1.0) > TRACE_TOL:
            raise ValueError(f"l2 norm {nrm} is not 1")
        c = np.clip(c, 0.0, None)
        c.flags.writeable = False
        object.__setattr__(self, "coefficients", c)

    @property
    def d(self) -> int:
        return int(self.coefficients.size)


def hermitian(d_a: int, d_b: int, mat: np.ndarray) -> HermitianOperator:
    """Build a HermitianOperator, symmetrising away rounding noise below tolerance."""
    m = np.asarray(mat, dtype=complex)
    return HermitianOperator(d_a, d_b, 0.5 * (m + m.conj().T))


def density(d_a: int, d_b: int, mat: np.ndarray) -> DensityOperator:
    m = np.asarray(mat, dtype=complex)
    return DensityOperator(d_a, d_b, 0.5 * (m + m.conj().T))


def inner(x: HermitianOperator | np.ndarray, y: HermitianOperator | np.ndarray) -> float:
    """Hilbert-Schmidt inner product <X,Y> = Tr(X Y), real for Hermitian arguments."""
    xm = x.mat if isinstance(x, HermitianOperator) else np.asarray(x)
    ym = y.mat if isinstance(y, HermitianOperator) else np.asarray(y)
    return float(np.tensordot(xm.conj(), ym, axes=2).real)


def partial_transpose_matrix(mat: np.ndarray, d_a: int, d_b: int) -> np.ndarray:
    """Transpose the B factor: out[(ia,jb),(ja,ib)] = mat[(ia,ib),(ja,jb)]."""
    r = mat.reshape(d_a, d_b, d_a, d_b)
    return r.transpose(0, 3, 2, 1).reshape(d_a * d_b, d_a * d_b)


def partial_transpose(x: HermitianOperator) -> HermitianOperator:
    return HermitianOperator(x.d_a, x.d_b, partial_transpose_matrix(x.mat, x.d_a, x.d_b))


def max_entangled_vector(d: int) -> np.ndarray:
    v = np.zeros(d * d, dtype=complex)
    v[:: d + 1] = 1.0 / np.sqrt(d)
    return v


def max_entangled_projector(d: int) -> HermitianOperator:
    """Projector onto the canonical maximally entangled state on a d x d system."""
    v = max_entangled_vector(d)
    return HermitianOperator(d, d, np.outer(v, v.conj()))


def schmidt_decompose(psi: PureState) -> tuple[SchmidtVector, np.ndarray, np.ndarray]:
    """Schmidt coefficients (non-increasing) and local bases of a pure state.

    Returns (xi, u, v) with psi = sum_i xi[i] * kron(u[:,i], v[:,i]).
    """
    m = psi.amplitudes.reshape(psi.d_a, psi.d_b)
    u, s, vh = np.linalg.svd(m)
    d = min(psi.d_a, psi.d_b)
    s = np.clip(s[:d], 0.0, None)
    s = s / np.linalg.norm(s)
    return SchmidtVector(s), u[:, :d], vh.T[:, :d]


def schmidt_vector_from_squares(squares: np.ndarray) -> SchmidtVector:
    """Schmidt vector from squared coefficients; normalises and sorts."""
    q = np.asarray(squares, dtype=float).reshape(-1)
    if np.any(q < -1e-12):
        raise ValueError("squared coefficients must be non-negative")
    q = np.clip(q, 0.0, None)
    tot = q.sum()
    if tot <= 0:
        raise ValueError("squared coefficients sum to zero")
    c = np.sqrt(np.sort(q / tot)[::-1])
    return SchmidtVector(c)


def pure_from_schmidt(xi: SchmidtVector, d_a: int | None = None, d_b: int | None = None) -> PureState:
    """Pure state with the given Schmidt coefficients in the computational bases."""
    d = xi.d
    d_a = d if d_a is None else d_a
    d_b = d if d_b is None else d_b
    if min(d_a, d_b) < d:
        raise ValueError("local dimensions too small for the Schmidt rank")
    v = np.zeros(d_a * d_b, dtype=complex)
    for i in range(d):
        v[i * d_b + i] = xi.coefficients[i]
    return PureState(d_a, d_b, v)


def isotropic_twirl(x: HermitianOperator) -> HermitianOperator:
    """Project onto the span of {Psi_d, 1}: the twirl over U x conj(U)."""
    if x.d_a != x.d_b:
        raise ValueError("twirl requires d_a = d_b")
    d = x.d_a
    psi = max_entangled_projector(d).mat
    p = inner(psi, x)
    t = x.trace()
    out = p * psi + (t - p) / (d * d - 1) * (np.eye(d * d) - psi)
    return HermitianOperator(d, d, out)


def isotropic_state(d: int, f: float) -> DensityOperator:
    """Twirl-invariant mixture with overlap f on the maximally entangled state."""
    if not 0.0 <= f <= 1.0:
        raise ValueError("f must lie in [0,1]")
    psi = max_entangled_projector(d).mat
    mat = f * psi + (1.0 - f) / (d * d - 1) * (np.eye(d * d) - psi)
    return DensityOperator(d, d, mat)


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(mat)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho: DensityOperator, sigma: DensityOperator) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, squared convention."""
    if rho.dim != sigma.dim:
        raise ValueError("dimension mismatch")
    s = _psd_sqrt(rho.mat)
    w = np.linalg.eigvalsh(s @ sigma.mat @ s)
    val = np.sqrt(np.clip(w, 0.0, None)).sum() ** 2
    return float(min(max(val, 0.0), 1.0 + 1e-12))


def support_projector(rho: HermitianOperator, rank_tol: float = RANK_TOL) -> HermitianOperator:
    """Projector onto eigenspaces with eigenvalue above rank_tol * lambda_max."""
    w, v = np.linalg.eigh(rho.mat)
    cut = rank_tol * max(w[-1], 0.0)
    keep = v[:, w > cut]
    return HermitianOperator(rho.d_a, rho.d_b, keep @ keep.conj().T)


def operator_rank(rho: HermitianOperator, rank_tol: float = RANK_TOL) -> int:
    w = np.linalg.eigvalsh(rho.mat)
    return int(np.count_nonzero(w > rank_tol * max(w[-1], 0.0)))


def negative_eigenspace_projector(x: HermitianOperator, tol: float = 1e-10) -> HermitianOperator:
    """Projector onto the span of eigenvectors with strictly negative eigenvalue."""
    w, v = np.linalg.eigh(x.mat)
    keep = v[:, w < -tol]
    return HermitianOperator(x.d_a, x.d_b, keep @ keep.conj().T)


def positive_negative_parts(x: HermitianOperator) -> tuple[HermitianOperator, HermitianOperator]:
    """Jordan decomposition x = P - N with P, N >= 0 and <P,N> = 0."""
    w, v = np.linalg.eigh(x.mat)
    pos = (v * np.clip(w, 0.0, None)) @ v.conj().T
    neg = (v * np.clip(-w, 0.0, None)) @ v.conj().T
    return (
        HermitianOperator(x.d_a, x.d_b, pos),
        HermitianOperator(x.d_a, x.d_b, neg),
    )


def trace_norm(mat: np.ndarray) -> float:
    """Trace norm of a Hermitian matrix (sum of absolute eigenvalues)."""
    return float(np.abs(np.linalg.eigvalsh(mat)).sum())


def pt_trace_norm(x: HermitianOperator) -> float:
    """Trace norm of the partial transpose, ||X^{T_B}||_1."""
    return trace_norm(partial_transpose_matrix(x.mat, x.d_a, x.d_b))


def tensor_pair(x: HermitianOperator, y: HermitianOperator) -> HermitianOperator:
    """Tensor product regrouped to ((A1 A2),(B1 B2)) so the B cut stays a single cut."""
    a1, b1, a2, b2 = x.d_a, x.d_b, y.d_a, y.d_b
    k = np.kron(x.mat, y.mat).reshape(a1, b1, a2, b2, a1, b1, a2, b2)
    k = k.transpose(0, 2, 1, 3, 4, 6, 5, 7).reshape(a1 * a2 * b1 * b2, -1)
    return HermitianOperator(a1 * a2, b1 * b2, k)


def max_correlated_embed(coeffs: np.ndarray) -> DensityOperator:
    """Embed a d x d density matrix into span{|ii>}: rho = sum_ij c_ij |ii><jj|."""
    c = np.asarray(coeffs, dtype=complex)
    d = c.shape[0]
    out = np.zeros((d * d, d * d), dtype=complex)
    idx = np.arange(d) * d + np.arange(d)
    out[np.ix_(idx, idx)] = c
    return DensityOperator(d, d, out)


def max_correlated_restrict(rho: HermitianOperator) -> np.ndarray:
    """Inverse of max_correlated_embed: read out the |ii><jj| block."""
    if rho.d_a != rho.d_b:
        raise ValueError("requires d_a = d_b")
    d = rho.d_a
    idx = np.arange(d) * d + np.arange(d)
    return rho.mat[np.ix_(idx, idx)].copy()


def is_max_correlated(rho: HermitianOperator, tol: float = 1e-9) -> bool:
    """True when all weight sits on the span{|ii>} block in the computational basis."""
    if rho.d_a != rho.d_b:
        return False
    block = max_correlated_embed_mask(rho.d_a)
    return bool(np.max(np.abs(rho.mat[~block])) <= tol)


def max_correlated_embed_mask(d: int) -> np.ndarray:
    idx = np.arange(d) * d + np.arange(d)
    mask = np.zeros((d * d, d * d), dtype=bool)
    mask[np.ix_(idx, idx)] = True
    return mask


def is_isotropic(rho: HermitianOperator, tol: float = 1e-9) -> bool:
    if rho.d_a != rho.d_b:
        return False
    return bool(np.max(np.abs(isotropic_twirl(rho).mat - rho.mat)) <= tol)


def is_pure(rho: DensityOperator, tol: float = 1e-8) -> bool:
    w = np.linalg.eigvalsh(rho.mat)
    return bool(w[-1] >= 1.0 - tol)


def pure_from_density(rho: DensityOperator) -> PureState:
    w, v = np.linalg.eigh(rho.mat)
    if w[-1] < 1.0 - 1e-8:
        raise ValueError("density operator is not pure")
    vec = v[:, -1]
    return PureState(rho.d_a, rho.d_b, vec / np.linalg.norm(vec))


def random_state(kind: str, dims: tuple[int, int], seed: int, *, f: float | None = None,
                 rank: int | None = None) -> DensityOperator:
    """Deterministic random states: haar_pure, ginibre_mixed, isotropic, max_correlated."""
    d_a, d_b = dims
    rng = np.random.default_rng(seed)
    if kind == "haar_pure":
        v = rng.standard_normal(d_a * d_b) + 1j * rng.standard_normal(d_a * d_b)
        v /= np.linalg.norm(v)
        return PureState(d_a, d_b, v).density()
    if kind == "ginibre_mixed":
        n = d_a * d_b
        k = n if rank is None else rank
        g = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
        m = g @ g.conj().T
        return DensityOperator(d_a, d_b, m / np.trace(m).real)
    if kind == "isotropic":
        if d_a != d_b:
            raise ValueError("isotropic states need d_a = d_b")
        fval = rng.uniform() if f is None else f
        return isotropic_state(d_a, fval)
    if kind == "max_correlated":
        if d_a != d_b:
            raise ValueError("max-correlated states need d_a = d_b")
        k = d_a if rank is None else rank
        g = rng.standard_normal((d_a, k)) + 1j * rng.standard_normal((d_a, k))
        m = g @ g.conj().T
        return max_correlated_embed(m / np.trace(m).real)
    raise ValueError(f"unknown state kind {kind!r}")


def random_haar_pure(dims: tuple[int, int], seed: int) -> PureState:
    d_a, d_b = dims
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(d_a * d_b) + 1j * rng.standard_normal(d_a * d_b)
    return PureState(d_a, d_b, v / np.linalg.norm(v))
