"""Closed-form fast paths for pure, isotropic, and maximally correlated states.

The workhorse is the m-distillation norm of a Schmidt vector,
||x||_[m] = max{<x,w> : ||w||_inf <= 1, ||w||_2 <= sqrt(m)},
which admits an exact head/tail split.  Pure-state fidelities and rates are
rational functions of it; isotropic states reduce to a four-inequality linear
program; maximally correlated states reduce to single-party programs over
diagonal-bounded witnesses.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .bipartite import (
    DensityOperator,
    HermitianOperator,
    SchmidtVector,
    inner,
    max_correlated_embed,
    max_correlated_restrict,
    is_max_correlated,
    max_entangled_projector,
    support_projector,
)
from .solver import (
    ConicProgram,
    SolverSettings,
    const_expr,
    inner_expr,
)

# An integer m counts as achievable when the fidelity clears (1-eps) - guard;
# every rate route in the package shares this constant so they can be compared.
ACHIEVABILITY_GUARD = 1e-7


def floor_count(v: float) -> int:
    """Largest integer k with k * v <= 1, up to the shared boundary guard."""
    if v <= 0.0:
        raise ValueError("positive threshold required")
    return max(1, int(np.floor((1.0 + ACHIEVABILITY_GUARD) / v + 1e-12)))


def log2_int(k: int) -> float:
    return float(np.log2(k))


# ---------------------------------------------------------------------------
# The m-distillation norm.


@dataclass(frozen=True)
class MNormResult:
    """Value and optimal head/tail split of the m-distillation norm."""

    value: float
    k_star: int
    split: tuple[float, float]  # (head l1 mass, tail l2 mass)


def _norm_split(x: np.ndarray, m: int) -> MNormResult:
    """Split form on a sorted non-increasing non-negative vector."""
    d = x.size
    sq = x * x
    best_k, best_ratio = 1, None
    for k in range(1, m + 1):
        lo = min(m - k, d)  # 0-based start of the tail window
        ratio = float(sq[lo:].sum()) / k
        if best_ratio is None or ratio < best_ratio:
            best_ratio, best_k = ratio, k
    lo = min(m - best_k, d)
    head = float(x[:lo].sum())
    tail = float(np.sqrt(sq[lo:].sum()))
    return MNormResult(head + np.sqrt(best_k) * tail, best_k, (head, tail))


def m_distillation_norm(xi: SchmidtVector, m: int) -> MNormResult:
    """||xi||_[m]: l1 mass of the head plus sqrt(k*) times l2 mass of the tail.

    k* minimises ||x_{m-k+1:d}||_2^2 / k over k in 1..m, smallest k on ties.
    For m = 1 this is the l2 norm, for m >= d the l1 norm.
    """
    m = int(m)
    if m < 1:
        raise ValueError("m must be at least 1")
    return _norm_split(xi.coefficients, m)


def m_norm_vector(v: np.ndarray, m: int) -> float:
    """The norm extended to arbitrary real vectors (sort of absolute values)."""
    x = np.sort(np.abs(np.asarray(v, dtype=float).reshape(-1)))[::-1]
    return _norm_split(x, int(m)).value


def m_norm_dual(v: np.ndarray, m: float) -> tuple[float, np.ndarray]:
    """max{<x,w> : ||w||_inf <= 1, ||w||_2 <= sqrt(m)} by water-filling.

    Independent of the split form: scans head sizes j for the unique
    consistency window x_j >= nu >= x_{j+1} with nu = ||x_{j+1:}||_2 / sqrt(m-j).
    Accepts any real m >= 1 and returns (value, w) on the sorted order of |v|.
    """
    if m < 1.0:
        raise ValueError("m must be at least 1")
    x = np.sort(np.abs(np.asarray(v, dtype=float).reshape(-1)))[::-1]
    d = x.size
    if m >= d:
        return float(x.sum()), np.ones(d)
    best_val, best_w = None, None
    for j in range(0, d + 1):
        if j > m + 1e-12:
            break
        tail_norm = float(np.linalg.norm(x[j:]))
        if tail_norm == 0.0:
            val = float(x[:j].sum())
            w = np.concatenate([np.ones(j), np.zeros(d - j)])
        else:
            rem = m - j
            if rem <= 0.0:
                continue
            nu = tail_norm / np.sqrt(rem)
            # window tolerances scale with nu so tiny vectors cannot sneak
            # an infeasible head/tail split past the screen
            if j > 0 and x[j - 1] < nu * (1.0 - 1e-12):
                continue
            if j < d and x[j] > nu * (1.0 + 1e-12):
                continue
            val = float(x[:j].sum()) + np.sqrt(rem) * tail_norm
            w = np.concatenate([np.ones(j), x[j:] / nu])
        if best_val is None or val > best_val:
            best_val, best_w = val, w
    if best_val is None:
        raise RuntimeError("water-filling scan found no consistent split")
    return best_val, best_w


def majorisation_ansatz(xi: SchmidtVector, m: int) -> SchmidtVector:
    """Target Schmidt vector built from the optimal split: head kept, tail flattened.

    Its squared coefficients majorise those of xi, certifying that the
    closed-form fidelity is reachable by a deterministic pure-state protocol.
    """
    res = m_distillation_norm(xi, m)
    x = xi.coefficients
    lo = min(m - res.k_star, x.size)
    flat = res.split[1] / np.sqrt(res.k_star)
    coeffs = np.concatenate([x[:lo], np.full(res.k_star, flat)])
    coeffs = np.sort(coeffs)[::-1]
    nrm = np.linalg.norm(coeffs)
    return SchmidtVector(coeffs / nrm if nrm > 0 else coeffs)


def majorises(p: np.ndarray, q: np.ndarray, tol: float = 1e-10) -> bool:
    """True when p majorises q: every partial sum of sorted p dominates q's."""
    a = np.sort(np.asarray(p, dtype=float))[::-1]
    b = np.sort(np.asarray(q, dtype=float))[::-1]
    n = max(a.size, b.size)
    a = np.pad(a, (0, n - a.size))
    b = np.pad(b, (0, n - b.size))
    return bool(np.all(np.cumsum(a) >= np.cumsum(b) - tol))


# ---------------------------------------------------------------------------
# Pure states.


def pure_fidelity(xi: SchmidtVector, m: int) -> float:
    """Fidelity of distilling an m-level maximally entangled state: ||xi||_[m]^2 / m."""
    if m < 1:
        raise ValueError("m must be at least 1")
    return m_distillation_norm(xi, m).value ** 2 / m


def pure_rate(xi: SchmidtVector, eps: float) -> tuple[float, int]:
    """One-shot rate for a pure state: log2 of the largest achievable m.

    Descending integer scan; the scan cap extends above the Schmidt rank to
    cover the l1 regime where the fidelity decays like 1/m.
    """
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must lie in [0, 1)")
    l1 = float(xi.coefficients.sum())
    cap = max(xi.d, int(np.floor(l1 * l1 / (1.0 - eps))) + 1)
    thresh = (1.0 - eps) - ACHIEVABILITY_GUARD
    for m in range(cap, 0, -1):
        if pure_fidelity(xi, m) >= thresh:
            return log2_int(m), m
    return 0.0, 1


def pure_rate_qcqp(xi: SchmidtVector, eps: float,
                   settings: SolverSettings | None = None) -> tuple[float, int]:
    """Rate cross-check: minimise ||w||_inf over unit-ball vectors with <xi,w> >= sqrt(1-eps).

    The largest achievable m is the floor of 1 / ||w||_inf^2 at the optimum.
    Solved as a conic program with the l2 ball as a 2x2-block PSD (arrow) matrix.
    """
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must lie in [0, 1)")
    d = xi.d
    prog = ConicProgram("pure_rate_qcqp")
    s = prog.scalar_variable("s")
    ws = [prog.scalar_variable(f"w{i}") for i in range(d)]
    # [[1, w^T], [w, I]] >= 0 encodes ||w||_2 <= 1.
    arrow = const_expr(np.eye(d + 1))
    for i, wv in enumerate(ws):
        c = np.zeros((d + 1, d + 1))
        c[0, i + 1] = c[i + 1, 0] = 1.0
        arrow = arrow + wv.times(c)
    prog.psd(arrow)
    overlap = None
    for i, wv in enumerate(ws):
        prog.ineq(wv.expr())
        prog.ineq(s.expr() - wv.expr())
        term = float(xi.coefficients[i]) * wv.expr()
        overlap = term if overlap is None else overlap + term
    prog.ineq(overlap - float(np.sqrt(1.0 - eps)))
    prog.minimize(s.expr())
    report = prog.solve(settings).require_optimal()
    s_opt = float(report.primal_value)
    k = floor_count(s_opt * s_opt)
    return log2_int(k), k


def pure_t_monotone(xi: SchmidtVector, m: float) -> float:
    """T^m for a pure state: ||xi||_[m+1]^2 - 1, via the dual form for real m."""
    if m < 0.0:
        raise ValueError("m must be non-negative")
    if m == 0.0:
        return 0.0
    val, _ = m_norm_dual(xi.coefficients, m + 1.0)
    return val * val - 1.0


def pure_robustness(xi: SchmidtVector) -> float:
    """Generalised robustness of a pure state: squared l1 norm minus one."""
    l1 = float(xi.coefficients.sum())
    return l1 * l1 - 1.0


def pure_zero_error(xi: SchmidtVector) -> tuple[float, int]:
    """Zero-error rate from a pure state: log2 floor(1 / max squared coefficient)."""
    k = floor_count(float(xi.coefficients[0] ** 2))
    return log2_int(k), k


# ---------------------------------------------------------------------------
# Isotropic states.


@dataclass(frozen=True)
class IsotropicState:
    """Twirl-invariant state with overlap f on the maximally entangled state."""

    d: int
    f: float

    def __post_init__(self) -> None:
        if self.d < 2:
            raise ValueError("d must be at least 2")
        if not 0.0 <= self.f <= 1.0:
            raise ValueError("f must lie in [0, 1]")

    def density(self) -> DensityOperator:
        psi = max_entangled_projector(self.d).mat
        n = self.d * self.d
        mat = self.f * psi + (1.0 - self.f) / (n - 1) * (np.eye(n) - psi)
        return DensityOperator(self.d, self.d, mat)


def isotropic_fidelity(iso: IsotropicState, m: int) -> float:
    """Distillation fidelity of an isotropic state, identical for all classes."""
    if m < 1:
        raise ValueError("m must be at least 1")
    d, f = iso.d, iso.f
    if f <= 1.0 / d:
        return 1.0 / m
    return (d * f - 1.0) / (d - 1.0) + d * (1.0 - f) / (m * (d - 1.0))


def isotropic_sep_lp(rho: DensityOperator | IsotropicState, m: int) -> float:
    """Linear-program lower bound on the SEP fidelity from the twirled overlap.

    Maximises alpha <rho, Psi_d> + beta over witnesses alpha Psi_d + beta 1
    whose distillation map is separable; tight on isotropic states.
    """
    if isinstance(rho, IsotropicState):
        d, p = rho.d, rho.f
    else:
        if rho.d_a != rho.d_b:
            raise ValueError("the bound needs d_a = d_b")
        d = rho.d_a
        p = inner(max_entangled_projector(d), rho)
    m = int(m)
    if m < 1:
        raise ValueError("m must be at least 1")
    dm = float(d * m)
    a_ub = np.array([
        [0.0, -1.0],           # beta >= 0
        [0.0, 1.0],            # beta <= 1
        [-1.0, -1.0],          # alpha + beta >= 0
        [1.0, 1.0],            # alpha + beta <= 1
        [m, -dm],              # d - m a + d m b >= 0
        [-m, dm],              # d + m a - d m b >= 0
        [m, dm],               # d - m a - d m b >= 0
        [d - m, d - d * dm],   # m a + d^2 m b - d(a+b) >= 0
    ])
    b_ub = np.array([0.0, 1.0, 0.0, 1.0, float(d), float(d), float(d), 0.0])
    res = linprog(c=[-p, -1.0], A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * 2, method="highs")
    if not res.success:
        raise RuntimeError(f"separability LP failed: {res.message}")
    return float(-res.fun)


def isotropic_t_monotone(d: int, f: float, m: float) -> float:
    """T^m of an isotropic state for 0 <= m <= d-1: zero below f = 1/d, linear above."""
    if not 0.0 <= m <= d - 1:
        raise ValueError("closed form covers 0 <= m <= d-1")
    if f <= 1.0 / d:
        return 0.0
    return m * (d * f - 1.0) / (d - 1.0)


def isotropic_robustness(d: int, f: float) -> float:
    return isotropic_t_monotone(d, f, d - 1)


# ---------------------------------------------------------------------------
# Maximally correlated states.


@dataclass(frozen=True)
class MaxCorrelatedState:
    """State supported on span{|ii>}, carried by its single-party image."""

    d: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        c = np.array(self.coeffs, dtype=complex, copy=True)
        DensityOperator(self.d, 1, c)  # validates shape, Hermiticity, trace, PSD
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    def embed(self) -> DensityOperator:
        return max_correlated_embed(self.coeffs)

    @staticmethod
    def from_bipartite(rho: DensityOperator, tol: float = 1e-9) -> "MaxCorrelatedState":
        if not is_max_correlated(rho, tol):
            raise ValueError("state is not maximally correlated in the computational basis")
        return MaxCorrelatedState(rho.d_a, max_correlated_restrict(rho))


def _single_party(mat: np.ndarray) -> HermitianOperator:
    return HermitianOperator(mat.shape[0], 1, mat)


def maxcorr_fidelity(mc: MaxCorrelatedState, m: int,
                     settings: SolverSettings | None = None) -> float:
    """Fidelity of distillation from a maximally correlated state.

    Single-party SDP: max <rho~, W> over 0 <= W <= 1 with diagonal entries <= 1/m.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    d = mc.d
    prog = ConicProgram("maxcorr_fidelity")
    w = prog.hermitian_variable("W", d)
    prog.psd(w)
    prog.psd(const_expr(np.eye(d)) - w)
    for i in range(d):
        e_ii = np.zeros((d, d))
        e_ii[i, i] = 1.0
        prog.ineq(1.0 / m - inner_expr(e_ii, w))
    prog.maximize(inner_expr(mc.coeffs, w))
    return float(prog.solve(settings).require_optimal().primal_value)


def maxcorr_rate(mc: MaxCorrelatedState, eps: float,
                 settings: SolverSettings | None = None) -> tuple[float, int]:
    """One-shot rate: floor-log of the minimal diagonal sup-norm of a passing witness."""
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must lie in [0, 1)")
    d = mc.d
    prog = ConicProgram("maxcorr_rate")
    w = prog.hermitian_variable("W", d)
    t = prog.scalar_variable("t")
    prog.psd(w)
    prog.psd(const_expr(np.eye(d)) - w)
    for i in range(d):
        e_ii = np.zeros((d, d))
        e_ii[i, i] = 1.0
        prog.ineq(t.expr() - inner_expr(e_ii, w))
    prog.ineq(inner_expr(mc.coeffs, w) - (1.0 - eps))
    prog.minimize(t.expr())
    v = float(prog.solve(settings).require_optimal().primal_value)
    k = floor_count(v)
    return log2_int(k), k


def maxcorr_zero_error(mc: MaxCorrelatedState) -> tuple[float, int]:
    """Zero-error rate: floor-log of the inverse largest diagonal of the support."""
    pi = support_projector(_single_party(mc.coeffs))
    v = float(np.max(np.diag(pi.mat).real))
    k = floor_count(v)
    return log2_int(k), k
