"""Hypothesis-testing relative entropy, fixed second argument or minimised over a set.

D_H^eps(rho||X) = -log2 min{<M,X> : 0 <= M <= 1, <M,rho> >= 1-eps}.  The second
argument may be any Hermitian operator; a non-positive optimum maps to +inf.
Minimising over a convex set collapses to a single program bounding the polar
gauge of the witness, whose constraint multipliers rebuild the optimal X.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bipartite import DensityOperator, HermitianOperator
from .sets import (
    OperatorSet,
    add_polar_gauge_bound,
    gauge_member_from_duals,
)
from .solver import (
    ConicProgram,
    SolverSettings,
    basis_stack,
    const_expr,
    inner_expr,
)

# Optimal type-2 errors at or below this threshold are treated as zero,
# mapping to an infinite number of bits.
ZERO_ERROR_CUTOFF = 1e-10

_SUPPORT_CUT = 1e-10


def _support_split(rho: DensityOperator) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal bases of the support of rho and of its complement."""
    w, v = np.linalg.eigh(rho.mat)
    keep = w > _SUPPORT_CUT * max(float(w[-1]), 0.0)
    return v[:, keep], v[:, ~keep]


def min_type2_error(rho: DensityOperator, x: HermitianOperator, eps: float,
                    settings: SolverSettings | None = None) -> tuple[float, np.ndarray]:
    """min{<M,X> : 0 <= M <= 1, <M,rho> >= 1-eps}; returns (value, M)."""
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must lie in [0, 1)")
    if rho.dim != x.dim:
        raise ValueError("dimension mismatch")
    if eps == 0.0:
        # The constraint pins M to the identity on supp(rho), leaving a free
        # block on the complement; the optimum is the negative part there.
        # Solved in closed form, which also avoids the Slater-less SDP face.
        sup, comp = _support_split(rho)
        pi = sup @ sup.conj().T
        value = float(np.tensordot(x.mat.conj(), pi, axes=2).real)
        m_star = pi
        if comp.shape[1] > 0:
            small = comp.conj().T @ x.mat @ comp
            lam, vec = np.linalg.eigh(small)
            neg = vec[:, lam < 0.0]
            value += float(lam[lam < 0.0].sum())
            m_star = pi + comp @ (neg @ neg.conj().T) @ comp.conj().T
        return value, m_star
    n, split = rho.dim, (rho.d_a, rho.d_b)
    prog = ConicProgram("min_type2_error")
    m = prog.hermitian_variable("M", n, split)
    prog.psd(m)
    prog.psd(const_expr(np.eye(n), split) - m)
    prog.ineq(inner_expr(rho.mat, m) - (1.0 - eps))
    prog.minimize(inner_expr(x.mat, m))
    report = prog.solve(settings).require_optimal()
    return float(report.primal_value), np.asarray(report.variable_assignments["M"])


def d_h(rho: DensityOperator, x: HermitianOperator, eps: float,
        settings: SolverSettings | None = None) -> float:
    """Hypothesis-testing relative entropy in bits; +inf when the error vanishes."""
    value, _ = min_type2_error(rho, x, eps, settings)
    if value <= ZERO_ERROR_CUTOFF:
        return float("inf")
    return float(-np.log2(value))


@dataclass
class SetHypothesisResult:
    """Minimised D_H over a set: bits, the gauge optimum, and both optimisers."""

    bits: float
    gauge_value: float
    witness: HermitianOperator
    optimal_x: HermitianOperator


def d_h_min_witness(rho: DensityOperator, q: OperatorSet, eps: float,
                    settings: SolverSettings | None = None) -> SetHypothesisResult:
    """min over X in conv(Q) of D_H^eps(rho||X) through the gauge epigraph program.

    Solves min{Gamma_{Q polar}(W) : <rho,W> >= 1-eps, 0 <= W <= 1}; the bits are
    -log2 of the optimum and the multipliers of the gauge constraints assemble
    the achieving X.
    """
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must lie in [0, 1)")
    if eps == 0.0:
        return _d_h_min_witness_exact(rho, q, settings)
    n, split = rho.dim, (rho.d_a, rho.d_b)
    prog = ConicProgram(f"d_h_min_{q.value}")
    w = prog.hermitian_variable("W", n, split)
    t = prog.scalar_variable("t")
    prog.psd(w)
    prog.psd(const_expr(np.eye(n), split) - w)
    prog.ineq(inner_expr(rho.mat, w) - (1.0 - eps))
    info = add_polar_gauge_bound(prog, q, w, t.times(np.eye(n), split), t.expr())
    prog.minimize(t.expr())
    report = prog.solve(settings).require_optimal()
    gauge_value = float(report.primal_value)
    x_star = gauge_member_from_duals(report, info)
    bits = float("inf") if gauge_value <= ZERO_ERROR_CUTOFF else float(-np.log2(gauge_value))
    return SetHypothesisResult(
        bits=bits,
        gauge_value=gauge_value,
        witness=HermitianOperator(rho.d_a, rho.d_b, np.asarray(report.variable_assignments["W"])),
        optimal_x=HermitianOperator(rho.d_a, rho.d_b, x_star),
    )


def _d_h_min_witness_exact(rho: DensityOperator, q: OperatorSet,
                           settings: SolverSettings | None) -> SetHypothesisResult:
    """The eps = 0 program after face reduction.

    <rho,W> = 1 with 0 <= W <= 1 forces W = Pi + V with V supported on the
    complement of supp(rho), so the free block is parametrised there directly.
    The reduced program regains a strictly feasible point, which the full-space
    form lacks at eps = 0; without it the backend can stall far from optimum.
    """
    n, split = rho.dim, (rho.d_a, rho.d_b)
    sup, comp = _support_split(rho)
    pi = sup @ sup.conj().T
    prog = ConicProgram(f"d_h_min0_{q.value}")
    t = prog.scalar_variable("t")
    r = comp.shape[1]
    w_expr = const_expr(pi, split)
    coords = []
    lifted = np.empty((r * r, n, n), dtype=complex)
    if r > 0:
        small_basis = basis_stack(r)
        small_expr = None
        for k in range(r * r):
            sv = prog.scalar_variable(f"v{k}")
            coords.append(sv)
            term = sv.times(small_basis[k])
            small_expr = term if small_expr is None else small_expr + term
            lifted[k] = comp @ small_basis[k] @ comp.conj().T
            w_expr = w_expr + sv.times(lifted[k], split)
        prog.psd(small_expr)
        prog.psd(const_expr(np.eye(r)) - small_expr)
    info = add_polar_gauge_bound(prog, q, w_expr, t.times(np.eye(n), split), t.expr())
    prog.minimize(t.expr())
    report = prog.solve(settings).require_optimal()
    gauge_value = float(report.primal_value)
    w_mat = pi.copy()
    for k, sv in enumerate(coords):
        w_mat += float(report.variable_assignments[sv.name]) * lifted[k]
    x_star = gauge_member_from_duals(report, info)
    bits = float("inf") if gauge_value <= ZERO_ERROR_CUTOFF else float(-np.log2(gauge_value))
    return SetHypothesisResult(
        bits=bits,
        gauge_value=gauge_value,
        witness=HermitianOperator(rho.d_a, rho.d_b, w_mat),
        optimal_x=HermitianOperator(rho.d_a, rho.d_b, x_star),
    )


def d_h_min_over_set(rho: DensityOperator, q: OperatorSet, eps: float,
                     settings: SolverSettings | None = None) -> float:
    return d_h_min_witness(rho, q, eps, settings).bits
