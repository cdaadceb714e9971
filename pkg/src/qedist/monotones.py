"""Entanglement monotones as conic programs with primal/dual cross-checks.

T^m ranges over witnesses sandwiched between -1 and m*1 lying in the negative
dual cone of the set; its primal form splits rho - X into positive and negative
parts weighted m and 1.  G^m bounds the polar gauge of the witness by 1/m.
For SEP the monotones are evaluated on the tractable state classes only.
"""

from __future__ import annotations

import numpy as np

from .bipartite import (
    DensityOperator,
    HermitianOperator,
    inner,
    is_isotropic,
    is_max_correlated,
    is_pure,
    max_correlated_restrict,
    max_entangled_projector,
    partial_transpose_matrix,
    pure_from_density,
    schmidt_decompose,
)
from .sets import (
    IntractableSetError,
    OperatorSet,
    add_polar_gauge_bound,
)
from .solver import (
    ConicProgram,
    MatrixExpression,
    ScalarExpression,
    SolverSettings,
    const_expr,
    inner_expr,
    pt,
    trace_expr,
)
from . import special


_T_SETS = (OperatorSet.PPT, OperatorSet.PPT_PLUS, OperatorSet.INCOHERENT)
_G_SETS = (OperatorSet.PPT_PRIME, OperatorSet.PPT_PLUS, OperatorSet.RAINS, OperatorSet.INCOHERENT)


def _diag_nonneg_variable(prog: ConicProgram, name: str, n: int,
                          split: tuple[int, int]) -> tuple[MatrixExpression, ScalarExpression]:
    """Diagonal matrix variable with non-negative entries; returns (matrix, trace)."""
    total: ScalarExpression | None = None
    expr: MatrixExpression | None = None
    for i in range(n):
        z = prog.scalar_variable(f"{name}{i}")
        prog.ineq(z.expr())
        e_ii = np.zeros((n, n))
        e_ii[i, i] = 1.0
        term = z.times(e_ii, split)
        expr = term if expr is None else expr + term
        total = z.expr() if total is None else total + z.expr()
    return expr, total


def _cone_member_variable(prog: ConicProgram, s: OperatorSet, name: str, n: int,
                          split: tuple[int, int]) -> tuple[MatrixExpression, ScalarExpression]:
    """Variable constrained to the conic hull of S; returns (X, Tr X)."""
    if s is OperatorSet.PPT:
        x = prog.hermitian_variable(name, n, split)
        prog.psd(pt(x))
        return x, trace_expr(x)
    if s is OperatorSet.PPT_PLUS:
        x = prog.hermitian_variable(name, n, split)
        prog.psd(x)
        prog.psd(pt(x))
        return x, trace_expr(x)
    if s is OperatorSet.INCOHERENT:
        return _diag_nonneg_variable(prog, name, n, split)
    raise IntractableSetError(f"no conic-hull encoding for {s}")


def _sep_closed_form_t(rho: DensityOperator, m: float,
                       settings: SolverSettings | None) -> float:
    if is_pure(rho):
        xi, _, _ = schmidt_decompose(pure_from_density(rho))
        return special.pure_t_monotone(xi, m)
    if is_isotropic(rho):
        d = rho.d_a
        f = inner(max_entangled_projector(d), rho)
        return special.isotropic_t_monotone(d, f, min(m, d - 1.0))
    if is_max_correlated(rho):
        coeffs = max_correlated_restrict(rho)
        single = DensityOperator(rho.d_a, 1, coeffs)
        return t_m(single, OperatorSet.INCOHERENT, m, settings)
    raise IntractableSetError(
        "T^m for SEP is only available for pure, isotropic, or max-correlated states"
    )


def t_m(rho: DensityOperator, s: OperatorSet, m: float,
        settings: SolverSettings | None = None) -> float:
    """T^m: max overlap with a witness between -1 and m*1 in the negative dual cone."""
    if m < 0.0:
        raise ValueError("m must be non-negative")
    if s is OperatorSet.SEP:
        return _sep_closed_form_t(rho, m, settings)
    if s not in _T_SETS:
        raise IntractableSetError(f"T^m not supported for {s}")
    n, split = rho.dim, (rho.d_a, rho.d_b)
    prog = ConicProgram(f"t_m_{s.value}")
    w = prog.hermitian_variable("W", n, split)
    eye = const_expr(np.eye(n), split)
    prog.psd(w + eye)
    prog.psd(float(m) * eye - w)
    if s is OperatorSet.PPT:
        prog.psd(-pt(w))
    elif s is OperatorSet.PPT_PLUS:
        b = prog.hermitian_variable("B", n, split)
        prog.psd(b)
        prog.psd(-w - pt(b))
    else:
        for i in range(n):
            e_ii = np.zeros((n, n))
            e_ii[i, i] = 1.0
            prog.ineq(-inner_expr(e_ii, w))
    prog.maximize(inner_expr(rho.mat, w))
    return float(prog.solve(settings).require_optimal().primal_value)


def t_m_primal(rho: DensityOperator, s: OperatorSet, m: float,
               settings: SolverSettings | None = None) -> float:
    """Independent primal form: min m*Tr(rho-X)_+ + Tr(rho-X)_- over the conic hull."""
    if m < 0.0:
        raise ValueError("m must be non-negative")
    n, split = rho.dim, (rho.d_a, rho.d_b)
    prog = ConicProgram(f"t_m_primal_{s.value}")
    x, tr_x = _cone_member_variable(prog, s, "X", n, split)
    a = prog.hermitian_variable("A", n, split)
    prog.psd(a)
    prog.psd(a - const_expr(rho.mat, split) + x)
    prog.minimize((float(m) + 1.0) * trace_expr(a) + tr_x - 1.0)
    return float(prog.solve(settings).require_optimal().primal_value)


def g_m_witness(rho: DensityOperator, q: OperatorSet, m: float,
                settings: SolverSettings | None = None) -> tuple[float, HermitianOperator]:
    """G^m value and the optimal witness W with 0 <= W <= 1, gauge(W) <= 1/m."""
    if m < 1.0:
        raise ValueError("m must be at least 1")
    if q not in _G_SETS:
        raise IntractableSetError(f"G^m not supported for {q}")
    n, split = rho.dim, (rho.d_a, rho.d_b)
    prog = ConicProgram(f"g_m_{q.value}")
    w = prog.hermitian_variable("W", n, split)
    prog.psd(w)
    prog.psd(const_expr(np.eye(n), split) - w)
    bound = 1.0 / float(m)
    add_polar_gauge_bound(prog, q, w, const_expr(bound * np.eye(n), split),
                          ScalarExpression(bound))
    prog.maximize(inner_expr(rho.mat, w))
    report = prog.solve(settings).require_optimal()
    wmat = np.asarray(report.variable_assignments["W"])
    return float(report.primal_value), HermitianOperator(rho.d_a, rho.d_b, wmat)


def g_m(rho: DensityOperator, q: OperatorSet, m: float,
        settings: SolverSettings | None = None) -> float:
    return g_m_witness(rho, q, m, settings)[0]


def g_m_primal(rho: DensityOperator, q: OperatorSet, m: float,
               settings: SolverSettings | None = None) -> float:
    """Independent primal form: min Tr(rho-Z)_+ + gauge(Z)/m over the set's gauge domain."""
    if m < 1.0:
        raise ValueError("m must be at least 1")
    n, split = rho.dim, (rho.d_a, rho.d_b)
    prog = ConicProgram(f"g_m_primal_{q.value}")
    y = prog.hermitian_variable("Y", n, split)
    prog.psd(y)
    rho_e = const_expr(rho.mat, split)
    inv_m = 1.0 / float(m)
    if q is OperatorSet.PPT_PLUS:
        x, tr_x = _cone_member_variable(prog, q, "X", n, split)
        prog.psd(y - rho_e + x)
        prog.minimize(trace_expr(y) + inv_m * tr_x)
    elif q in (OperatorSet.PPT_PRIME, OperatorSet.RAINS):
        # Z = (P-N)^{T_B}; Tr P + Tr N majorises ||Z^{T_B}||_1 and is driven to it.
        p = prog.hermitian_variable("P", n, split)
        nn = prog.hermitian_variable("N", n, split)
        prog.psd(p)
        prog.psd(nn)
        z = pt(p - nn)
        if q is OperatorSet.RAINS:
            prog.psd(z)
        prog.psd(y - rho_e + z)
        prog.minimize(trace_expr(y) + inv_m * (trace_expr(p) + trace_expr(nn)))
    else:
        x, tr_x = _diag_nonneg_variable(prog, "z", n, split)
        prog.psd(y - rho_e + x)
        prog.minimize(trace_expr(y) + inv_m * tr_x)
    return float(prog.solve(settings).require_optimal().primal_value)


def _sep_closed_form_robustness(rho: DensityOperator,
                                settings: SolverSettings | None) -> float:
    if is_pure(rho):
        xi, _, _ = schmidt_decompose(pure_from_density(rho))
        return special.pure_robustness(xi)
    if is_isotropic(rho):
        d = rho.d_a
        f = inner(max_entangled_projector(d), rho)
        return special.isotropic_t_monotone(d, f, d - 1.0)
    if is_max_correlated(rho):
        coeffs = max_correlated_restrict(rho)
        single = DensityOperator(rho.d_a, 1, coeffs)
        return robustness(single, OperatorSet.INCOHERENT, settings)
    raise IntractableSetError(
        "SEP robustness is only available for pure, isotropic, or max-correlated states"
    )


def robustness(rho: DensityOperator, s: OperatorSet,
               settings: SolverSettings | None = None) -> float:
    """Generalised robustness: least lambda with rho <= (1+lambda) X for X in S."""
    if s is OperatorSet.SEP:
        return _sep_closed_form_robustness(rho, settings)
    n, split = rho.dim, (rho.d_a, rho.d_b)
    prog = ConicProgram(f"robustness_{s.value}")
    y, tr_y = _cone_member_variable(prog, s, "Y", n, split)
    prog.psd(y - const_expr(rho.mat, split))
    prog.minimize(tr_y - 1.0)
    return float(prog.solve(settings).require_optimal().primal_value)


def negativity(rho: DensityOperator) -> float:
    """Half the total negative weight of the partial transpose."""
    pt_mat = partial_transpose_matrix(rho.mat, rho.d_a, rho.d_b)
    return float((np.abs(np.linalg.eigvalsh(pt_mat)).sum() - 1.0) / 2.0)


def mod_trace_distance(rho: DensityOperator, s: OperatorSet,
                       settings: SolverSettings | None = None) -> float:
    """Modified trace distance: min ||rho - X||_1 over the conic hull of S.

    Same value as t_m(rho, s, 1); computed through the primal split so the two
    routes stay independent.
    """
    return t_m_primal(rho, s, 1.0, settings)
