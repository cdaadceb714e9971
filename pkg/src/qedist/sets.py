"""Operator sets (SEP, PPT, PPT+, PPT', Rains, incoherent) and their polar gauges.

The polar gauge of a set S evaluated at a witness W is
Gamma_{S polar}(W) = max{<X,W> : X in conv(S united with 0)}.  For each
tractable set this module provides a closed form or a dual SDP, plus an
independent primal SDP used to cross-validate the dual derivation.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .bipartite import (
    HermitianOperator,
    PureState,
    inner,
    max_correlated_restrict,
    is_max_correlated,
    is_isotropic,
    is_pure,
    max_entangled_projector,
    partial_transpose_matrix,
    pt_trace_norm,
    pure_from_density,
    schmidt_decompose,
    support_projector,
    DensityOperator,
)
from .solver import (
    ConicProgram,
    MatrixExpression,
    ScalarVar,
    SolverSettings,
    const_expr,
    inner_expr,
    pt,
    trace_expr,
)


class IntractableSetError(ValueError):
    """Requested a computation the set does not support exactly."""


class OperatorSet(Enum):
    SEP = "sep"
    PPT = "ppt"
    PPT_PLUS = "pptplus"
    PPT_PRIME = "pptprime"
    RAINS = "rains"
    INCOHERENT = "incoherent"

    @property
    def tractability(self) -> str:
        return "special_cases_only" if self is OperatorSet.SEP else "exact_sdp"


def membership(s: OperatorSet, x: HermitianOperator, tol: float = 1e-9) -> bool:
    """Exact set membership up to tolerance; SEP only for recognised structure."""
    mat = x.mat
    if s is OperatorSet.PPT:
        pt_min = float(np.linalg.eigvalsh(partial_transpose_matrix(mat, x.d_a, x.d_b))[0])
        return abs(x.trace() - 1.0) <= tol and pt_min >= -tol
    if s is OperatorSet.PPT_PLUS:
        return membership(OperatorSet.PPT, x, tol) and float(np.linalg.eigvalsh(mat)[0]) >= -tol
    if s is OperatorSet.PPT_PRIME:
        return pt_trace_norm(x) <= 1.0 + tol
    if s is OperatorSet.RAINS:
        return float(np.linalg.eigvalsh(mat)[0]) >= -tol and pt_trace_norm(x) <= 1.0 + tol
    if s is OperatorSet.INCOHERENT:
        off = mat - np.diag(np.diag(mat))
        return (
            float(np.max(np.abs(off))) <= tol
            and float(np.min(np.diag(mat).real)) >= -tol
            and abs(x.trace() - 1.0) <= tol
        )
    if s is OperatorSet.SEP:
        return _sep_membership(x, tol)
    raise ValueError(f"unknown set {s}")


def _sep_membership(x: HermitianOperator, tol: float) -> bool:
    if not isinstance(x, DensityOperator):
        try:
            x = DensityOperator(x.d_a, x.d_b, x.mat)
        except ValueError:
            raise IntractableSetError("SEP membership needs a density operator") from None
    if is_pure(x):
        xi, _, _ = schmidt_decompose(pure_from_density(x))
        return bool(xi.coefficients[0] >= 1.0 - tol)
    if is_isotropic(x):
        f = inner(max_entangled_projector(x.d_a), x)
        return f <= 1.0 / x.d_a + tol
    if is_max_correlated(x):
        coeffs = max_correlated_restrict(x)
        off = coeffs - np.diag(np.diag(coeffs))
        return float(np.max(np.abs(off))) <= tol
    raise IntractableSetError(
        "SEP membership is only decided for pure, isotropic, or max-correlated states"
    )


# ---------------------------------------------------------------------------
# Polar gauges.


def add_polar_gauge_bound(
    prog: ConicProgram,
    s: OperatorSet,
    w: MatrixExpression,
    bound_mat: MatrixExpression,
    bound_sc,
    prefix: str = "g",
) -> dict:
    """Add conic constraints enforcing Gamma_{S polar}(w) <= bound.

    bound_mat must be the bound times the identity (constant or scalar-variable
    expression); bound_sc the matching scalar expression.  Returns indices of
    the added constraints whose duals reconstruct the gauge-achieving member.
    """
    n = w.dim
    info: dict = {"set": s, "dim": n, "split": w.split}
    if s is OperatorSet.PPT_PRIME:
        info["psd_upper"] = len(prog._psd)
        prog.psd(bound_mat - pt(w))
        info["psd_lower"] = len(prog._psd)
        prog.psd(bound_mat + pt(w))
    elif s is OperatorSet.RAINS:
        z = prog.hermitian_variable(prefix + "_Z", n, w.split)
        prog.psd(z)
        info["psd_upper"] = len(prog._psd)
        prog.psd(bound_mat - pt(w + z))
        info["psd_lower"] = len(prog._psd)
        prog.psd(bound_mat + pt(w + z))
    elif s is OperatorSet.PPT_PLUS:
        b = prog.hermitian_variable(prefix + "_B", n, w.split)
        prog.psd(b)
        info["psd_upper"] = len(prog._psd)
        prog.psd(bound_mat - w - pt(b))
        info["ineq_nonneg"] = len(prog._ineq)
        prog.ineq(bound_sc)
    elif s is OperatorSet.INCOHERENT:
        info["ineq_start"] = len(prog._ineq)
        for i in range(n):
            e_ii = np.zeros((n, n))
            e_ii[i, i] = 1.0
            prog.ineq(bound_sc - inner_expr(e_ii, w))
        prog.ineq(bound_sc)
    else:
        raise IntractableSetError(f"no exact gauge constraint for {s}")
    return info


def gauge_member_from_duals(report, info: dict) -> np.ndarray:
    """Reconstruct the gauge-achieving set member from constraint multipliers."""
    s = info["set"]
    if s is OperatorSet.PPT_PRIME or s is OperatorSet.RAINS:
        y = report.psd_duals[info["psd_upper"]] - report.psd_duals[info["psd_lower"]]
        d_a, d_b = info["split"]
        return partial_transpose_matrix(y, d_a, d_b)
    if s is OperatorSet.PPT_PLUS:
        return report.psd_duals[info["psd_upper"]]
    if s is OperatorSet.INCOHERENT:
        n = info["dim"]
        start = info["ineq_start"]
        return np.diag(np.array(report.ineq_duals[start: start + n], dtype=complex))
    raise IntractableSetError(f"no dual reconstruction for {s}")


def gauge_polar(
    s: OperatorSet,
    w: HermitianOperator,
    settings: SolverSettings | None = None,
) -> float:
    """Gamma_{S polar}(W): closed form where available, else the derived dual SDP."""
    if s is OperatorSet.PPT_PRIME:
        return float(np.max(np.abs(np.linalg.eigvalsh(
            partial_transpose_matrix(w.mat, w.d_a, w.d_b)))))
    if s is OperatorSet.INCOHERENT:
        return float(max(0.0, np.max(np.diag(w.mat).real)))
    if s in (OperatorSet.PPT_PLUS, OperatorSet.RAINS):
        prog = ConicProgram(f"gauge_{s.value}")
        n = w.dim
        wv = const_expr(w.mat, (w.d_a, w.d_b))
        t = prog.scalar_variable("t")
        add_polar_gauge_bound(prog, s, wv, t.times(np.eye(n), (w.d_a, w.d_b)), t.expr())
        prog.minimize(t.expr())
        report = prog.solve(settings).require_optimal()
        return float(report.primal_value)
    if s is OperatorSet.SEP:
        return gauge_sep_projector(w)
    raise IntractableSetError(f"gauge of {s} not supported")


def gauge_polar_primal(
    s: OperatorSet,
    w: HermitianOperator,
    settings: SolverSettings | None = None,
) -> tuple[float, np.ndarray]:
    """Independent primal form max{<X,W> : X in conv(S united 0)}; returns (value, X*)."""
    n, split = w.dim, (w.d_a, w.d_b)
    if s is OperatorSet.INCOHERENT:
        diag = np.diag(w.mat).real
        i = int(np.argmax(diag))
        if diag[i] <= 0.0:
            return 0.0, np.zeros((n, n), dtype=complex)
        x = np.zeros((n, n), dtype=complex)
        x[i, i] = 1.0
        return float(diag[i]), x
    prog = ConicProgram(f"gauge_primal_{s.value}")
    if s is OperatorSet.PPT_PLUS:
        x = prog.hermitian_variable("X", n, split)
        prog.psd(x)
        prog.psd(pt(x))
        prog.ineq(1.0 - trace_expr(x))
        prog.maximize(inner_expr(w.mat, x))
        report = prog.solve(settings).require_optimal()
        return float(report.primal_value), np.asarray(report.variable_assignments["X"])
    if s in (OperatorSet.PPT_PRIME, OperatorSet.RAINS):
        # X = (P-N)^{T_B} with Tr P + Tr N <= 1 encodes ||X^{T_B}||_1 <= 1.
        p = prog.hermitian_variable("P", n, split)
        m = prog.hermitian_variable("N", n, split)
        prog.psd(p)
        prog.psd(m)
        prog.ineq(1.0 - trace_expr(p) - trace_expr(m))
        if s is OperatorSet.RAINS:
            prog.psd(pt(p - m))
        w_pt = partial_transpose_matrix(w.mat, w.d_a, w.d_b)
        prog.maximize(inner_expr(w_pt, p) - inner_expr(w_pt, m))
        report = prog.solve(settings).require_optimal()
        xstar = partial_transpose_matrix(
            np.asarray(report.variable_assignments["P"]) - np.asarray(report.variable_assignments["N"]),
            w.d_a, w.d_b,
        )
        return float(report.primal_value), xstar
    raise IntractableSetError(f"no primal gauge form for {s}")


def gauge_sep_projector(w: HermitianOperator) -> float:
    """Gamma_{SEP polar} for recognised projectors; exact on pure and max-correlated supports."""
    mat = w.mat
    eig = np.linalg.eigvalsh(mat)
    is_proj = np.all(np.abs(eig * (1.0 - eig)) <= 1e-8)
    if not is_proj:
        raise IntractableSetError("SEP gauge supported only for projectors")
    rank = int(round(float(np.sum(eig > 0.5))))
    if rank > (w.d_a - 1) * (w.d_b - 1):
        # Any subspace this large intersects the product-state variety.
        return 1.0
    if rank == 1:
        v = np.linalg.eigh(mat)[1][:, -1]
        psi = v / np.linalg.norm(v)
        xi, _, _ = schmidt_decompose(PureState(w.d_a, w.d_b, psi))
        return float(xi.coefficients[0] ** 2)
    if is_max_correlated(w, tol=1e-9):
        coeffs = max_correlated_restrict(w)
        return float(np.max(np.diag(coeffs).real))
    raise IntractableSetError(
        "SEP gauge supported only for pure or max-correlated supports "
        "(or rank above (d_a-1)(d_b-1))"
    )


def sep_gauge_of_state_support(rho: DensityOperator, rank_tol: float = 1e-8) -> float:
    """Gamma_{SEP polar} of the support projector of a structured state."""
    return gauge_sep_projector(support_projector(rho, rank_tol))


# ---------------------------------------------------------------------------
# Seeded members, used by validation suites to sample feasible points.


def sample_member(s: OperatorSet, dims: tuple[int, int], seed: int) -> HermitianOperator:
    """A deterministic random element of conv(S), strictly feasible where possible."""
    d_a, d_b = dims
    n = d_a * d_b
    rng = np.random.default_rng(seed)

    def ginibre(k: int) -> np.ndarray:
        g = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
        m = g @ g.conj().T
        return m / np.trace(m).real

    if s is OperatorSet.PPT_PLUS:
        rho = ginibre(n)
        mixed = np.eye(n) / n
        lam_min = float(np.linalg.eigvalsh(partial_transpose_matrix(rho, d_a, d_b))[0])
        if lam_min >= 0.0:
            return HermitianOperator(d_a, d_b, rho)
        lam = 0.9 / (1.0 - n * lam_min)
        return HermitianOperator(d_a, d_b, lam * rho + (1.0 - lam) * mixed)
    if s is OperatorSet.PPT:
        y = ginibre(n)
        return HermitianOperator(d_a, d_b, partial_transpose_matrix(y, d_a, d_b))
    if s is OperatorSet.RAINS:
        rho = ginibre(n)
        scale = min(1.0, 0.99 / pt_trace_norm(HermitianOperator(d_a, d_b, rho)))
        return HermitianOperator(d_a, d_b, scale * rho)
    if s is OperatorSet.PPT_PRIME:
        p, q = ginibre(n), ginibre(n)
        lam = rng.uniform(0.0, 1.0)
        x = 0.99 * (lam * p - (1.0 - lam) * q)
        return HermitianOperator(d_a, d_b, partial_transpose_matrix(x, d_a, d_b))
    if s is OperatorSet.INCOHERENT:
        w = rng.dirichlet(np.ones(n))
        return HermitianOperator(d_a, d_b, np.diag(w.astype(complex)))
    if s is OperatorSet.SEP:
        vecs = []
        for _ in range(n * n):
            a = rng.standard_normal(d_a) + 1j * rng.standard_normal(d_a)
            b = rng.standard_normal(d_b) + 1j * rng.standard_normal(d_b)
            v = np.kron(a / np.linalg.norm(a), b / np.linalg.norm(b))
            vecs.append(np.outer(v, v.conj()))
        weights = rng.dirichlet(np.ones(len(vecs)))
        return HermitianOperator(d_a, d_b, sum(wt * vv for wt, vv in zip(weights, vecs)))
    raise ValueError(f"unknown set {s}")
