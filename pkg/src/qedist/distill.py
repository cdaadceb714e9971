"""Distillation engine: fidelities, one-shot rates, zero-error rates, assisted bounds.

Each operation class maps to the operator set whose polar gauge constrains the
fidelity witness.  Rates are always computed along two independent routes (the
hypothesis-testing program and an integer fidelity scan) and must agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .bipartite import (
    DensityOperator,
    HermitianOperator,
    PureState,
    fidelity as state_fidelity,
    hermitian,
    inner,
    is_isotropic,
    is_max_correlated,
    is_pure,
    max_correlated_embed,
    max_entangled_projector,
    pure_from_density,
    pure_from_schmidt,
    schmidt_decompose,
    support_projector,
    SchmidtVector,
)
from .sets import (
    IntractableSetError,
    OperatorSet,
    gauge_polar,
    gauge_sep_projector,
)
from .solver import ConicProgram, SolverError, SolverSettings, const_expr, inner_expr, pt
from .monotones import g_m_witness
from .hyptest import d_h_min_witness
from . import special
from .special import ACHIEVABILITY_GUARD, floor_count, log2_int


class OperationClass(Enum):
    PPT = "ppt"
    PPT_PRESERVING = "ppt-pres"
    PPT_PLUS_PRESERVING = "pptplus-pres"
    RAINS_PRESERVING = "rains-pres"
    SEPP = "sepp"
    ONE_WAY_LOCC_PURE = "locc1-pure"

    @property
    def gauge_set(self) -> OperatorSet:
        return _GAUGE_MAP[self]


_GAUGE_MAP = {
    OperationClass.PPT: OperatorSet.PPT_PRIME,
    OperationClass.PPT_PRESERVING: OperatorSet.PPT_PRIME,
    OperationClass.RAINS_PRESERVING: OperatorSet.RAINS,
    OperationClass.PPT_PLUS_PRESERVING: OperatorSet.PPT_PLUS,
    OperationClass.SEPP: OperatorSet.SEP,
}


@dataclass
class DistillationResult:
    quantity: str  # fidelity | rate_eps | rate_zero_error | assisted_fidelity
    operation_class: OperationClass
    value: float
    m: int | None = None
    certificate: HermitianOperator | None = None
    method: str = "sdp"  # sdp | closed_form | bisection
    is_lower_bound: bool = False
    diagnostics: dict = field(default_factory=dict)


def _schmidt_of(rho: DensityOperator) -> SchmidtVector:
    xi, _, _ = schmidt_decompose(pure_from_density(rho))
    return xi


def _pure_schmidt_frame(rho: DensityOperator) -> tuple[DensityOperator, np.ndarray]:
    """Rotate a pure state into its Schmidt frame; returns (state, local isometry).

    All quantities computed here are invariant under local isometries (the
    witness constraint sets are closed under conjugation by them), and in the
    Schmidt frame the data is real, so the solver can drop the complex
    embedding.  A witness W for the rotated state pulls back as K W K^adj.
    """
    xi, u, v = schmidt_decompose(pure_from_density(rho))
    canon = max_correlated_embed(np.outer(xi.coefficients, xi.coefficients))
    return canon, np.kron(u, v)


def _pull_back_witness(rho: DensityOperator, k: np.ndarray,
                       w: HermitianOperator) -> HermitianOperator:
    return hermitian(rho.d_a, rho.d_b, k @ w.mat @ k.conj().T)


def _isotropic_overlap(rho: DensityOperator) -> float:
    return inner(max_entangled_projector(rho.d_a), rho)


def _revalidate_witness(rho: DensityOperator, q: OperatorSet, m: int,
                        value: float, w: HermitianOperator,
                        settings: SolverSettings | None) -> None:
    eig = np.linalg.eigvalsh(w.mat)
    if eig[0] < -1e-6 or eig[-1] > 1.0 + 1e-6:
        raise SolverError(f"witness violates 0 <= W <= 1: eig in [{eig[0]:.2e}, {eig[-1]:.2e}]")
    gauge = gauge_polar(q, w, settings)
    if gauge > 1.0 / m + 1e-6:
        raise SolverError(f"witness gauge {gauge:.8f} exceeds 1/m = {1.0 / m:.8f}")
    achieved = inner(rho, w)
    if abs(achieved - value) > 1e-6 * (1.0 + abs(value)):
        raise SolverError(f"witness overlap {achieved:.8f} does not match value {value:.8f}")


def fidelity(rho: DensityOperator, oc: OperationClass, m: int,
             settings: SolverSettings | None = None) -> DistillationResult:
    """Best overlap with an m-level maximally entangled state under the class."""
    m = int(m)
    if m < 1:
        raise ValueError("m must be at least 1")
    if oc is OperationClass.ONE_WAY_LOCC_PURE:
        if not is_pure(rho):
            raise IntractableSetError("one-way LOCC fidelity implemented for pure states only")
        val = special.pure_fidelity(_schmidt_of(rho), m)
        return DistillationResult("fidelity", oc, val, m=m, method="closed_form")
    if oc is OperationClass.SEPP:
        if is_pure(rho):
            val = special.pure_fidelity(_schmidt_of(rho), m)
            return DistillationResult("fidelity", oc, val, m=m, method="closed_form")
        if is_isotropic(rho):
            iso = special.IsotropicState(rho.d_a, min(max(_isotropic_overlap(rho), 0.0), 1.0))
            return DistillationResult("fidelity", oc, special.isotropic_fidelity(iso, m),
                                      m=m, method="closed_form")
        if is_max_correlated(rho):
            mc = special.MaxCorrelatedState.from_bipartite(rho)
            return DistillationResult("fidelity", oc, special.maxcorr_fidelity(mc, m, settings),
                                      m=m, method="sdp")
        lb = fidelity(rho, OperationClass.PPT_PLUS_PRESERVING, m, settings)
        return DistillationResult("fidelity", oc, lb.value, m=m, certificate=lb.certificate,
                                  method="sdp", is_lower_bound=True,
                                  diagnostics={"bound_from": "pptplus-pres"})
    q = oc.gauge_set
    if is_pure(rho):
        canon, k = _pure_schmidt_frame(rho)
        value, w = g_m_witness(canon, q, m, settings)
        _revalidate_witness(canon, q, m, value, w, settings)
        return DistillationResult("fidelity", oc, value, m=m,
                                  certificate=_pull_back_witness(rho, k, w), method="sdp")
    value, w = g_m_witness(rho, q, m, settings)
    _revalidate_witness(rho, q, m, value, w, settings)
    return DistillationResult("fidelity", oc, value, m=m, certificate=w, method="sdp")


def _scan_rate(fid_of_m, eps: float, cap: int) -> int:
    """Largest m with fid_of_m(m) >= (1-eps) - guard; fidelity is non-increasing in m."""
    thresh = (1.0 - eps) - ACHIEVABILITY_GUARD
    best = 1
    for m in range(1, cap + 1):
        if fid_of_m(m) >= thresh:
            best = m
        else:
            break
    return best


def rate_eps(rho: DensityOperator, oc: OperationClass, eps: float,
             settings: SolverSettings | None = None) -> DistillationResult:
    """One-shot rate log2(max m achievable within error eps), two independent routes."""
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must lie in [0, 1)")
    if oc is OperationClass.ONE_WAY_LOCC_PURE or (oc is OperationClass.SEPP and is_pure(rho)):
        if not is_pure(rho):
            raise IntractableSetError("one-way LOCC rate implemented for pure states only")
        xi = _schmidt_of(rho)
        bits, k = special.pure_rate(xi, eps)
        bits_q, k_q = special.pure_rate_qcqp(xi, eps, settings)
        if k != k_q:
            raise SolverError(f"pure rate routes disagree: scan {k}, program {k_q}")
        return DistillationResult("rate_eps", oc, bits, m=k, method="bisection")
    if oc is OperationClass.SEPP:
        if is_isotropic(rho):
            iso = special.IsotropicState(rho.d_a, min(max(_isotropic_overlap(rho), 0.0), 1.0))
            cap = int(np.floor(rho.d_a / (1.0 - eps))) + 2
            k = _scan_rate(lambda m: special.isotropic_fidelity(iso, m), eps, cap)
            return DistillationResult("rate_eps", oc, log2_int(k), m=k, method="bisection")
        if is_max_correlated(rho):
            mc = special.MaxCorrelatedState.from_bipartite(rho)
            bits, k = special.maxcorr_rate(mc, eps, settings)
            cap = int(np.floor(mc.d / (1.0 - eps))) + 2
            k_scan = _scan_rate(lambda m: special.maxcorr_fidelity(mc, m, settings), eps, cap)
            if k != k_scan:
                raise SolverError(f"max-correlated rate routes disagree: {k} vs {k_scan}")
            return DistillationResult("rate_eps", oc, bits, m=k, method="bisection")
        res = rate_eps(rho, OperationClass.PPT_PLUS_PRESERVING, eps, settings)
        return DistillationResult("rate_eps", oc, res.value, m=res.m, method="bisection",
                                  is_lower_bound=True, diagnostics={"bound_from": "pptplus-pres"})
    q = oc.gauge_set
    work, frame = rho, None
    if is_pure(rho):
        work, frame = _pure_schmidt_frame(rho)
    hyp = d_h_min_witness(work, q, eps, settings)
    k_dh = floor_count(hyp.gauge_value)
    d = min(rho.d_a, rho.d_b)
    cap = int(np.floor(d / (1.0 - eps))) + 2
    k_scan = _scan_rate(lambda m: fidelity(work, oc, m, settings).value, eps, cap)
    if k_dh != k_scan:
        raise SolverError(
            f"rate routes disagree for {oc.value}: hypothesis-testing floor {k_dh}, "
            f"fidelity scan {k_scan} (gauge optimum {hyp.gauge_value:.10f})"
        )
    witness = hyp.witness if frame is None else _pull_back_witness(rho, frame, hyp.witness)
    return DistillationResult("rate_eps", oc, log2_int(k_dh), m=k_dh, method="bisection",
                              certificate=witness,
                              diagnostics={"gauge_value": hyp.gauge_value})


def rate_zero_error(rho: DensityOperator, oc: OperationClass,
                    settings: SolverSettings | None = None) -> DistillationResult:
    """Exact-distillation rate: log2 of the largest m reachable with fidelity one."""
    if is_pure(rho):
        rho, _ = _pure_schmidt_frame(rho)
    pi = support_projector(rho)
    if oc is OperationClass.ONE_WAY_LOCC_PURE:
        if not is_pure(rho):
            raise IntractableSetError("one-way LOCC rate implemented for pure states only")
        bits, k = special.pure_zero_error(_schmidt_of(rho))
        return DistillationResult("rate_zero_error", oc, bits, m=k, method="closed_form")
    if oc is OperationClass.SEPP:
        v = gauge_sep_projector(pi)
        k = floor_count(v)
        return DistillationResult("rate_zero_error", oc, log2_int(k), m=k, method="closed_form")
    if oc in (OperationClass.RAINS_PRESERVING, OperationClass.PPT_PLUS_PRESERVING):
        v = gauge_polar(oc.gauge_set, pi, settings)
        k = floor_count(v)
        return DistillationResult("rate_zero_error", oc, log2_int(k), m=k, method="sdp")
    # PPT and PPT-preserving: minimise the sup-norm of the partial transpose of a
    # witness sandwiched between the support projector and the identity.
    n, split = rho.dim, (rho.d_a, rho.d_b)
    prog = ConicProgram("rate0_ppt")
    w = prog.hermitian_variable("W", n, split)
    t = prog.scalar_variable("t")
    eye = const_expr(np.eye(n), split)
    prog.psd(w - const_expr(pi.mat, split))
    prog.psd(eye - w)
    prog.psd(t.times(np.eye(n), split) - pt(w))
    prog.psd(t.times(np.eye(n), split) + pt(w))
    prog.minimize(t.expr())
    v = float(prog.solve(settings).require_optimal().primal_value)
    k = floor_count(v)
    return DistillationResult("rate_zero_error", oc, log2_int(k), m=k, method="sdp")


def asymptotic_zero_error_rains(rho: DensityOperator,
                                settings: SolverSettings | None = None) -> float:
    """Regularised zero-error rate under Rains-preserving maps: -log2 of the support gauge."""
    if is_pure(rho):
        rho, _ = _pure_schmidt_frame(rho)
    v = gauge_polar(OperatorSet.RAINS, support_projector(rho), settings)
    return float(-np.log2(v))


def _water_fill_cap(xi: np.ndarray, cap: float) -> np.ndarray:
    """Nearest unit vector (in the flattening sense) with entries at most cap."""
    x = np.sort(np.abs(xi))[::-1].astype(float)
    d = x.size
    if cap * cap * d < 1.0 - 1e-12:
        raise ValueError("cap too small to hold a unit vector")
    out = x.copy()
    for head in range(d + 1):
        rem = 1.0 - cap * cap * head
        tail = x[head:]
        tail_sq = float(np.sum(tail * tail))
        if tail_sq <= 1e-300:
            if rem <= 1e-12:
                out[:head] = cap
                out[head:] = np.sqrt(max(rem, 0.0) / max(d - head, 1))
                break
            continue
        scale = np.sqrt(max(rem, 0.0) / tail_sq)
        if head == d or x[head] * scale <= cap + 1e-12:
            out[:head] = cap
            out[head:] = tail * scale
            break
    out = np.clip(out, 0.0, cap)
    nrm = np.linalg.norm(out)
    return np.sort(out / nrm)[::-1]


def assisted_fidelity(rho: DensityOperator, oc: OperationClass, m: int,
                      mode: str, settings: SolverSettings | None = None,
                      n_samples: int = 2000, seed: int = 0) -> DistillationResult:
    """Environment-assisted fidelity: exact for pure inputs, sampled bound otherwise.

    The assisted optimum maximises state fidelity against states admitting a
    decomposition into pure states with max squared Schmidt coefficient <= 1/m.
    The sampled mode water-fills Haar vectors onto that cap; it is a heuristic
    lower bound, reported as such.
    """
    m = int(m)
    if m < 1:
        raise ValueError("m must be at least 1")
    if mode == "exact_pure":
        if not is_pure(rho):
            raise ValueError("exact_pure mode requires a pure state")
        val = special.pure_fidelity(_schmidt_of(rho), m)
        return DistillationResult("assisted_fidelity", oc, val, m=m, method="closed_form")
    if mode != "lower_bound_sampled":
        raise ValueError(f"unknown mode {mode!r}")
    d = min(rho.d_a, rho.d_b)
    if m > d:
        raise ValueError("no candidate states exist for m above the local dimension")
    cap = 1.0 / np.sqrt(m)
    rng = np.random.default_rng(seed)

    def capped_copy(vec: np.ndarray) -> DensityOperator:
        psi = PureState(rho.d_a, rho.d_b, vec / np.linalg.norm(vec))
        xi, u, v = schmidt_decompose(psi)
        flat = _water_fill_cap(xi.coefficients, cap)
        amp = (u * flat) @ v.T  # sum_i flat_i kron(u_i, v_i) as a d_a x d_b table
        return PureState(rho.d_a, rho.d_b, amp.reshape(-1)).density()

    candidates = [pure_from_schmidt(
        SchmidtVector(np.concatenate([np.full(m, cap), np.zeros(d - m)])),
        rho.d_a, rho.d_b).density()]
    eigw, eigv = np.linalg.eigh(rho.mat)
    for idx in np.argsort(eigw)[::-1][:4]:
        if eigw[idx] > 1e-9:
            candidates.append(capped_copy(eigv[:, idx]))
    for _ in range(n_samples):
        g = rng.standard_normal(rho.dim) + 1j * rng.standard_normal(rho.dim)
        candidates.append(capped_copy(g))
    best = max(state_fidelity(rho, omega) for omega in candidates)
    return DistillationResult("assisted_fidelity", oc, float(min(best, 1.0)), m=m,
                              method="closed_form", is_lower_bound=True,
                              diagnostics={"n_samples": n_samples, "seed": seed})
