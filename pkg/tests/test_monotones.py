"""Entanglement monotones: tempered family, robustness, trace distance, negativity."""

import numpy as np
import pytest

from qedist.bipartite import (
    DensityOperator,
    density,
    isotropic_state,
    max_correlated_embed,
    max_entangled_projector,
    pure_from_density,
    random_state,
    schmidt_decompose,
)
from qedist.monotones import (
    g_m,
    g_m_primal,
    g_m_witness,
    mod_trace_distance,
    negativity,
    robustness,
    t_m,
    t_m_primal,
)
from qedist.sets import IntractableSetError, OperatorSet
from qedist.special import (
    isotropic_robustness,
    isotropic_t_monotone,
    pure_robustness,
    pure_t_monotone,
)

CONE_SETS = (OperatorSet.PPT, OperatorSet.PPT_PLUS)
GAUGE_SETS = (OperatorSet.PPT_PRIME, OperatorSet.RAINS, OperatorSet.PPT_PLUS)


def test_t_m_pure_closed_form():
    """T^{m-1} of a pure state is the squared m-norm minus one, any cone set."""
    for seed in range(4):
        rho = random_state("haar_pure", (3, 3), seed=seed)
        xi, _, _ = schmidt_decompose(pure_from_density(rho))
        for m in (1.0, 2.0):
            expected = pure_t_monotone(xi, m)
            for s in CONE_SETS:
                assert abs(t_m(rho, s, m) - expected) < 1e-6, (seed, m, s)
            assert abs(t_m(rho, OperatorSet.SEP, m) - expected) < 1e-12


def test_t_m_isotropic_closed_form():
    for d, f in [(2, 0.3), (2, 0.9), (3, 0.6), (3, 1.0)]:
        rho = isotropic_state(d, f)
        for m in (1.0, float(d - 1)):
            expected = isotropic_t_monotone(d, f, m)
            for s in CONE_SETS:
                assert abs(t_m(rho, s, m) - expected) < 1e-6, (d, f, m, s)
    # beyond m = d-1 the isotropic value saturates
    rho = isotropic_state(3, 0.9)
    plateau = isotropic_t_monotone(3, 0.9, 2.0)
    for m in (3.0, 6.0):
        assert abs(t_m(rho, OperatorSet.PPT_PLUS, m) - plateau) < 1e-6
        assert abs(t_m(rho, OperatorSet.SEP, m) - plateau) < 1e-12


def test_t_m_dual_equals_primal():
    for seed in range(6):
        rho = random_state("ginibre_mixed", (2, 2), seed=seed)
        m = [0.5, 1.0, 2.0][seed % 3]
        for s in CONE_SETS + (OperatorSet.INCOHERENT,):
            a = t_m(rho, s, m)
            b = t_m_primal(rho, s, m)
            assert abs(a - b) < 1e-6, (seed, m, s)


def test_t_m_set_ordering_and_convexity():
    for seed in range(4):
        rho = random_state("ginibre_mixed", (2, 2), seed=seed)
        sig = random_state("ginibre_mixed", (2, 2), seed=seed + 100)
        # smaller set, larger monotone
        assert t_m(rho, OperatorSet.PPT, 1.0) <= t_m(rho, OperatorSet.PPT_PLUS, 1.0) + 1e-7
        mix = density(2, 2, 0.5 * rho.mat + 0.5 * sig.mat)
        bound = 0.5 * t_m(rho, OperatorSet.PPT, 1.0) + 0.5 * t_m(sig, OperatorSet.PPT, 1.0)
        assert t_m(mix, OperatorSet.PPT, 1.0) <= bound + 1e-7


def test_t_m_vanishes_on_members():
    sep = isotropic_state(3, 1.0 / 3)
    for s in CONE_SETS:
        assert abs(t_m(sep, s, 2.0)) < 1e-7
    mc_diag = max_correlated_embed(np.diag([0.6, 0.4]).astype(complex))
    assert abs(t_m(mc_diag, OperatorSet.PPT, 1.0)) < 1e-7


def test_t_m_monotone_under_local_channels():
    """Local dephasing is free for every class, so T^m cannot increase."""
    z = np.diag([1.0, -1.0])
    k = np.kron(z, np.eye(2))
    for seed in range(3):
        rho = random_state("ginibre_mixed", (2, 2), seed=seed)
        deph = density(2, 2, 0.5 * rho.mat + 0.5 * k @ rho.mat @ k.conj().T)
        for s in CONE_SETS:
            assert t_m(deph, s, 1.0) <= t_m(rho, s, 1.0) + 1e-7


def test_g_m_witness_and_primal():
    for seed in range(4):
        rho = random_state("ginibre_mixed", (2, 2), seed=seed)
        for q in GAUGE_SETS:
            val, w = g_m_witness(rho, q, 2.0)
            assert abs(g_m_primal(rho, q, 2.0) - val) < 1e-6, (seed, q)
            # witness feasibility: 0 <= W <= 1 and the achieved overlap
            eig = np.linalg.eigvalsh(w.mat)
            assert eig[0] > -1e-7 and eig[-1] < 1.0 + 1e-7
            overlap = float(np.tensordot(rho.mat.conj(), w.mat, axes=2).real)
            assert abs(overlap - val) < 1e-7


def test_g_m_relates_to_t_m_on_unit_trace_sets():
    """G^m = (T^{m-1} + 1)/m when the gauge set consists of unit-trace members."""
    for seed in range(3):
        rho = random_state("ginibre_mixed", (2, 2), seed=seed)
        for m in (2.0, 3.0):
            lhs = g_m(rho, OperatorSet.PPT_PLUS, m)
            rhs = (t_m(rho, OperatorSet.PPT_PLUS, m - 1.0) + 1.0) / m
            assert abs(lhs - rhs) < 1e-6, (seed, m)


def test_robustness_closed_forms():
    bell = max_entangled_projector(2)
    rho = DensityOperator(2, 2, bell.mat)
    for s in CONE_SETS:
        assert abs(robustness(rho, s) - 1.0) < 1e-7
    xi, _, _ = schmidt_decompose(pure_from_density(rho))
    assert abs(pure_robustness(xi) - 1.0) < 1e-12
    assert abs(robustness(rho, OperatorSet.SEP) - 1.0) < 1e-12
    iso = isotropic_state(3, 0.8)
    assert abs(robustness(iso, OperatorSet.PPT) - isotropic_robustness(3, 0.8)) < 1e-6
    # separable states have zero robustness
    assert abs(robustness(isotropic_state(2, 0.5), OperatorSet.PPT)) < 1e-7


def test_robustness_equals_t_at_top_level():
    """T^{d-1} and the generalised robustness are the same SDP in disguise."""
    for seed in range(4):
        d = 2 if seed % 2 == 0 else 3
        rho = random_state("ginibre_mixed", (d, d), seed=seed)
        for s in CONE_SETS:
            assert abs(t_m(rho, s, float(d - 1)) - robustness(rho, s)) < 1e-5, (seed, s)


def test_robustness_ppt_equals_pptplus():
    for seed in range(6):
        d = 2 if seed % 2 == 0 else 3
        rho = random_state("ginibre_mixed", (d, d), seed=seed)
        assert abs(robustness(rho, OperatorSet.PPT) - robustness(rho, OperatorSet.PPT_PLUS)) < 1e-5


def test_negativity_values():
    bell = DensityOperator(2, 2, max_entangled_projector(2).mat)
    assert abs(negativity(bell) - 0.5) < 1e-12
    assert abs(negativity(isotropic_state(2, 0.5))) < 1e-12
    assert abs(negativity(isotropic_state(3, 1.0)) - 1.0) < 1e-12


def test_mod_trace_distance_routes():
    for seed in range(3):
        rho = random_state("ginibre_mixed", (2, 2), seed=seed)
        for s in CONE_SETS:
            assert abs(mod_trace_distance(rho, s) - t_m(rho, s, 1.0)) < 1e-6
    assert abs(mod_trace_distance(isotropic_state(2, 0.5), OperatorSet.PPT)) < 1e-7


def test_unsupported_sets_raise():
    rho = random_state("ginibre_mixed", (2, 2), seed=0)
    with pytest.raises(IntractableSetError):
        t_m(rho, OperatorSet.SEP, 1.0)  # generic mixed state
    with pytest.raises(IntractableSetError):
        t_m(rho, OperatorSet.RAINS, 1.0)  # not a cone set
    with pytest.raises(IntractableSetError):
        g_m(rho, OperatorSet.PPT, 2.0)  # not a gauge set
    with pytest.raises(ValueError):
        t_m(rho, OperatorSet.PPT, -1.0)
    with pytest.raises(ValueError):
        g_m(rho, OperatorSet.PPT_PLUS, 0.5)
