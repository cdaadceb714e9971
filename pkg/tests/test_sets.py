"""Operator sets: membership, polar gauges via dual and primal SDPs, sampling."""

import numpy as np
import pytest

from qedist.bipartite import (
    hermitian,
    inner,
    isotropic_state,
    max_correlated_embed,
    max_entangled_projector,
    partial_transpose,
    random_state,
    support_projector,
    tensor_pair,
)
from qedist.sets import (
    IntractableSetError,
    OperatorSet,
    gauge_polar,
    gauge_polar_primal,
    gauge_sep_projector,
    membership,
    sample_member,
    sep_gauge_of_state_support,
)

SDP_SETS = (OperatorSet.PPT_PRIME, OperatorSet.RAINS, OperatorSet.PPT_PLUS,
            OperatorSet.INCOHERENT)


def _random_witness(d_a, d_b, seed):
    rng = np.random.default_rng(seed)
    n = d_a * d_b
    raw = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return hermitian(d_a, d_b, raw + raw.conj().T)


def test_membership_known_points():
    bell = max_entangled_projector(2)
    sep_iso = isotropic_state(3, 1.0 / 3)       # separability threshold
    npt_iso = isotropic_state(3, 0.6)
    assert membership(OperatorSet.PPT_PLUS, sep_iso)
    assert membership(OperatorSet.SEP, sep_iso)
    assert not membership(OperatorSet.PPT_PLUS, npt_iso)
    assert not membership(OperatorSet.SEP, npt_iso)
    # Bell projector is a state but has PT trace norm 2
    assert not membership(OperatorSet.RAINS, bell)
    assert not membership(OperatorSet.PPT_PRIME, bell)
    assert membership(OperatorSet.PPT_PRIME, hermitian(2, 2, 0.5 * bell.mat))
    assert membership(OperatorSet.INCOHERENT, isotropic_state(2, 0.25))  # diagonal
    assert not membership(OperatorSet.INCOHERENT, bell)


def test_sep_membership_structured_only():
    assert membership(OperatorSet.SEP, random_state("haar_pure", (2, 2), seed=3)) is False
    mc = max_correlated_embed(np.diag([0.6, 0.4]).astype(complex))
    assert membership(OperatorSet.SEP, mc)
    with pytest.raises(IntractableSetError):
        membership(OperatorSet.SEP, random_state("ginibre_mixed", (2, 2), seed=0))


def test_samples_are_members():
    for s in SDP_SETS + (OperatorSet.PPT,):
        for seed in range(4):
            x = sample_member(s, (2, 3), seed=seed)
            assert membership(s, x, tol=1e-8), (s, seed)


def test_gauge_closed_forms():
    """PPT-prime and incoherent gauges have eigenvalue closed forms."""
    w = _random_witness(2, 2, 0)
    pt_eigs = np.linalg.eigvalsh(partial_transpose(w).mat)
    assert abs(gauge_polar(OperatorSet.PPT_PRIME, w) - np.max(np.abs(pt_eigs))) < 1e-12
    assert abs(gauge_polar(OperatorSet.INCOHERENT, w) - max(0.0, np.max(np.diag(w.mat).real))) < 1e-12
    # maximally entangled projector: PT eigenvalues are +-1/d
    for d in (2, 3):
        psi = max_entangled_projector(d)
        assert abs(gauge_polar(OperatorSet.PPT_PRIME, psi) - 1.0 / d) < 1e-12
        assert abs(gauge_polar(OperatorSet.RAINS, psi) - 1.0 / d) < 1e-7
        assert abs(gauge_polar(OperatorSet.PPT_PLUS, psi) - 1.0 / d) < 1e-7


def test_gauge_dual_matches_primal():
    """Independent primal maximisation agrees with the constraint-form gauge."""
    for seed in range(6):
        w = _random_witness(2, 2, seed) if seed % 2 == 0 else _random_witness(3, 2, seed)
        for s in SDP_SETS:
            g = gauge_polar(s, w)
            val, x_star = gauge_polar_primal(s, w)
            assert abs(g - val) < 1e-6, (s, seed)
            # the achieving member certifies the value from inside the set
            assert inner(hermitian(w.d_a, w.d_b, x_star), w) > val - 1e-6


def test_gauge_ordering_follows_set_inclusion():
    """PPT_PLUS within RAINS within PPT_PRIME makes the support functions order."""
    for seed in range(6):
        w = _random_witness(3, 3, seed)
        g_plus = gauge_polar(OperatorSet.PPT_PLUS, w)
        g_rains = gauge_polar(OperatorSet.RAINS, w)
        g_prime = gauge_polar(OperatorSet.PPT_PRIME, w)
        assert g_plus <= g_rains + 1e-7
        assert g_rains <= g_prime + 1e-7


def test_sampled_members_respect_gauge():
    """<X, W> <= Gamma_polar(W) for every member X: the defining inequality."""
    for s in SDP_SETS:
        w = _random_witness(2, 2, 31)
        g = gauge_polar(s, w)
        for seed in range(8):
            x = sample_member(s, (2, 2), seed=seed)
            assert inner(x, w) <= g + 1e-7


def test_sep_gauge_projector_cases():
    # pure support: largest squared Schmidt coefficient
    psi = random_state("haar_pure", (3, 3), seed=4)
    from qedist.bipartite import pure_from_density, schmidt_decompose
    xi, _, _ = schmidt_decompose(pure_from_density(psi))
    assert abs(sep_gauge_of_state_support(psi) - xi.coefficients[0] ** 2) < 1e-10
    # diagonal max-correlated support contains product vectors |ii>
    mc = max_correlated_embed(np.diag([0.5, 0.3, 0.2]).astype(complex))
    assert abs(gauge_sep_projector(support_projector(mc)) - 1.0) < 1e-10
    # tilted rank-2 support: gauge is the largest diagonal of the coefficient projector
    a = np.array([1.0, 1.0, 0.0]) / np.sqrt(2)
    b = np.array([1.0, -1.0, 2.0]) / np.sqrt(6)
    coeffs = 0.6 * np.outer(a, a) + 0.4 * np.outer(b, b)
    pi = support_projector(max_correlated_embed(coeffs.astype(complex)))
    assert abs(gauge_sep_projector(pi) - 2.0 / 3.0) < 1e-10
    # large-rank projectors intersect the product variety
    assert gauge_sep_projector(hermitian(2, 2, np.eye(4))) == 1.0
    with pytest.raises(IntractableSetError):
        gauge_sep_projector(_random_witness(2, 2, 5))  # not a projector


def test_rains_gauge_multiplicative_on_projectors():
    """Gamma_RAINS_polar(Pi kron Pi) = Gamma_RAINS_polar(Pi)^2 on support projectors."""
    for seed in (0, 1):
        rho = random_state("ginibre_mixed", (2, 2), seed=seed, rank=2)
        pi = support_projector(rho)
        single = gauge_polar(OperatorSet.RAINS, pi)
        pair = gauge_polar(OperatorSet.RAINS, tensor_pair(pi, pi))
        assert abs(pair - single**2) < 1e-5


def test_gauge_rejects_unsupported_sets():
    w = _random_witness(2, 2, 7)
    with pytest.raises(IntractableSetError):
        gauge_polar(OperatorSet.SEP, w)
    with pytest.raises(IntractableSetError):
        gauge_polar_primal(OperatorSet.SEP, w)
