"""Closed-form fast paths: the m-distillation norm and the structured families."""

import numpy as np
import pytest

from qedist.bipartite import (
    max_correlated_embed,
    pure_from_density,
    random_state,
    schmidt_decompose,
    schmidt_vector_from_squares,
)
from qedist.special import (
    IsotropicState,
    MaxCorrelatedState,
    floor_count,
    isotropic_fidelity,
    isotropic_robustness,
    isotropic_sep_lp,
    isotropic_t_monotone,
    log2_int,
    m_distillation_norm,
    m_norm_dual,
    m_norm_vector,
    majorisation_ansatz,
    majorises,
    maxcorr_fidelity,
    maxcorr_rate,
    maxcorr_zero_error,
    pure_fidelity,
    pure_rate,
    pure_rate_qcqp,
    pure_robustness,
    pure_t_monotone,
    pure_zero_error,
)


def test_norm_frozen_example():
    """Squares (0.7, 0.2, 0.1) at m = 2: head keeps the top level, tail collapses."""
    xi = schmidt_vector_from_squares(np.array([0.7, 0.2, 0.1]))
    res = m_distillation_norm(xi, 2)
    assert abs(res.value - (np.sqrt(0.7) + np.sqrt(0.3))) < 1e-12
    assert res.k_star == 1
    assert abs(res.split[0] - np.sqrt(0.7)) < 1e-12
    assert abs(res.split[1] - np.sqrt(0.3)) < 1e-12


def test_norm_limits_and_ties():
    xi = schmidt_vector_from_squares(np.array([0.4, 0.3, 0.2, 0.1]))
    x = xi.coefficients
    # m = 1 is the l2 norm, m >= d the l1 norm
    assert abs(m_distillation_norm(xi, 1).value - 1.0) < 1e-12
    for m in (4, 5, 9):
        assert abs(m_distillation_norm(xi, m).value - x.sum()) < 1e-12
    # uniform vector: the norm is sqrt(m) for m <= d
    uni = schmidt_vector_from_squares(np.ones(6))
    for m in range(1, 7):
        assert abs(m_distillation_norm(uni, m).value - np.sqrt(m)) < 1e-12
    assert m_distillation_norm(uni, 3).k_star == 3
    with pytest.raises(ValueError):
        m_distillation_norm(xi, 0)


def test_norm_primal_equals_dual():
    """Split formula and water-filling maximisation agree to solver-free accuracy."""
    rng = np.random.default_rng(0)
    for trial in range(200):
        d = int(rng.integers(1, 9))
        v = rng.normal(size=d)
        m = int(rng.integers(1, d + 2))
        primal = m_norm_vector(v, m)
        dual, w = m_norm_dual(v, m)
        assert abs(primal - dual) < 1e-9
        # the dual witness is feasible and achieves the value
        x = np.sort(np.abs(v))[::-1]
        assert np.max(np.abs(w)) <= 1.0 + 1e-12
        assert np.linalg.norm(w) <= np.sqrt(m) + 1e-12
        assert abs(float(np.dot(x, w)) - dual) < 1e-9


def test_norm_axioms():
    rng = np.random.default_rng(1)
    for trial in range(200):
        d = int(rng.integers(2, 9))
        m = int(rng.integers(1, d + 1))
        u = rng.normal(size=d)
        v = rng.normal(size=d)
        nu, nv = m_norm_vector(u, m), m_norm_vector(v, m)
        assert m_norm_vector(u + v, m) <= nu + nv + 1e-10
        c = float(rng.normal())
        assert abs(m_norm_vector(c * u, m) - abs(c) * nu) < 1e-10
        # sandwiched between l2 and l1
        assert nu >= np.linalg.norm(u) - 1e-12
        assert nu <= np.sum(np.abs(u)) + 1e-12
    assert m_norm_vector(np.zeros(4), 2) == 0.0


def test_norm_monotone_in_m():
    v = np.array([0.9, 0.5, 0.3, 0.1, 0.05])
    vals = [m_norm_vector(v, m) for m in range(1, 7)]
    assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))


def test_majorisation_ansatz_certifies():
    rng = np.random.default_rng(2)
    for trial in range(50):
        d = int(rng.integers(2, 7))
        xi = schmidt_vector_from_squares(rng.dirichlet(np.ones(d)))
        for m in range(1, d + 1):
            eta = majorisation_ansatz(xi, m)
            assert majorises(eta.coefficients**2, xi.coefficients**2)
            # the flattened tail has at most m distinct levels occupied
            assert eta.d <= d + m


def test_majorises_basics():
    assert majorises(np.array([1.0, 0.0]), np.array([0.5, 0.5]))
    assert not majorises(np.array([0.5, 0.5]), np.array([1.0, 0.0]))
    assert majorises(np.array([0.4, 0.4, 0.2]), np.array([0.3, 0.3, 0.4]))
    assert majorises(np.array([0.5, 0.5]), np.array([0.5, 0.5]))  # reflexive


def test_pure_fidelity_and_rates():
    xi = schmidt_vector_from_squares(np.array([0.7, 0.2, 0.1]))
    assert abs(pure_fidelity(xi, 2) - (0.5 + np.sqrt(0.21))) < 1e-12
    assert pure_fidelity(xi, 1) == pytest.approx(1.0)
    # eps = 0: largest m with full fidelity is floor(1/xi_1^2)
    bits, m = pure_rate(xi, 0.0)
    assert (bits, m) == (0.0, 1)
    bits, m = pure_rate(xi, 0.05)
    assert (bits, m) == (1.0, 2)
    bits, m = pure_zero_error(xi)
    assert (bits, m) == (0.0, 1)
    half = schmidt_vector_from_squares(np.array([0.5, 0.3, 0.2]))
    assert pure_zero_error(half) == (1.0, 2)
    with pytest.raises(ValueError):
        pure_rate(xi, 1.0)


def test_pure_rate_matches_qcqp():
    """The conic reformulation reproduces the scan on random Schmidt vectors."""
    rng = np.random.default_rng(3)
    for trial in range(10):
        d = int(rng.integers(2, 5))
        xi = schmidt_vector_from_squares(rng.dirichlet(np.ones(d) * 2.0))
        for eps in (0.0, 0.01, 0.1):
            scan_bits, scan_m = pure_rate(xi, eps)
            q_bits, q_m = pure_rate_qcqp(xi, eps)
            assert scan_m == q_m, (xi.coefficients, eps)
            assert scan_bits == q_bits


def test_pure_t_monotone_and_robustness():
    xi = schmidt_vector_from_squares(np.array([0.6, 0.4]))
    l1 = xi.coefficients.sum()
    assert abs(pure_robustness(xi) - (l1 * l1 - 1.0)) < 1e-12
    # T^{d-1} coincides with the robustness
    assert abs(pure_t_monotone(xi, 1.0) - pure_robustness(xi)) < 1e-10
    assert pure_t_monotone(xi, 0.0) == 0.0
    # real interpolation stays between the integer values
    lo, mid, hi = (pure_t_monotone(xi, m) for m in (0.5, 0.75, 1.0))
    assert lo <= mid <= hi


def test_isotropic_fidelity_branches():
    for d in (2, 3):
        below = IsotropicState(d, 1.0 / d)
        for m in range(1, d + 1):
            assert abs(isotropic_fidelity(below, m) - 1.0 / m) < 1e-12
        # the two branches agree at the separability threshold
        just_above = IsotropicState(d, 1.0 / d + 1e-12)
        assert abs(isotropic_fidelity(just_above, 2) - 0.5) < 1e-9
    iso = IsotropicState(3, 0.9)
    expected = (3 * 0.9 - 1.0) / 2.0 + 3 * 0.1 / (2 * 2.0)
    assert abs(isotropic_fidelity(iso, 2) - expected) < 1e-12
    assert abs(isotropic_fidelity(IsotropicState(3, 1.0), 3) - 1.0) < 1e-12
    with pytest.raises(ValueError):
        IsotropicState(3, 1.2)


def test_isotropic_lp_attains_closed_form():
    for d in (2, 3):
        for f in (0.2, 1.0 / d, 0.6, 0.9, 1.0):
            iso = IsotropicState(d, f)
            for m in range(2, d + 1):
                lp = isotropic_sep_lp(iso, m)
                assert abs(lp - isotropic_fidelity(iso, m)) < 1e-9, (d, f, m)
    # accepts a bipartite state and twirls it
    rho = random_state("isotropic", (2, 2), seed=0, f=0.8)
    assert abs(isotropic_sep_lp(rho, 2) - isotropic_fidelity(IsotropicState(2, 0.8), 2)) < 1e-9


def test_isotropic_monotone_formulas():
    assert isotropic_t_monotone(3, 1.0 / 3, 2.0) == 0.0
    assert abs(isotropic_t_monotone(3, 0.9, 2.0) - 2 * (2.7 - 1.0) / 2.0) < 1e-12
    assert abs(isotropic_robustness(2, 1.0) - 1.0) < 1e-12  # Bell state robustness
    with pytest.raises(ValueError):
        isotropic_t_monotone(3, 0.9, 3.0)  # above d-1


def test_maxcorr_structured_family():
    plus = np.full((2, 2), 0.5, dtype=complex)  # single-party image of the Bell state
    mc = MaxCorrelatedState(2, plus)
    assert abs(maxcorr_fidelity(mc, 2) - 1.0) < 1e-7
    assert maxcorr_rate(mc, 0.0) == (1.0, 2)
    assert maxcorr_zero_error(mc) == (1.0, 2)
    # diagonal (classically correlated) image distils nothing
    diag = MaxCorrelatedState(2, np.diag([0.7, 0.3]).astype(complex))
    assert abs(maxcorr_fidelity(diag, 2) - 0.5) < 1e-7
    assert maxcorr_rate(diag, 0.0) == (0.0, 1)
    assert maxcorr_zero_error(diag) == (0.0, 1)
    # embedding round trip
    back = MaxCorrelatedState.from_bipartite(mc.embed())
    assert np.allclose(back.coeffs, plus)
    with pytest.raises(ValueError):
        MaxCorrelatedState.from_bipartite(random_state("ginibre_mixed", (2, 2), seed=1))


def test_floor_count_guard():
    assert floor_count(0.5) == 2
    assert floor_count(0.25) == 4
    # values a hair above an exact reciprocal still round down to it
    assert floor_count(1.0 / 3 + 1e-10) == 3
    assert floor_count(1.0) == 1
    assert log2_int(8) == 3.0
    assert log2_int(1) == 0.0


def test_pure_haar_fidelity_matches_norm():
    """Fidelity of Haar states equals the normalised squared norm at every m."""
    for seed in range(5):
        rho = random_state("haar_pure", (3, 3), seed=seed)
        xi, _, _ = schmidt_decompose(pure_from_density(rho))
        for m in range(1, 4):
            assert abs(pure_fidelity(xi, m) - m_distillation_norm(xi, m).value ** 2 / m) < 1e-12
