"""Conic solver layer: embeddings, lowering, statuses, dual extraction."""

import numpy as np
import pytest

from qedist.solver import (
    ConicProgram,
    SolverError,
    SolverSettings,
    coords_from_hermitian,
    const_expr,
    embed_real,
    extract_certificate,
    hermitian_from_coords,
    hermitian_imag_mask,
    inner_expr,
    pt,
    smat,
    svec,
    trace_expr,
    unembed_dual,
)
from qedist.bipartite import partial_transpose_matrix


def _random_hermitian(n, seed):
    rng = np.random.default_rng(seed)
    raw = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (raw + raw.conj().T)


def test_coordinate_round_trip():
    for n in (2, 3, 5):
        m = _random_hermitian(n, n)
        h = coords_from_hermitian(m)
        assert h.shape == (n * n,)
        assert np.allclose(hermitian_from_coords(h, n), m)
        # imaginary-basis mask selects exactly the antisymmetric coordinates
        mask = hermitian_imag_mask(n)
        assert mask.sum() == n * (n - 1) // 2
        real_m = np.real(m) + 0.0j
        assert np.allclose(coords_from_hermitian(real_m)[mask], 0.0)


def test_svec_isometry_and_round_trip():
    for n in (2, 4):
        a = np.real(_random_hermitian(n, 1))
        b = np.real(_random_hermitian(n, 2))
        va, vb = svec(a), svec(b)
        assert abs(np.dot(va, vb) - np.tensordot(a, b, axes=2)) < 1e-12
        assert np.allclose(smat(va, n), a)


def test_embed_real_inverse():
    m = _random_hermitian(3, 9)
    e = embed_real(m)
    assert e.shape == (6, 6)
    assert np.allclose(e, e.T)
    # PSD spectrum doubles: each eigenvalue appears twice
    ew = np.sort(np.linalg.eigvalsh(e))
    hw = np.sort(np.repeat(np.linalg.eigvalsh(m), 2))
    assert np.allclose(ew, hw)
    # the embedding doubles inner products, so the dual map carries a factor 2:
    # <unembed_dual(D), M> = <D, embed_real(M)> for every Hermitian M
    assert np.allclose(unembed_dual(e), 2.0 * m)
    other = _random_hermitian(3, 10)
    lhs = np.tensordot(unembed_dual(e).conj(), other, axes=2).real
    rhs = np.tensordot(e, embed_real(other), axes=2)
    assert abs(lhs - rhs) < 1e-10


def test_lambda_max_program():
    """min t with t*1 - X psd recovers the top eigenvalue, real and complex."""
    for seed, real in [(0, True), (1, False)]:
        x = _random_hermitian(4, seed)
        if real:
            x = np.real(x) + 0.0j
        prog = ConicProgram("lmax")
        t = prog.scalar_variable("t")
        prog.psd(t.times(np.eye(4)) - const_expr(x))
        prog.minimize(t.expr())
        report = prog.solve().require_optimal()
        top = np.linalg.eigvalsh(x)[-1]
        assert abs(report.primal_value - top) < 1e-7
        assert abs(report.dual_value - top) < 1e-6
        # dual of the PSD block is a unit-trace PSD matrix aligned with the
        # top eigenvector
        z = report.psd_duals[0]
        assert abs(np.trace(z).real - 1.0) < 1e-6
        assert np.linalg.eigvalsh(z)[0] > -1e-7
        assert abs(np.tensordot(z.conj(), x, axes=2).real - top) < 1e-6


def test_top_eigenvalue_via_state_variable():
    """max <X,W> over unit-trace PSD W, with an equality constraint."""
    x = _random_hermitian(3, 5)
    prog = ConicProgram()
    w = prog.hermitian_variable("w", 3)
    prog.psd(w)
    prog.eq(trace_expr(w), 1.0)
    prog.maximize(inner_expr(x, w))
    report = prog.solve().require_optimal()
    assert abs(report.primal_value - np.linalg.eigvalsh(x)[-1]) < 1e-7
    w_star = extract_certificate(report, "w")
    assert abs(np.trace(w_star).real - 1.0) < 1e-7
    assert np.linalg.eigvalsh(w_star)[0] > -1e-8


def test_infeasible_and_unbounded_statuses():
    prog = ConicProgram()
    w = prog.hermitian_variable("w", 2)
    prog.psd(w - const_expr(np.eye(2)))  # w >= 1
    prog.psd(-w)                          # w <= 0
    prog.minimize(trace_expr(w))
    assert prog.solve().status == "infeasible"
    with pytest.raises(SolverError):
        prog.solve().require_optimal()

    prog = ConicProgram()
    w = prog.hermitian_variable("w", 2)
    prog.psd(w)
    prog.maximize(trace_expr(w))
    assert prog.solve().status == "unbounded"


def test_real_reduction_matches_embedding():
    """Real-data programs give the same optimum and duals in both modes."""
    x = np.real(_random_hermitian(4, 3)) + 0.0j
    values, duals = [], []
    for allow in (True, False):
        prog = ConicProgram()
        w = prog.hermitian_variable("w", 4, split=(2, 2))
        prog.psd(w)
        prog.psd(const_expr(np.eye(4), (2, 2)) - w)
        prog.psd(pt(w) * -1.0 + const_expr(0.5 * np.eye(4), (2, 2)))
        prog.maximize(inner_expr(x, w))
        settings = SolverSettings.default()
        settings = type(settings)(**{**settings.__dict__, "allow_real_reduction": allow})
        report = prog.solve(settings).require_optimal()
        values.append(report.primal_value)
        duals.append(report.psd_duals[0])
    assert abs(values[0] - values[1]) < 1e-6
    assert np.max(np.abs(duals[0] - duals[1])) < 1e-4
    # complex data must fall back to the embedding and still solve
    xc = _random_hermitian(4, 4)
    prog = ConicProgram()
    w = prog.hermitian_variable("w", 4, split=(2, 2))
    prog.psd(w)
    prog.psd(const_expr(np.eye(4), (2, 2)) - w)
    prog.maximize(inner_expr(xc, w))
    report = prog.solve().require_optimal()
    expected = np.sum(np.clip(np.linalg.eigvalsh(xc), 0.0, None))
    assert abs(report.primal_value - expected) < 1e-6


def test_pt_expression_matches_matrix_transform():
    m = _random_hermitian(6, 8)
    expr = pt(const_expr(m, (2, 3)))
    assert np.allclose(expr.const, partial_transpose_matrix(m, 2, 3))
    # pt is an involution on expressions
    again = pt(expr)
    assert np.allclose(again.const, m)


def test_scalar_expression_algebra():
    prog = ConicProgram()
    t = prog.scalar_variable("t")
    s = prog.scalar_variable("s")
    e = 1.0 - (t.expr() + 2.0 * s.expr() - 0.5)
    assert abs(e.const - 1.5) < 1e-15
    assert e.terms["t"] == -1.0 and e.terms["s"] == -2.0
    prog.ineq(t.expr(), 0.25)       # t >= 1/4
    prog.ineq(1.0 - t.expr())       # t <= 1
    prog.eq(s.expr() - t.expr())    # s = t
    prog.minimize(t.expr() + s.expr())
    report = prog.solve().require_optimal()
    assert abs(report.primal_value - 0.5) < 1e-8


def test_program_validation_errors():
    prog = ConicProgram()
    prog.hermitian_variable("w", 2)
    with pytest.raises(ValueError):
        prog.hermitian_variable("w", 2)  # duplicate name
    with pytest.raises(ValueError):
        prog.hermitian_variable("bad", 6, split=(2, 2))  # split mismatch
    other = ConicProgram()
    z = other.hermitian_variable("z", 2)
    with pytest.raises(ValueError):
        prog.psd(z)  # foreign variable


def test_certificate_lookup_errors():
    prog = ConicProgram()
    w = prog.hermitian_variable("w", 2)
    prog.psd(w)
    prog.psd(const_expr(np.eye(2)) - w)
    prog.maximize(trace_expr(w))
    report = prog.solve()
    with pytest.raises(KeyError):
        extract_certificate(report, "nope")


def test_sdpa_dump_smoke(tmp_path):
    prog = ConicProgram()
    w = prog.hermitian_variable("w", 2)
    prog.psd(w)
    prog.psd(const_expr(np.eye(2)) - w)
    prog.eq(trace_expr(w), 1.0)
    prog.maximize(inner_expr(np.diag([1.0, 0.0]).astype(complex), w))
    path = tmp_path / "prog.dat-s"
    prog.dump_sparse_sdp(str(path))
    text = path.read_text()
    lines = text.strip().splitlines()
    assert int(lines[0]) == 4  # one 2x2 Hermitian variable
    assert int(lines[1]) == 3  # lp block plus two psd blocks
