"""Conic-program boundary: complex Hermitian SDPs solved through a real cone backend.

A ConicProgram holds Hermitian matrix variables, one real linear objective, and
constraints of three kinds: affine Hermitian expression PSD, affine real
expression equal to zero, affine real expression non-negative.  Solving lowers
everything to a real symmetric cone program via the 2x2 embedding
[[Re, -Im], [Im, Re]] and hands it to clarabel; the factor of 2 the embedding
introduces in inner products is confined to this module.

When every constant in the program is real, the Hermitian variables can be
restricted to real symmetric matrices without changing the optimum: entrywise
conjugation maps feasible points to feasible points of equal objective, so the
average (a real point) is optimal whenever anything is.  Solving then skips
the 2x2 embedding, which shrinks each PSD cone from side 2n to side n; this
is done automatically unless SolverSettings disables it.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

import clarabel

DEFAULT_GAP_TOL = 1e-8
GAP_TOL_ENV = "QEDIST_SOLVER_TOL"


class SolverError(RuntimeError):
    """Raised when a solve does not deliver a usable optimal report."""


@dataclass(frozen=True)
class SolverSettings:
    """Backend tolerances; gap_tol doubles as the report's gap contract."""

    gap_tol: float = DEFAULT_GAP_TOL
    feas_tol: float | None = None
    max_iter: int = 200
    verbose: bool = False
    allow_real_reduction: bool = True

    @staticmethod
    def default() -> "SolverSettings":
        env = os.environ.get(GAP_TOL_ENV)
        if env is not None:
            try:
                return SolverSettings(gap_tol=float(env))
            except ValueError:
                raise SolverError(f"{GAP_TOL_ENV} must be a float, got {env!r}") from None
        return SolverSettings()


# ---------------------------------------------------------------------------
# Hermitian coordinate bases and the real embedding.


def hermitian_basis_indices(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Index arrays (i, j, kind) for the orthonormal Hermitian basis of side n.

    Order: diagonal units E_ii, then for each pair i<j the real unit
    (E_ij+E_ji)/sqrt2 and the imaginary unit i(E_ij-E_ji)/sqrt2.
    """
    ii = list(range(n))
    jj = list(range(n))
    kind = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            ii += [i, i]
            jj += [j, j]
            kind += [1, 2]
    return np.array(ii), np.array(jj), np.array(kind)


def hermitian_from_coords(h: np.ndarray, n: int) -> np.ndarray:
    """Rebuild the Hermitian matrix with coordinates h in the orthonormal basis."""
    ii, jj, kind = _basis_cache(n)
    m = np.zeros((n, n), dtype=complex)
    rt2 = np.sqrt(2.0)
    diag = kind == 0
    m[ii[diag], jj[diag]] = h[diag]
    re = kind == 1
    m[ii[re], jj[re]] += h[re] / rt2
    m[jj[re], ii[re]] += h[re] / rt2
    im = kind == 2
    m[ii[im], jj[im]] += 1j * h[im] / rt2
    m[jj[im], ii[im]] += -1j * h[im] / rt2
    return m


def coords_from_hermitian(m: np.ndarray) -> np.ndarray:
    """Coordinates of a Hermitian matrix in the orthonormal basis."""
    n = m.shape[0]
    ii, jj, kind = _basis_cache(n)
    h = np.zeros(ii.size)
    rt2 = np.sqrt(2.0)
    diag = kind == 0
    h[diag] = m[ii[diag], jj[diag]].real
    re = kind == 1
    h[re] = rt2 * m[ii[re], jj[re]].real
    im = kind == 2
    h[im] = rt2 * m[ii[im], jj[im]].imag
    return h


_BASIS_CACHE: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}


def _basis_cache(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if n not in _BASIS_CACHE:
        _BASIS_CACHE[n] = hermitian_basis_indices(n)
    return _BASIS_CACHE[n]


def hermitian_imag_mask(n: int) -> np.ndarray:
    """Boolean mask over the n^2 coordinates marking the imaginary basis units."""
    _, _, kind = _basis_cache(n)
    return kind == 2


def basis_stack(n: int) -> np.ndarray:
    """All n^2 basis matrices as a (n^2, n, n) complex stack."""
    k = n * n
    eye_coords = np.eye(k)
    out = np.empty((k, n, n), dtype=complex)
    for idx in range(k):
        out[idx] = hermitian_from_coords(eye_coords[idx], n)
    return out


_STACK_CACHE: dict[int, np.ndarray] = {}


def _stack_cache(n: int) -> np.ndarray:
    if n not in _STACK_CACHE:
        _STACK_CACHE[n] = basis_stack(n)
    return _STACK_CACHE[n]


def embed_real(m: np.ndarray) -> np.ndarray:
    """2x2 real symmetric embedding of a complex Hermitian matrix."""
    re, im = m.real, m.imag
    return np.block([[re, -im], [im, re]])


def unembed_dual(d: np.ndarray) -> np.ndarray:
    """Adjoint of embed_real: pairing <unembed(D), M> = <D, embed(M)> for Hermitian M."""
    n = d.shape[0] // 2
    d11, d12 = d[:n, :n], d[:n, n:]
    d21, d22 = d[n:, :n], d[n:, n:]
    out = (d11 + d22) + 1j * (d21 - d12)
    return 0.5 * (out + out.conj().T)


def _svec_indices(side: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    rows, cols, scale = [], [], []
    rt2 = np.sqrt(2.0)
    for j in range(side):
        for i in range(j + 1):
            rows.append(i)
            cols.append(j)
            scale.append(1.0 if i == j else rt2)
    return np.array(rows), np.array(cols), np.array(scale)


_SVEC_CACHE: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}


def _svec_cache(side: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if side not in _SVEC_CACHE:
        _SVEC_CACHE[side] = _svec_indices(side)
    return _SVEC_CACHE[side]


def svec(m: np.ndarray) -> np.ndarray:
    """Scaled upper-triangle vectorization matching the backend's PSD cone."""
    rows, cols, scale = _svec_cache(m.shape[0])
    return m[rows, cols] * scale


def svec_stack(ms: np.ndarray) -> np.ndarray:
    rows, cols, scale = _svec_cache(ms.shape[1])
    return ms[:, rows, cols] * scale


def smat(v: np.ndarray, side: int) -> np.ndarray:
    rows, cols, scale = _svec_cache(side)
    m = np.zeros((side, side))
    m[rows, cols] = v / scale
    m[cols, rows] = v / scale
    return m


def _pt_stack(ms: np.ndarray, d_a: int, d_b: int) -> np.ndarray:
    k, n, _ = ms.shape
    return ms.reshape(k, d_a, d_b, d_a, d_b).transpose(0, 1, 4, 3, 2).reshape(k, n, n)


# ---------------------------------------------------------------------------
# Affine expressions.


@dataclass(frozen=True)
class _VarInfo:
    name: str
    dim: int
    split: tuple[int, int]


class MatrixExpression:
    """Affine Hermitian-valued expression: const + sum of variable terms."""

    def __init__(self, dim: int, split: tuple[int, int], const: np.ndarray | None = None,
                 terms: dict | None = None, sterms: dict | None = None):
        self.dim = dim
        self.split = split
        self.const = np.zeros((dim, dim), dtype=complex) if const is None else np.asarray(const, dtype=complex)
        self.terms = dict(terms or {})    # (var name, pt flag) -> real coeff
        self.sterms = dict(sterms or {})  # scalar var name -> Hermitian coeff matrix

    def _check(self, other: "MatrixExpression") -> None:
        if self.dim != other.dim:
            raise ValueError("dimension mismatch in matrix expression")
        if self.split != other.split:
            raise ValueError("bipartite split mismatch in matrix expression")

    def __add__(self, other: "MatrixExpression") -> "MatrixExpression":
        self._check(other)
        terms = dict(self.terms)
        for key, c in other.terms.items():
            terms[key] = terms.get(key, 0.0) + c
        sterms = {k: v.copy() for k, v in self.sterms.items()}
        for k, v in other.sterms.items():
            sterms[k] = sterms.get(k, 0.0) + v
        return MatrixExpression(self.dim, self.split, self.const + other.const, terms, sterms)

    def __neg__(self) -> "MatrixExpression":
        return self * (-1.0)

    def __sub__(self, other: "MatrixExpression") -> "MatrixExpression":
        return self + (-other)

    def __mul__(self, c: float) -> "MatrixExpression":
        c = float(c)
        return MatrixExpression(
            self.dim, self.split, c * self.const,
            {k: c * v for k, v in self.terms.items()},
            {k: c * v for k, v in self.sterms.items()},
        )

    __rmul__ = __mul__


def const_expr(mat: np.ndarray, split: tuple[int, int] | None = None) -> MatrixExpression:
    mat = np.asarray(mat, dtype=complex)
    n = mat.shape[0]
    return MatrixExpression(n, split or (n, 1), const=mat)


def pt(expr: MatrixExpression) -> MatrixExpression:
    """Partial transpose of an affine expression with respect to its split."""
    d_a, d_b = expr.split
    const = expr.const.reshape(d_a, d_b, d_a, d_b).transpose(0, 3, 2, 1).reshape(expr.dim, expr.dim)
    terms = {(name, not flag): c for (name, flag), c in expr.terms.items()}
    sterms = {
        name: c.reshape(d_a, d_b, d_a, d_b).transpose(0, 3, 2, 1).reshape(expr.dim, expr.dim)
        for name, c in expr.sterms.items()
    }
    return MatrixExpression(expr.dim, expr.split, const, terms, sterms)


class ScalarExpression:
    """Affine real-valued expression: const + sum_v <C_v, X_v>."""

    def __init__(self, const: float = 0.0, terms: dict | None = None):
        self.const = float(const)
        self.terms = {k: np.asarray(v, dtype=complex) for k, v in (terms or {}).items()}

    def __add__(self, other: "ScalarExpression | float") -> "ScalarExpression":
        if not isinstance(other, ScalarExpression):
            return ScalarExpression(self.const + float(other), self.terms)
        terms = {k: v.copy() for k, v in self.terms.items()}
        for k, v in other.terms.items():
            terms[k] = terms.get(k, 0.0) + v
        return ScalarExpression(self.const + other.const, terms)

    __radd__ = __add__

    def __neg__(self) -> "ScalarExpression":
        return self * (-1.0)

    def __sub__(self, other: "ScalarExpression | float") -> "ScalarExpression":
        return self + (-other if isinstance(other, ScalarExpression) else -float(other))

    def __rsub__(self, other: float) -> "ScalarExpression":
        return (-self) + float(other)

    def __mul__(self, c: float) -> "ScalarExpression":
        c = float(c)
        return ScalarExpression(c * self.const, {k: c * v for k, v in self.terms.items()})

    __rmul__ = __mul__


def inner_expr(c: np.ndarray, expr: MatrixExpression) -> ScalarExpression:
    """<C, expr> as a scalar expression; C must be Hermitian."""
    c = np.asarray(c, dtype=complex)
    out = ScalarExpression(float(np.tensordot(c.conj(), expr.const, axes=2).real))
    d_a, d_b = expr.split
    c_pt = c.reshape(d_a, d_b, d_a, d_b).transpose(0, 3, 2, 1).reshape(c.shape)
    for (name, flag), coeff in expr.terms.items():
        mat = coeff * (c_pt if flag else c)
        out.terms[name] = out.terms.get(name, 0.0) + mat
    for name, cmat in expr.sterms.items():
        val = float(np.tensordot(c.conj(), cmat, axes=2).real)
        out.terms[name] = out.terms.get(name, 0.0) + np.array([[val]], dtype=complex)
    return out


def trace_expr(expr: MatrixExpression) -> ScalarExpression:
    return inner_expr(np.eye(expr.dim), expr)


class ScalarVar:
    """Handle for a real scalar variable (a 1x1 Hermitian variable internally)."""

    def __init__(self, name: str):
        self.name = name

    def expr(self) -> ScalarExpression:
        return ScalarExpression(0.0, {self.name: np.array([[1.0]], dtype=complex)})

    def times(self, mat: np.ndarray, split: tuple[int, int] | None = None) -> MatrixExpression:
        mat = np.asarray(mat, dtype=complex)
        n = mat.shape[0]
        return MatrixExpression(n, split or (n, 1), sterms={self.name: mat})


# ---------------------------------------------------------------------------
# Program container and reports.


@dataclass
class SolveReport:
    status: str
    primal_value: float
    dual_value: float
    duality_gap: float
    variable_assignments: dict[str, np.ndarray | float]
    psd_duals: list[np.ndarray]
    eq_duals: list[float]
    ineq_duals: list[float]
    backend_status: str
    iterations: int

    def require_optimal(self) -> "SolveReport":
        if self.status != "optimal":
            raise SolverError(
                f"solve ended with status {self.status!r} "
                f"(backend {self.backend_status}, gap {self.duality_gap:.3e})"
            )
        return self


def extract_certificate(report: SolveReport, name: str) -> np.ndarray | float:
    """The named variable at the optimum; caller re-validates feasibility."""
    report.require_optimal()
    if name not in report.variable_assignments:
        raise KeyError(f"no variable named {name!r} in report")
    return report.variable_assignments[name]


class ConicProgram:
    """Hermitian-variable conic program with PSD, equality, and inequality constraints."""

    def __init__(self, name: str = ""):
        self.name = name
        self._vars: dict[str, _VarInfo] = {}
        self._psd: list[MatrixExpression] = []
        self._eq: list[ScalarExpression] = []
        self._ineq: list[ScalarExpression] = []
        self._sense: str | None = None
        self._objective: ScalarExpression | None = None

    def hermitian_variable(self, name: str, dim: int, split: tuple[int, int] | None = None) -> MatrixExpression:
        if name in self._vars:
            raise ValueError(f"duplicate variable {name!r}")
        split = split or (dim, 1)
        if split[0] * split[1] != dim:
            raise ValueError("split does not factor the dimension")
        self._vars[name] = _VarInfo(name, dim, split)
        return MatrixExpression(dim, split, terms={(name, False): 1.0})

    def scalar_variable(self, name: str) -> ScalarVar:
        if name in self._vars:
            raise ValueError(f"duplicate variable {name!r}")
        self._vars[name] = _VarInfo(name, 1, (1, 1))
        return ScalarVar(name)

    def psd(self, expr: MatrixExpression) -> None:
        self._validate_refs(expr.terms, expr.sterms)
        self._psd.append(expr)

    def eq(self, expr: ScalarExpression, rhs: float = 0.0) -> None:
        self._validate_refs({}, expr.terms)
        self._eq.append(expr - rhs)

    def ineq(self, expr: ScalarExpression, lower: float = 0.0) -> None:
        """Constrain expr >= lower."""
        self._validate_refs({}, expr.terms)
        self._ineq.append(expr - lower)

    def maximize(self, expr: ScalarExpression) -> None:
        self._sense = "max"
        self._objective = expr

    def minimize(self, expr: ScalarExpression) -> None:
        self._sense = "min"
        self._objective = expr

    def _validate_refs(self, mterms: dict, sterms: dict) -> None:
        for key in mterms:
            name = key[0] if isinstance(key, tuple) else key
            if name not in self._vars:
                raise ValueError(f"expression references undeclared variable {name!r}")
        for name in sterms:
            if name not in self._vars:
                raise ValueError(f"expression references undeclared variable {name!r}")

    # -- lowering -----------------------------------------------------------

    def _offsets(self) -> tuple[dict[str, int], int]:
        offsets, pos = {}, 0
        for name, info in self._vars.items():
            offsets[name] = pos
            pos += info.dim * info.dim
        return offsets, pos

    def _scalar_row(self, expr: ScalarExpression, offsets: dict[str, int], width: int) -> np.ndarray:
        row = np.zeros(width)
        for name, cmat in expr.terms.items():
            info = self._vars[name]
            row[offsets[name]: offsets[name] + info.dim ** 2] += coords_from_hermitian(
                0.5 * (cmat + cmat.conj().T)
            )
        return row

    def _psd_block(self, expr: MatrixExpression, offsets: dict[str, int], width: int) -> tuple[np.ndarray, np.ndarray]:
        side = 2 * expr.dim
        tri = side * (side + 1) // 2
        block = np.zeros((tri, width))
        for (name, flag), coeff in expr.terms.items():
            info = self._vars[name]
            stack = _stack_cache(info.dim)
            if flag:
                stack = _pt_stack(stack, *info.split)
            emb = np.concatenate(
                [np.concatenate([stack.real, -stack.imag], axis=2),
                 np.concatenate([stack.imag, stack.real], axis=2)],
                axis=1,
            )
            block[:, offsets[name]: offsets[name] + info.dim ** 2] += coeff * svec_stack(emb).T
        for name, cmat in expr.sterms.items():
            block[:, offsets[name]] += svec(embed_real(cmat))
        return block, svec(embed_real(expr.const))

    def _psd_block_real(self, expr: MatrixExpression, offsets: dict[str, int], width: int) -> tuple[np.ndarray, np.ndarray]:
        # Columns for the imaginary basis units hold garbage here; the caller
        # drops them before handing the rows to the backend.
        tri = expr.dim * (expr.dim + 1) // 2
        block = np.zeros((tri, width))
        for (name, flag), coeff in expr.terms.items():
            info = self._vars[name]
            stack = _stack_cache(info.dim)
            if flag:
                stack = _pt_stack(stack, *info.split)
            block[:, offsets[name]: offsets[name] + info.dim ** 2] += coeff * svec_stack(stack.real).T
        for name, cmat in expr.sterms.items():
            block[:, offsets[name]] += svec(cmat.real)
        return block, svec(expr.const.real)

    def _has_real_data(self) -> bool:
        """True when every constant entering the program has no imaginary part."""
        def mat_ok(m: np.ndarray) -> bool:
            return float(np.max(np.abs(np.asarray(m).imag))) <= 1e-14

        for expr in self._psd:
            if not mat_ok(expr.const):
                return False
            if not all(mat_ok(c) for c in expr.sterms.values()):
                return False
        for scalar in (self._objective, *self._eq, *self._ineq):
            for cmat in scalar.terms.values():
                if not mat_ok(0.5 * (cmat + cmat.conj().T)):
                    return False
        return True

    def solve(self, settings: SolverSettings | None = None) -> SolveReport:
        if self._objective is None or self._sense is None:
            raise ValueError("objective not set")
        settings = settings or SolverSettings.default()
        offsets, width = self._offsets()
        real_mode = settings.allow_real_reduction and self._has_real_data()

        sign = -1.0 if self._sense == "max" else 1.0
        q = sign * self._scalar_row(self._objective, offsets, width)
        const_off = self._objective.const

        rows, b, cones = [], [], []
        for expr in self._eq:
            rows.append(self._scalar_row(expr, offsets, width))
            b.append(-expr.const)
        if self._eq:
            cones.append(clarabel.ZeroConeT(len(self._eq)))
        for expr in self._ineq:
            rows.append(-self._scalar_row(expr, offsets, width))
            b.append(expr.const)
        if self._ineq:
            cones.append(clarabel.NonnegativeConeT(len(self._ineq)))
        psd_slices = []
        cursor = len(rows)
        for expr in self._psd:
            if real_mode:
                block, bvec = self._psd_block_real(expr, offsets, width)
                cone_side = expr.dim
            else:
                block, bvec = self._psd_block(expr, offsets, width)
                cone_side = 2 * expr.dim
            rows.extend(-block)
            b.extend(bvec)
            cones.append(clarabel.PSDTriangleConeT(cone_side))
            psd_slices.append((cursor, cursor + block.shape[0], cone_side))
            cursor += block.shape[0]

        full = np.vstack(rows) if rows else np.zeros((0, width))
        keep = np.ones(width, dtype=bool)
        if real_mode:
            for name, info in self._vars.items():
                if info.dim > 1:
                    keep[offsets[name]: offsets[name] + info.dim ** 2] = ~hermitian_imag_mask(info.dim)
        a_mat = sparse.csc_matrix(full[:, keep])
        q = q[keep]
        b_vec = np.array(b)
        p_mat = sparse.csc_matrix((int(keep.sum()), int(keep.sum())))

        cs = clarabel.DefaultSettings()
        cs.verbose = settings.verbose
        cs.max_iter = settings.max_iter
        cs.tol_gap_abs = settings.gap_tol
        cs.tol_gap_rel = settings.gap_tol
        cs.tol_feas = settings.feas_tol if settings.feas_tol is not None else settings.gap_tol
        solution = clarabel.DefaultSolver(p_mat, q, a_mat, b_vec, cones, cs).solve()

        raw = str(solution.status)
        if solution.status in (clarabel.SolverStatus.Solved, clarabel.SolverStatus.AlmostSolved):
            primal = sign * solution.obj_val + const_off
            dual = sign * solution.obj_val_dual + const_off
            gap = abs(primal - dual)
            # Reduced-accuracy termination is fine as long as the measured gap
            # is still two orders inside the loosest downstream tolerance.
            within = gap <= settings.gap_tol * 100 * (1.0 + abs(primal))
            status = "optimal" if (solution.status == clarabel.SolverStatus.Solved or within) else "numerical_failure"
        elif solution.status in (clarabel.SolverStatus.PrimalInfeasible,
                                 clarabel.SolverStatus.AlmostPrimalInfeasible):
            status, primal, dual, gap = "infeasible", float("nan"), float("nan"), float("nan")
        elif solution.status in (clarabel.SolverStatus.DualInfeasible,
                                 clarabel.SolverStatus.AlmostDualInfeasible):
            status, primal, dual, gap = "unbounded", float("nan"), float("nan"), float("nan")
        else:
            status, primal, dual, gap = "numerical_failure", float("nan"), float("nan"), float("nan")

        assignments: dict[str, np.ndarray | float] = {}
        psd_duals: list[np.ndarray] = []
        eq_duals: list[float] = []
        ineq_duals: list[float] = []
        if status == "optimal":
            x = np.zeros(width)
            x[keep] = np.asarray(solution.x)
            for name, info in self._vars.items():
                coords = x[offsets[name]: offsets[name] + info.dim ** 2]
                mat = hermitian_from_coords(coords, info.dim)
                assignments[name] = float(mat[0, 0].real) if info.dim == 1 else mat
            z = np.asarray(solution.z)
            eq_duals = [float(v) for v in z[: len(self._eq)]]
            ineq_duals = [float(v) for v in z[len(self._eq): len(self._eq) + len(self._ineq)]]
            for start, stop, side in psd_slices:
                block = smat(z[start:stop], side)
                psd_duals.append(block if real_mode else unembed_dual(block))

        return SolveReport(
            status=status,
            primal_value=float(primal),
            dual_value=float(dual),
            duality_gap=float(gap),
            variable_assignments=assignments,
            psd_duals=psd_duals,
            eq_duals=eq_duals,
            ineq_duals=ineq_duals,
            backend_status=raw,
            iterations=int(solution.iterations),
        )

    # -- debug dump ----------------------------------------------------------

    def dump_sparse_sdp(self, path: str) -> None:
        """Write the lowered real program in sparse SDPA text form.

        Convention: min q'x subject to sum_i x_i F_i - F0 >= 0 blockwise; the
        inequality and equality rows become diagonal (negative-size) blocks,
        equalities as paired opposite inequalities.
        """
        offsets, width = self._offsets()
        sign = -1.0 if self._sense == "max" else 1.0
        q = sign * self._scalar_row(self._objective, offsets, width)

        blocks: list[tuple[int, np.ndarray, np.ndarray]] = []  # (size, A rows, b)
        lp_rows, lp_b = [], []
        for expr in self._eq:
            row = self._scalar_row(expr, offsets, width)
            lp_rows += [row, -row]
            lp_b += [-expr.const, expr.const]
        for expr in self._ineq:
            lp_rows.append(-self._scalar_row(expr, offsets, width))
            lp_b.append(expr.const)
        if lp_rows:
            blocks.append((-len(lp_rows), np.vstack(lp_rows), np.array(lp_b)))
        for expr in self._psd:
            block, bvec = self._psd_block(expr, offsets, width)
            blocks.append((2 * expr.dim, -block, bvec))

        lines = [f"{width}", f"{len(blocks)}", " ".join(str(s) for s, _, _ in blocks),
                 " ".join(f"{v:.17g}" for v in q)]

        def emit(matno: int, blkno: int, size: int, vec: np.ndarray) -> None:
            if size < 0:
                for i, v in enumerate(vec):
                    if v != 0.0:
                        lines.append(f"{matno} {blkno} {i + 1} {i + 1} {v:.17g}")
            else:
                rows_i, cols_i, scale = _svec_cache(size)
                vals = vec / scale
                for r, c, v in zip(rows_i, cols_i, vals):
                    if v != 0.0:
                        lines.append(f"{matno} {blkno} {r + 1} {c + 1} {v:.17g}")

        for blkno, (size, a_rows, bvec) in enumerate(blocks, start=1):
            emit(0, blkno, size, -bvec)
            for i in range(width):
                emit(i + 1, blkno, size, -a_rows[:, i])

        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
