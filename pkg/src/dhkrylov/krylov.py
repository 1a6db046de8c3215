"""Krylov solvers for A = H + S with positive definite Hermitian part.

Preconditioning A x = b by its Hermitian part gives (I + K) x = b_hat with
K = H^{-1} S and b_hat = H^{-1} b.  K is skew-adjoint in the H-inner
product (its H-adjoint is -K), so an H-orthonormal basis of the Krylov
spaces K_k(K, b_hat) is generated by a genuine three-term recurrence

    K V_k = V_{k+1} T_{k+1,k},      V_k* H V_k = I_k,

with T tridiagonal and skew-Hermitian (V_k* S V_k = T_{k,k}).  On top of
this engine:

* Widlund's method: oblique projection, x_k = V_k y_k with
  (I_k + T_{k,k}) y_k = ||b_hat||_H e_1 (the displayed Euclidean
  orthogonality V_k* r_k = 0); I + skew-Hermitian is always nonsingular.
* Rapoport's method: minimal residual in the H^{-1} norm; y_k solves the
  tridiagonal least squares min || ||b_hat||_H e_1 - T~_{k+1,k} y ||_2,
  updated incrementally by plane rotations as in MINRES.
* GMRES (modified Gram-Schmidt, no restarts), optionally applied to the
  left-preconditioned system H^{-1} A x = b_hat, which searches the same
  Krylov spaces as the two methods above.
* The HSS iteration alternating shifted solves with alpha*I + H and
  alpha*I + S (exact inner solves via upfront factorizations).
* A Schur-complement driver for saddle systems [[A, B], [-B*, 0]] whose
  Hermitian part is singular only in the trailing block.

All solvers start from x_0 = 0 and stop when the relative 2-norm residual
of the *original* system drops below ``tol``; for the H-inner-product
methods this costs one extra multiplication with A per iteration, which is
acceptable at desk scale.  Residual histories are kept per iteration for
comparison plots.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from .bounds import rapoport_bound, widlund_bound
from .errors import DefinitenessError, SolverError
from .hs_core import Definiteness, HsSplitSystem

#: Lucky-breakdown threshold for the Lanczos subdiagonal, relative to ||b_hat||_H.
BREAKDOWN_REL = 1e-14

SOLVER_NAMES = ("widlund", "rapoport", "gmres", "lgmres", "hss")


# ---------------------------------------------------------------------------
# H-Lanczos engine
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LanczosState:
    """State of the H-orthonormal three-term recurrence.

    ``basis`` holds v_1 .. v_m (m = k or k+1 after k advances, depending on
    breakdown); ``t_diag`` the purely imaginary diagonal entries of T
    (numerically tiny real parts in real arithmetic), ``t_sub`` the real
    nonnegative subdiagonal entries t_{k+1,k}.
    """

    basis: tuple
    t_diag: tuple
    t_sub: tuple
    bhat_norm: float
    breakdown: bool = False
    breakdown_step: int | None = None
    reorthogonalize: bool = False

    @property
    def k(self):
        return len(self.basis)

    @property
    def v_curr(self):
        return self.basis[-1]

    @property
    def v_prev(self):
        return self.basis[-2] if len(self.basis) > 1 else None

    def basis_matrix(self, k=None):
        cols = self.basis if k is None else self.basis[:k]
        return np.column_stack(cols)

    def tridiagonal(self, k):
        """Dense T_{k,k} from the recurrence coefficients."""
        vals = self.t_diag[:k]
        dtype = np.result_type(*(np.asarray(v).dtype for v in vals)) if vals else float
        t = np.zeros((k, k), dtype=dtype)
        for i, v in enumerate(vals):
            t[i, i] = v
        for i in range(k - 1):
            t[i + 1, i] = self.t_sub[i]
            t[i, i + 1] = -np.conj(self.t_sub[i])
        return t


def lanczos_init(bhat, h_inner_fn, reorthogonalize=False) -> LanczosState:
    """Start the recurrence with v_1 = b_hat / ||b_hat||_H."""
    bhat = np.asarray(bhat)
    beta = float(np.sqrt(max(h_inner_fn(bhat, bhat).real, 0.0)))
    if beta == 0.0:
        raise SolverError("cannot start Lanczos from a zero right-hand side")
    return LanczosState(
        basis=(bhat / beta,),
        t_diag=(),
        t_sub=(),
        bhat_norm=beta,
        reorthogonalize=reorthogonalize,
    )


def lanczos_advance(state: LanczosState, apply_k, h_inner_fn) -> LanczosState:
    """Extend the recurrence by one step.

    Appends t_{k,k} and t_{k+1,k}; on lucky breakdown (subdiagonal at or
    below ``BREAKDOWN_REL * ||b_hat||_H``) the state is flagged and no new
    basis vector is added: the Krylov space is K-invariant and contains the
    solution of (I + K) x = b_hat.
    """
    if state.breakdown:
        raise SolverError("Lanczos recurrence already broke down")
    v = state.v_curr
    u = apply_k(v)
    t_kk = h_inner_fn(u, v)
    w = u - t_kk * v
    if state.v_prev is not None:
        w = w + state.t_sub[-1] * state.v_prev
    if state.reorthogonalize:
        for vi in state.basis:
            w = w - h_inner_fn(w, vi) * vi
    beta = float(np.sqrt(max(h_inner_fn(w, w).real, 0.0)))
    t_diag = state.t_diag + (t_kk,)
    t_sub = state.t_sub + (beta,)
    if beta <= BREAKDOWN_REL * state.bhat_norm:
        return replace(state, t_diag=t_diag, t_sub=t_sub,
                       breakdown=True, breakdown_step=len(t_diag))
    return replace(state, basis=state.basis + (w / beta,), t_diag=t_diag, t_sub=t_sub)


def _pd_operators(sys: HsSplitSystem):
    if sys.definiteness is not Definiteness.POSITIVE_DEFINITE:
        raise DefinitenessError("this method requires a positive definite Hermitian part")
    h = sys.h
    apply_k = lambda x: sys.solve_h(sys.s @ x)
    h_inner_fn = lambda x, y: np.vdot(y, h @ x)
    return apply_k, h_inner_fn


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@dataclass
class SolveReport:
    """Outcome of one iterative solve.

    Residual histories are absolute norms indexed by iteration, starting at
    k = 0 (the zero iterate).  ``error_h_norm`` is filled only when a
    reference solution was supplied.  ``breakdown`` is the step index of a
    lucky Lanczos/Arnoldi breakdown, or None.
    """

    solution: np.ndarray
    iterations: int
    converged: bool
    residual_2norm: np.ndarray
    residual_hinv_norm: np.ndarray | None = None
    residual_precond_norm: np.ndarray | None = None
    error_h_norm: np.ndarray | None = None
    breakdown: int | None = None
    wall_time: float = 0.0
    method: str = ""
    basis: np.ndarray | None = None
    rhs_norm: float = 0.0

    @property
    def final_relative_residual(self):
        if self.rhs_norm == 0.0:
            return 0.0
        return float(self.residual_2norm[-1] / self.rhs_norm)


def _zero_rhs_report(n, dtype, method):
    return SolveReport(
        solution=np.zeros(n, dtype=dtype),
        iterations=0,
        converged=True,
        residual_2norm=np.zeros(1),
        wall_time=0.0,
        method=method,
        rhs_norm=0.0,
    )


def _givens(a, b):
    """Unitary 2x2 rotation G with G [a, b]^T = [r, 0]^T; returns (c, s, r)."""
    if b == 0:
        return 1.0, 0.0 * b, a
    if a == 0:
        return 0.0, 1.0 + 0.0 * b, b
    absa = abs(a)
    alpha = a / absa
    norm = np.sqrt(absa * absa + abs(b) * abs(b))
    c = absa / norm
    s = alpha * np.conj(b) / norm
    return c, s, alpha * norm


# ---------------------------------------------------------------------------
# Widlund's method
# ---------------------------------------------------------------------------

def solve_widlund(sys: HsSplitSystem, b, tol=1e-12, maxit=250, x_exact=None,
                  collect_basis=False, reorthogonalize=False) -> SolveReport:
    """Oblique-projection method on (I + K) x = b_hat built on H-Lanczos.

    The k-th iterate is x_k = V_k y_k with (I_k + T_{k,k}) y_k =
    ||b_hat||_H e_1; the small system is skew-Hermitian plus identity and
    therefore always nonsingular.
    """
    start = time.perf_counter()
    apply_k, h_inner_fn = _pd_operators(sys)
    b = np.asarray(b)
    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        return _zero_rhs_report(sys.n, sys.a.dtype, "widlund")
    bhat = sys.solve_h(b)
    state = lanczos_init(bhat, h_inner_fn, reorthogonalize)
    beta = state.bhat_norm
    dtype = np.result_type(sys.a.dtype, b.dtype)

    res_hist = [bnorm]
    err_hist = None
    if x_exact is not None:
        x_exact = np.asarray(x_exact)
        err_hist = [_h_norm_of(sys, x_exact)]
    x = np.zeros(sys.n, dtype=dtype)
    converged = False
    k_done = 0
    for k in range(1, maxit + 1):
        state = lanczos_advance(state, apply_k, h_inner_fn)
        diag = 1.0 + np.asarray(state.t_diag[:k])
        sub = np.asarray(state.t_sub[:k - 1])
        ab = np.zeros((3, k), dtype=np.result_type(diag.dtype, dtype))
        ab[1, :] = diag
        if k > 1:
            ab[0, 1:] = -np.conj(sub)
            ab[2, :-1] = sub
        rhs = np.zeros(k, dtype=ab.dtype)
        rhs[0] = beta
        y = scipy.linalg.solve_banded((1, 1), ab, rhs)
        x = state.basis_matrix(k) @ y
        r = b - sys.a @ x
        rn = float(np.linalg.norm(r))
        res_hist.append(rn)
        if err_hist is not None:
            err_hist.append(_h_norm_of(sys, x_exact - x))
        k_done = k
        if rn <= tol * bnorm:
            converged = True
            break
        if state.breakdown:
            converged = rn <= tol * bnorm
            break
    return SolveReport(
        solution=x,
        iterations=k_done,
        converged=converged,
        residual_2norm=np.asarray(res_hist),
        error_h_norm=np.asarray(err_hist) if err_hist is not None else None,
        breakdown=state.breakdown_step,
        wall_time=time.perf_counter() - start,
        method="widlund",
        basis=state.basis_matrix(k_done) if collect_basis and k_done else None,
        rhs_norm=bnorm,
    )


def _h_norm_of(sys, v):
    return float(np.sqrt(max(np.vdot(v, sys.h @ v).real, 0.0)))


def _hinv_norm_of(sys, v):
    return float(np.sqrt(max(np.vdot(v, sys.solve_h(v)).real, 0.0)))


# ---------------------------------------------------------------------------
# Rapoport's method
# ---------------------------------------------------------------------------

def solve_rapoport(sys: HsSplitSystem, b, tol=1e-12, maxit=250, x_exact=None,
                   collect_basis=False, reorthogonalize=False) -> SolveReport:
    """Minimal residual method in the H^{-1} norm on the same Krylov spaces.

    Solves min_y || ||b_hat||_H e_1 - T~_{k+1,k} y ||_2 with the tridiagonal
    extended matrix T~ = [I + T_{k,k}; t_{k+1,k} e_k*], updated by plane
    rotations; the rotated right side provides the (monotone) optimal
    residual value for free, while the recorded history uses the exactly
    computed norms.
    """
    start = time.perf_counter()
    apply_k, h_inner_fn = _pd_operators(sys)
    b = np.asarray(b)
    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        return _zero_rhs_report(sys.n, sys.a.dtype, "rapoport")
    bhat = sys.solve_h(b)
    state = lanczos_init(bhat, h_inner_fn, reorthogonalize)
    beta = state.bhat_norm
    dtype = np.result_type(sys.a.dtype, b.dtype, np.asarray(beta).dtype)

    size = maxit + 2
    rd = np.zeros(size, dtype=complex)
    ru1 = np.zeros(size, dtype=complex)
    ru2 = np.zeros(size, dtype=complex)
    g = np.zeros(size, dtype=complex)
    g[0] = beta
    rotations = []

    res_hist = [bnorm]
    rhi_hist = [_hinv_norm_of(sys, b)]
    err_hist = None
    if x_exact is not None:
        x_exact = np.asarray(x_exact)
        err_hist = [_h_norm_of(sys, x_exact)]
    x = np.zeros(sys.n, dtype=dtype)
    converged = False
    k_done = 0
    for k in range(1, maxit + 1):
        state = lanczos_advance(state, apply_k, h_inner_fn)
        j = k - 1
        top = -np.conj(state.t_sub[j - 1]) if k >= 2 else 0.0
        mid = 1.0 + state.t_diag[j]
        bot = state.t_sub[j]
        fill = 0.0
        if k >= 3:
            c, s = rotations[j - 2]
            fill, top = c * fill + s * top, -np.conj(s) * fill + c * top
        if k >= 2:
            c, s = rotations[j - 1]
            top, mid = c * top + s * mid, -np.conj(s) * top + c * mid
        c, s, rr = _givens(mid, bot)
        rotations.append((c, s))
        if k >= 3:
            ru2[j - 2] = fill
        if k >= 2:
            ru1[j - 1] = top
        rd[j] = rr
        g[j], g[j + 1] = c * g[j] + s * g[j + 1], -np.conj(s) * g[j] + c * g[j + 1]

        y = np.zeros(k, dtype=complex)
        for i in range(k - 1, -1, -1):
            acc = g[i]
            if i + 1 < k:
                acc = acc - ru1[i] * y[i + 1]
            if i + 2 < k:
                acc = acc - ru2[i] * y[i + 2]
            y[i] = acc / rd[i]
        if np.isrealobj(sys.a) and np.isrealobj(b):
            y = y.real
        x = state.basis_matrix(k) @ y
        r = b - sys.a @ x
        rn = float(np.linalg.norm(r))
        res_hist.append(rn)
        rhi_hist.append(_hinv_norm_of(sys, r))
        if err_hist is not None:
            err_hist.append(_h_norm_of(sys, x_exact - x))
        k_done = k
        if rn <= tol * bnorm:
            converged = True
            break
        if state.breakdown:
            converged = rn <= tol * bnorm
            break
    return SolveReport(
        solution=x,
        iterations=k_done,
        converged=converged,
        residual_2norm=np.asarray(res_hist),
        residual_hinv_norm=np.asarray(rhi_hist),
        error_h_norm=np.asarray(err_hist) if err_hist is not None else None,
        breakdown=state.breakdown_step,
        wall_time=time.perf_counter() - start,
        method="rapoport",
        basis=state.basis_matrix(k_done) if collect_basis and k_done else None,
        rhs_norm=bnorm,
    )


# ---------------------------------------------------------------------------
# GMRES (modified Gram-Schmidt, no restarts), plain or left-preconditioned
# ---------------------------------------------------------------------------

def solve_gmres(a, b, tol=1e-12, maxit=250, precond=None, x_exact=None,
                collect_basis=False, h_for_metrics=None) -> SolveReport:
    """GMRES with MGS Arnoldi; optional left preconditioning by an HPD solve.

    Without ``precond`` the iterates minimize ||b - A z||_2 over K_k(A, b).
    With ``precond`` (a callable applying H^{-1}) they minimize the
    preconditioned residual ||b_hat - H^{-1} A z||_2 over K_k(H^{-1}A,
    b_hat), the same search spaces as the Widlund/Rapoport methods.
    Stopping still tests the original-system relative residual.
    """
    start = time.perf_counter()
    if callable(a):
        apply_a = a
        n = np.asarray(b).shape[0]
        a_dtype = np.asarray(b).dtype
    else:
        a = np.asarray(a)
        apply_a = lambda z: a @ z
        n = a.shape[0]
        a_dtype = a.dtype
    b = np.asarray(b)
    bnorm = float(np.linalg.norm(b))
    method = "lgmres" if precond is not None else "gmres"
    if bnorm == 0.0:
        return _zero_rhs_report(n, a_dtype, method)
    if precond is None:
        apply_op = apply_a
        r0 = b
    else:
        apply_op = lambda z: precond(apply_a(z))
        r0 = precond(b)
    beta = float(np.linalg.norm(r0))
    is_real = not (np.iscomplexobj(b) or np.iscomplexobj(np.asarray(r0))
                   or (not callable(a) and np.iscomplexobj(a)))
    dtype = np.result_type(a_dtype, b.dtype)

    v = [np.asarray(r0) / beta]
    hess = np.zeros((maxit + 1, maxit), dtype=complex)
    g = np.zeros(maxit + 1, dtype=complex)
    g[0] = beta
    rotations = []

    res_hist = [bnorm]
    pre_hist = [beta]
    err_hist = None
    if x_exact is not None and h_for_metrics is not None:
        x_exact = np.asarray(x_exact)
        err_hist = [float(np.sqrt(max(np.vdot(x_exact, h_for_metrics @ x_exact).real, 0.0)))]
    x = np.zeros(n, dtype=dtype)
    converged = False
    breakdown_step = None
    k_done = 0
    for k in range(1, maxit + 1):
        w = apply_op(v[k - 1])
        if k == 1 and np.iscomplexobj(w):
            is_real = False
        for i in range(k):
            hess[i, k - 1] = np.vdot(v[i], w)
            w = w - hess[i, k - 1] * v[i]
        hnorm = float(np.linalg.norm(w))
        hess[k, k - 1] = hnorm
        happy = hnorm <= 1e-14 * beta
        if not happy:
            v.append(w / hnorm)
        # rotate the new column and update the rotated right side
        col = hess[:k + 1, k - 1].copy()
        for i, (c, s) in enumerate(rotations):
            col[i], col[i + 1] = c * col[i] + s * col[i + 1], \
                -np.conj(s) * col[i] + c * col[i + 1]
        c, s, rr = _givens(col[k - 1], col[k])
        rotations.append((c, s))
        col[k - 1], col[k] = rr, 0.0
        hess[:k + 1, k - 1] = col
        g[k - 1], g[k] = c * g[k - 1] + s * g[k], -np.conj(s) * g[k - 1] + c * g[k]

        y = scipy.linalg.solve_triangular(hess[:k, :k], g[:k], lower=False)
        if is_real:
            y = y.real
        x = np.column_stack(v[:k]) @ y
        r = b - apply_a(x)
        rn = float(np.linalg.norm(r))
        res_hist.append(rn)
        pre_hist.append(abs(g[k]))
        if err_hist is not None:
            d = x_exact - x
            err_hist.append(float(np.sqrt(max(np.vdot(d, h_for_metrics @ d).real, 0.0))))
        k_done = k
        if rn <= tol * bnorm:
            converged = True
            break
        if happy:
            breakdown_step = k
            converged = rn <= tol * bnorm
            break
    return SolveReport(
        solution=x,
        iterations=k_done,
        converged=converged,
        residual_2norm=np.asarray(res_hist),
        residual_precond_norm=np.asarray(pre_hist),
        error_h_norm=np.asarray(err_hist) if err_hist is not None else None,
        breakdown=breakdown_step,
        wall_time=time.perf_counter() - start,
        method=method,
        basis=np.column_stack(v[:k_done]) if collect_basis and k_done else None,
        rhs_norm=bnorm,
    )


# ---------------------------------------------------------------------------
# HSS iteration
# ---------------------------------------------------------------------------

def solve_hss(sys: HsSplitSystem, b, alpha=1.0, tol=1e-12, maxit=250) -> SolveReport:
    """Alternating shifted Hermitian/skew-Hermitian solves.

    (alpha I + H) x^{k+1/2} = (alpha I - S) x^k + b
    (alpha I + S) x^{k+1}   = (alpha I - H) x^{k+1/2} + b

    With exact inner solves (upfront factorizations, reused every sweep)
    the iteration converges for every alpha > 0 when H is positive
    definite.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    start = time.perf_counter()
    b = np.asarray(b)
    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        return _zero_rhs_report(sys.n, sys.a.dtype, "hss")
    n = sys.n
    eye = np.eye(n, dtype=sys.a.dtype)
    shifted_h = alpha * eye + sys.h
    shifted_s = alpha * eye + sys.s
    try:
        ch = scipy.linalg.cho_factor(shifted_h, lower=True)
        solve_h = lambda rhs: scipy.linalg.cho_solve(ch, rhs)
    except scipy.linalg.LinAlgError:
        luh = scipy.linalg.lu_factor(shifted_h)
        solve_h = lambda rhs: scipy.linalg.lu_solve(luh, rhs)
    lus = scipy.linalg.lu_factor(shifted_s)

    x = np.zeros(n, dtype=np.result_type(sys.a.dtype, b.dtype))
    res_hist = [bnorm]
    converged = False
    k_done = 0
    for k in range(1, maxit + 1):
        x_half = solve_h(alpha * x - sys.s @ x + b)
        x = scipy.linalg.lu_solve(lus, alpha * x_half - sys.h @ x_half + b)
        rn = float(np.linalg.norm(b - sys.a @ x))
        res_hist.append(rn)
        k_done = k
        if rn <= tol * bnorm:
            converged = True
            break
    return SolveReport(
        solution=x,
        iterations=k_done,
        converged=converged,
        residual_2norm=np.asarray(res_hist),
        wall_time=time.perf_counter() - start,
        method="hss",
        rhs_norm=bnorm,
    )


# ---------------------------------------------------------------------------
# Schur-complement path for saddle systems
# ---------------------------------------------------------------------------

@dataclass
class SchurSolveReport:
    """Combined outcome of the Schur-complement solve of a saddle system."""

    v: np.ndarray
    p: np.ndarray
    relative_residual: float
    converged: bool
    inner_iterations: int
    outer_iterations: int
    refinements: int
    wall_time: float = 0.0
    schur_matrix: np.ndarray | None = None


def solve_via_schur(a11, b_block, f, g, inner_solver="rapoport", tol=1e-10,
                    maxit=250, inner_tol=None, keep_schur=False) -> SchurSolveReport:
    """Solve [[A, B], [-B*, 0]] [v; p] = [f; g] via the Schur complement.

    The reduced system S1 p = g + B* A^{-1} f with S1 = B* A^{-1} B is
    solved with the selected iterative method; every application of S1 is
    matrix-free through nested inner solves with A.  (For the H-inner-
    product outer methods S1 is materialized column by column through the
    same nested solves, since they need factorizations of its Hermitian
    part.)  A is required to have positive definite Hermitian part and B
    full column rank, which makes S1 positive definite as well.  One
    residual-based refinement pass is applied if needed.
    """
    start = time.perf_counter()
    a11 = np.asarray(a11)
    b_block = np.atleast_2d(np.asarray(b_block))
    f = np.asarray(f)
    g = np.asarray(g)
    n_v, n_p = b_block.shape
    if inner_tol is None:
        inner_tol = max(tol * 1e-3, 1e-15)
    inner_sys = HsSplitSystem.from_matrix(a11)
    inner_count = 0
    outer_count = 0

    def inner_solve(rhs):
        nonlocal inner_count
        rep = solve(inner_solver, inner_sys, rhs, tol=inner_tol, maxit=maxit)
        inner_count += rep.iterations
        if not rep.converged:
            raise SolverError(
                f"inner {inner_solver} solve with A failed to reach {inner_tol}"
            )
        return rep.solution

    if n_p == 0:
        v = inner_solve(f)
        resid = np.linalg.norm(a11 @ v - f)
        rel = resid / np.linalg.norm(f) if np.linalg.norm(f) > 0 else 0.0
        return SchurSolveReport(
            v=v, p=np.zeros(0), relative_residual=float(rel),
            converged=rel <= tol, inner_iterations=inner_count,
            outer_iterations=0, refinements=0,
            wall_time=time.perf_counter() - start,
        )

    needs_matrix = inner_solver in ("widlund", "rapoport", "lgmres", "hss")
    s1 = None
    if needs_matrix:
        cols = [inner_solve(b_block[:, i]) for i in range(n_p)]
        s1 = b_block.conj().T @ np.column_stack(cols)
        outer_sys = HsSplitSystem.from_matrix(s1)

    def apply_s1(z):
        return b_block.conj().T @ inner_solve(b_block @ z)

    def outer_solve(rhs):
        nonlocal outer_count
        if needs_matrix:
            rep = solve(inner_solver, outer_sys, rhs, tol=max(tol * 1e-2, 1e-15),
                        maxit=maxit)
        else:
            rep = solve_gmres(apply_s1, rhs, tol=max(tol * 1e-2, 1e-15), maxit=maxit)
        outer_count += rep.iterations
        if not rep.converged:
            raise SolverError(f"outer {inner_solver} solve with S1 failed")
        return rep.solution

    fnorm = float(np.sqrt(np.linalg.norm(f) ** 2 + np.linalg.norm(g) ** 2))
    v = np.zeros(n_v, dtype=np.result_type(a11.dtype, f.dtype))
    p = np.zeros(n_p, dtype=v.dtype)
    refinements = 0
    rel = np.inf
    for sweep in range(3):
        rf = f - (a11 @ v + b_block @ p)
        rg = g - (-(b_block.conj().T @ v))
        w = inner_solve(rf)
        dp = outer_solve(rg + b_block.conj().T @ w)
        dv = inner_solve(rf - b_block @ dp)
        v = v + dv
        p = p + dp
        r1 = f - (a11 @ v + b_block @ p)
        r2 = g + b_block.conj().T @ v
        rel = float(np.sqrt(np.linalg.norm(r1) ** 2 + np.linalg.norm(r2) ** 2)
                    / (fnorm if fnorm > 0 else 1.0))
        if sweep > 0:
            refinements += 1
        if rel <= tol:
            break
    return SchurSolveReport(
        v=v, p=p, relative_residual=rel, converged=rel <= tol,
        inner_iterations=inner_count, outer_iterations=outer_count,
        refinements=refinements, wall_time=time.perf_counter() - start,
        schur_matrix=s1 if keep_schur else None,
    )


# ---------------------------------------------------------------------------
# Dispatch and CSV export
# ---------------------------------------------------------------------------

def solve(method: str, sys: HsSplitSystem, b, tol=1e-12, maxit=250, **kwargs) -> SolveReport:
    """Dispatch to one of the named solvers on an HsSplitSystem."""
    if method == "widlund":
        return solve_widlund(sys, b, tol=tol, maxit=maxit, **kwargs)
    if method == "rapoport":
        return solve_rapoport(sys, b, tol=tol, maxit=maxit, **kwargs)
    if method == "gmres":
        return solve_gmres(sys.a, b, tol=tol, maxit=maxit, **kwargs)
    if method == "lgmres":
        if sys.h_factor is None:
            raise DefinitenessError("lgmres requires a positive definite Hermitian part")
        return solve_gmres(sys.a, b, tol=tol, maxit=maxit, precond=sys.solve_h,
                           h_for_metrics=sys.h, **kwargs)
    if method == "hss":
        return solve_hss(sys, b, tol=tol, maxit=maxit, **kwargs)
    raise ValueError(f"unknown solver {method!r}; known: {SOLVER_NAMES}")


def residual_history_csv(path, report: SolveReport, lam=None):
    """Write the per-iteration history in the comparison CSV schema.

    Columns: k,res_2norm,res_hinv_norm,err_hnorm,bound_widlund,bound_rapoport
    (absolute residual norms; bounds are the relative closed forms evaluated
    at ``lam`` when given; missing metrics stay empty).
    """
    n_rows = len(report.residual_2norm)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "res_2norm", "res_hinv_norm", "err_hnorm",
                         "bound_widlund", "bound_rapoport"])
        for k in range(n_rows):
            row = [str(k), repr(float(report.residual_2norm[k]))]
            if report.residual_hinv_norm is not None and k < len(report.residual_hinv_norm):
                row.append(repr(float(report.residual_hinv_norm[k])))
            else:
                row.append("")
            if report.error_h_norm is not None and k < len(report.error_h_norm):
                row.append(repr(float(report.error_h_norm[k])))
            else:
                row.append("")
            if lam is not None and k >= 2 and k % 2 == 0:
                row.append(repr(widlund_bound(lam, k // 2)))
            else:
                row.append("")
            if lam is not None:
                row.append(repr(rapoport_bound(lam, k)))
            else:
                row.append("")
            writer.writerow(row)
