"""Dissipative-Hamiltonian DAE models E x' = (J - R) x + f(t).

The flow matrix E and the dissipation matrix R are Hermitian positive
semidefinite, the structure matrix J is skew-Hermitian.  This module
provides constructors for four model families (damped mechanical systems,
an RLC circuit, Stokes-type flow with or without pressure stabilization,
and poroelasticity in the dynamic or quasi-stationary regime), plus a
rank-based classifier of the differentiation index of the pencil
lambda*E - (J - R).

The classifier works directly from the two nullspace splits that determine
the index for this matrix class: an orthonormal split of ker(E), and, if the
restriction of J - R to ker(E) is singular, a further split of its kernel.
The index is then read off the coupling block between that kernel and the
range of E.  (Because J - R has negative semidefinite Hermitian part, its
kernels are two-sided, which makes the rank decisions well posed.)
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ModelError
from .hs_core import (
    DEFAULT_TOL,
    Definiteness,
    as_square_matrix,
    definiteness_class,
    require_hermitian,
    require_skew,
)

#: Default rank-decision tolerance for index classification (relative to
#: the largest singular value entering each decision).
RANK_TOL = 1e-10


class ZeroSource:
    """The constant-zero source term; the default forcing of every model."""

    def __init__(self, n):
        self.n = n
        self._z = np.zeros(n)
        self._z.setflags(write=False)

    def __call__(self, t):
        return self._z

    def __repr__(self):
        return f"ZeroSource(n={self.n})"


class DaeIndex(enum.Enum):
    ZERO = 0
    ONE = 1
    TWO = 2


def _freeze(a):
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DhDaeSystem:
    """The triple (E, J, R) plus the source f(t).

    ``blocks`` optionally names contiguous variable blocks, e.g.
    ``(("v", n_v), ("p", n_p))`` for saddle-structured models; solvers use
    it to locate the singular part without re-deriving it.
    ``f`` must be a pure function of t so systems can be shared across
    threads.
    """

    e: np.ndarray
    j: np.ndarray
    r: np.ndarray
    f: object
    blocks: tuple | None = None
    tol: float = DEFAULT_TOL

    @property
    def n(self):
        return self.e.shape[0]

    @classmethod
    def from_parts(cls, e, j, r, f=None, blocks=None, tol=DEFAULT_TOL):
        e = require_hermitian(as_square_matrix(e, "e"), tol, name="e")
        j = require_skew(as_square_matrix(j, "j"), tol, name="j")
        r = require_hermitian(as_square_matrix(r, "r"), tol, name="r")
        if not (e.shape == j.shape == r.shape):
            raise DimensionError("e, j, r must have equal shapes")
        if definiteness_class(e, tol) is Definiteness.INDEFINITE:
            raise ModelError("flow matrix e must be positive semidefinite")
        if definiteness_class(r, tol) is Definiteness.INDEFINITE:
            raise ModelError("dissipation matrix r must be positive semidefinite")
        if f is None:
            f = ZeroSource(e.shape[0])
        if blocks is not None:
            blocks = tuple((str(name), int(size)) for name, size in blocks)
            if sum(size for _, size in blocks) != e.shape[0]:
                raise DimensionError("block sizes must sum to the system order")
        return cls(e=_freeze(e), j=_freeze(j), r=_freeze(r), f=f, blocks=blocks, tol=tol)

    def operator(self):
        """The right-hand-side matrix J - R."""
        return self.j - self.r

    def hamiltonian(self, x):
        """Energy 1/2 x* E x (real, nonnegative for PSD E)."""
        x = np.asarray(x)
        return 0.5 * float(np.vdot(x, self.e @ x).real)

    def block_slices(self):
        if self.blocks is None:
            return None
        out, off = {}, 0
        for name, size in self.blocks:
            out[name] = slice(off, off + size)
            off += size
        return out


# ---------------------------------------------------------------------------
# Model generators
# ---------------------------------------------------------------------------

def _check_hpd(a, name, tol=DEFAULT_TOL):
    a = require_hermitian(as_square_matrix(a, name), tol, name=name)
    if definiteness_class(a, tol) is not Definiteness.POSITIVE_DEFINITE:
        raise ModelError(f"{name} must be Hermitian positive definite")
    return a


def _check_psd(a, name, tol=DEFAULT_TOL):
    a = require_hermitian(as_square_matrix(a, name), tol, name=name)
    if definiteness_class(a, tol) is Definiteness.INDEFINITE:
        raise ModelError(f"{name} must be Hermitian positive semidefinite")
    return a


def assemble_mechanical(m, d, k, force=None):
    """Damped second-order system M q'' + D q' + K q = force(t).

    First-order form in (velocity, position):
    E = blkdiag(M, K), J = [[0, -K], [K, 0]], R = blkdiag(D, 0);
    index zero since E is positive definite.
    """
    m = _check_hpd(m, "m")
    k = _check_hpd(k, "k")
    d = _check_psd(d, "d")
    if not (m.shape == d.shape == k.shape):
        raise ModelError("m, d, k must have equal shapes")
    n = m.shape[0]
    z = np.zeros_like(m)
    e = np.block([[m, z], [z, k]])
    j = np.block([[z, -k], [k, z]])
    r = np.block([[d, z], [z, z]])
    f = None
    if force is not None:
        f = lambda t: np.concatenate([np.asarray(force(t)), np.zeros(n)])
    return DhDaeSystem.from_parts(e, j, r, f=f, blocks=(("velocity", n), ("position", n)))


def assemble_rlc(L, C1, C2, RG, RL, RR, eg=0.0):
    """Series RLC loop with two capacitors to ground and a driven source.

    State ordering (I, V1, V2, I_G, I_R); the controlled voltage E_G(t)
    enters the fourth equation 0 = -R_G I_G + V1 + E_G.  Index one: the
    nullspace of E = diag(L, C1, C2, 0, 0) meets J22 - R22 = -diag(R_G, R_R),
    which is nonsingular.
    """
    params = dict(L=L, C1=C1, C2=C2, RG=RG, RL=RL, RR=RR)
    for name, val in params.items():
        if not val > 0:
            raise ModelError(f"RLC parameter {name} must be positive, got {val}")
    e = np.diag([L, C1, C2, 0.0, 0.0])
    j = np.array(
        [
            [0.0, -1.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, -1.0, 0.0],
            [-1.0, 0.0, 0.0, 0.0, -1.0],
            [0.0, 1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0, 0.0],
        ]
    )
    r = np.diag([RL, 0.0, 0.0, RG, RR])
    if callable(eg):
        f = lambda t: np.array([0.0, 0.0, 0.0, float(eg(t)), 0.0])
    elif eg == 0.0:
        f = None
    else:
        f = lambda t: np.array([0.0, 0.0, 0.0, float(eg), 0.0])
    blocks = (("dynamic", 3), ("algebraic", 2))
    return DhDaeSystem.from_parts(e, j, r, f=f, blocks=blocks)


def rlc_dc_operating_point(L, C1, C2, RG, RL, RR, eg):
    """Closed-form DC steady state of the RLC model (loop-current analysis).

    At DC the capacitors block the loop current except through the single
    resistive path R_G -> R_L -> R_R, so I = E_G / (R_G + R_L + R_R);
    the remaining quantities follow from the branch relations.
    """
    i = eg / (RG + RL + RR)
    v1 = RG * i - eg
    v2 = -RR * i
    return np.array([i, v1, v2, i, -i])


def _grid_index(nx, ny):
    """id(i, j) -> flat index for an nx-by-ny node grid (column-major in j)."""
    return lambda i, j: i * ny + j


def _grid_laplacian(nx, ny):
    """Unscaled 5-point grid Laplacian 4I - Adj with Dirichlet boundary."""
    n = nx * ny
    idx = _grid_index(nx, ny)
    lap = 4.0 * np.eye(n)
    for i in range(nx):
        for j in range(ny):
            a = idx(i, j)
            if i + 1 < nx:
                b = idx(i + 1, j)
                lap[a, b] = lap[b, a] = -1.0
            if j + 1 < ny:
                b = idx(i, j + 1)
                lap[a, b] = lap[b, a] = -1.0
    return lap


def _grid_centered_transport(nx, ny, amp):
    """Skew centered-difference transport along the (1, 1) wind direction."""
    n = nx * ny
    idx = _grid_index(nx, ny)
    t = np.zeros((n, n))
    for i in range(nx):
        for j in range(ny):
            a = idx(i, j)
            if i + 1 < nx:
                b = idx(i + 1, j)
                t[a, b] += amp
                t[b, a] -= amp
            if j + 1 < ny:
                b = idx(i, j + 1)
                t[a, b] += amp
                t[b, a] -= amp
    return t


def assemble_stokes_like(grid_n, viscosity=1.0, convection=0.0, stabilization=0.0,
                         forcing=None):
    """Unsteady Stokes / linearized Navier-Stokes on a staggered unit-square grid.

    Velocities live on interior edges of a ``grid_n x grid_n`` MAC grid,
    pressures on cells (one cell dropped so that the discrete divergence has
    full row rank).  Block form in (v, p):
    E = blkdiag(M, 0), J = [[A_S, B], [-B*, 0]],
    R = blkdiag(viscosity * Laplacian, stabilization * I).
    Index one when stabilization > 0, two when stabilization = 0.

    Only the block structure (definiteness, full row rank of B*, the index)
    is contractual; the concrete finite-difference stencils are not.
    """
    n_cells = int(grid_n)
    if n_cells < 2:
        raise ModelError("grid_n must be at least 2")
    if not viscosity > 0:
        raise ModelError("viscosity must be positive")
    if stabilization < 0:
        raise ModelError("stabilization must be nonnegative")
    h = 1.0 / n_cells
    nu_x, nu_y = n_cells - 1, n_cells        # u on interior vertical edges
    nv_x, nv_y = n_cells, n_cells - 1        # v on interior horizontal edges
    n_u = nu_x * nu_y
    n_vv = nv_x * nv_y
    n_vel = n_u + n_vv
    n_p = n_cells * n_cells - 1              # constant pressure mode removed

    u_idx = _grid_index(nu_x, nu_y)
    v_idx = _grid_index(nv_x, nv_y)
    div = np.zeros((n_cells * n_cells, n_vel))
    for cx in range(n_cells):
        for cy in range(n_cells):
            row = cx * n_cells + cy
            if cx < n_cells - 1:
                div[row, u_idx(cx, cy)] += h          # east u-edge
            if cx > 0:
                div[row, u_idx(cx - 1, cy)] -= h      # west u-edge
            if cy < n_cells - 1:
                div[row, n_u + v_idx(cx, cy)] += h    # north v-edge
            if cy > 0:
                div[row, n_u + v_idx(cx, cy - 1)] -= h
    b_star = div[:-1, :]
    b = b_star.T.copy()

    lap = np.zeros((n_vel, n_vel))
    lap[:n_u, :n_u] = _grid_laplacian(nu_x, nu_y)
    lap[n_u:, n_u:] = _grid_laplacian(nv_x, nv_y)

    a_skew = np.zeros((n_vel, n_vel))
    if convection != 0.0:
        amp = 0.5 * convection * h
        a_skew[:n_u, :n_u] = _grid_centered_transport(nu_x, nu_y, amp)
        a_skew[n_u:, n_u:] = _grid_centered_transport(nv_x, nv_y, amp)

    mass = (h * h) * np.eye(n_vel)
    e = np.zeros((n_vel + n_p, n_vel + n_p))
    e[:n_vel, :n_vel] = mass
    j = np.zeros_like(e)
    j[:n_vel, :n_vel] = a_skew
    j[:n_vel, n_vel:] = b
    j[n_vel:, :n_vel] = -b_star
    r = np.zeros_like(e)
    r[:n_vel, :n_vel] = viscosity * lap
    r[n_vel:, n_vel:] = stabilization * np.eye(n_p)
    f = None
    if forcing is not None:
        f = lambda t: np.concatenate([np.asarray(forcing(t)), np.zeros(n_p)])
    return DhDaeSystem.from_parts(e, j, r, f=f, blocks=(("v", n_vel), ("p", n_p)))


def assemble_poroelastic(a, m, y=None, k=None, d=None, quasi_stationary=False,
                         forcing=None):
    """Poroelastic deformation/pressure model, dynamic or quasi-stationary.

    Dynamic regime (variables w, u, p): E = blkdiag(Y, A, M) is positive
    definite and the index is zero.  Quasi-stationary regime (Y dropped,
    variables p, u, w): E = blkdiag(M, A, 0), and the index is two because
    [D*  -A] has full row rank whenever A is nonsingular.
    """
    a = _check_hpd(a, "a")
    m = _check_hpd(m, "m")
    n = a.shape[0]
    p = m.shape[0]
    if k is None:
        k = np.zeros((p, p))
    k = _check_psd(k, "k")
    if k.shape[0] != p:
        raise ModelError("k must match the pressure block size")
    if d is None:
        d = np.zeros((p, n))
    d = np.asarray(d)
    if d.shape != (p, n):
        raise ModelError(f"d must have shape ({p}, {n}), got {d.shape}")
    znn = np.zeros((n, n))
    znp = np.zeros((n, p))
    zpn = np.zeros((p, n))
    zpp = np.zeros((p, p))
    if quasi_stationary:
        e = np.block([[m, zpn, zpn], [znp, a, znn], [znp, znn, znn]])
        j = np.block([[zpp, zpn, -d], [znp, znn, a], [d.conj().T, -a, znn]])
        r = np.block([[k, zpn, zpn], [znp, znn, znn], [znp, znn, znn]])
        blocks = (("p", p), ("u", n), ("w", n))
        return DhDaeSystem.from_parts(e, j, r, f=forcing, blocks=blocks)
    if y is None:
        raise ModelError("dynamic regime requires the (small-norm) matrix y")
    y = _check_hpd(y, "y")
    if y.shape[0] != n:
        raise ModelError("y must match the displacement block size")
    e = np.block([[y, znn, znp], [znn, a, znp], [zpn, zpn, m]])
    j = np.block([[znn, -a, d.conj().T], [a, znn, znp], [-d, zpn, zpp]])
    r = np.block([[znn, znn, znp], [znn, znn, znp], [zpn, zpn, k]])
    blocks = (("w", n), ("u", n), ("p", p))
    return DhDaeSystem.from_parts(e, j, r, f=forcing, blocks=blocks)


# ---------------------------------------------------------------------------
# Index classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IndexReport:
    """Differentiation index of the pencil lambda*E - (J - R).

    ``block_sizes`` is the tuple (n1, ..., n5) from the simplified
    classifier; regular systems have n5 = 0.  ``index`` is None when the
    pencil is singular.  ``diagnostics`` records the singular values behind
    every rank decision.
    """

    index: DaeIndex | None
    regular: bool
    block_sizes: tuple
    nullspace_basis_of_e: np.ndarray
    diagnostics: dict = field(default_factory=dict, repr=False)


def nullspace_of_e(sys_or_e, tol=RANK_TOL):
    """Orthonormal basis of ker(E) for a PSD flow matrix (n x nullity)."""
    e = sys_or_e.e if isinstance(sys_or_e, DhDaeSystem) else np.asarray(sys_or_e)
    eigs, vecs = np.linalg.eigh(e)
    scale = float(np.max(np.abs(eigs))) if eigs.size else 0.0
    if scale == 0.0:
        return np.eye(e.shape[0], dtype=vecs.dtype)
    null_mask = eigs <= tol * scale
    return vecs[:, null_mask]


def _range_of_e(e, tol):
    eigs, vecs = np.linalg.eigh(e)
    scale = float(np.max(np.abs(eigs))) if eigs.size else 0.0
    if scale == 0.0:
        return vecs[:, :0], vecs
    mask = eigs > tol * scale
    return vecs[:, mask], vecs[:, ~mask]


def _regularity_shifts(e, jr, tol):
    """det(lambda0 E - (J-R)) != 0 at three deterministic pseudo-random shifts."""
    rng = np.random.default_rng(0x5EED)
    norm_e = np.linalg.norm(e, 2) if e.size else 0.0
    norm_jr = np.linalg.norm(jr, 2) if jr.size else 0.0
    base = norm_jr / norm_e if norm_e > 0 else 1.0
    results = []
    for _ in range(3):
        lam0 = base * rng.uniform(0.3, 3.0) * rng.choice([-1.0, 1.0])
        pencil = lam0 * e - jr
        svals = np.linalg.svd(pencil, compute_uv=False)
        smax = float(svals[0]) if svals.size else 0.0
        smin = float(svals[-1]) if svals.size else 0.0
        results.append(smax > 0 and smin > tol * smax)
    return results


def index_classify(sys: DhDaeSystem, tol=RANK_TOL) -> IndexReport:
    """Classify the differentiation index (0, 1 or 2) of a dHDAE pencil.

    Procedure: if E is positive definite the index is zero.  Otherwise split
    off ker(E); if the restriction A22 of J - R to ker(E) is nonsingular the
    index is one.  Otherwise split off ker(A22) and inspect its coupling to
    range(E): full row rank gives index two (with n1 = n4 = the kernel
    dimension), a rank deficiency leaves genuinely free variables (n5 > 0)
    and the pencil is singular.  Rank decisions use singular values with
    relative threshold ``tol``; regularity is cross-checked at three
    deterministic pseudo-random real shifts.
    """
    n = sys.n
    jr = sys.operator()
    diag = {}
    v_range, v_null = _range_of_e(sys.e, tol)
    rank_e = v_range.shape[1]
    shift_checks = _regularity_shifts(sys.e, jr, tol)
    diag["rank_e"] = rank_e
    diag["shift_regularity_checks"] = shift_checks
    cross_regular = any(shift_checks)

    if rank_e == n:
        return IndexReport(
            index=DaeIndex.ZERO,
            regular=cross_regular,
            block_sizes=(0, n, 0, 0, 0),
            nullspace_basis_of_e=_freeze(v_null),
            diagnostics=diag,
        )

    global_scale = float(np.linalg.norm(jr, 2)) if jr.size else 0.0
    a22 = v_null.conj().T @ jr @ v_null
    a21 = v_null.conj().T @ jr @ v_range
    n_null = n - rank_e
    _, s22, vh22 = np.linalg.svd(a22) if a22.size else (np.eye(0), np.zeros(0), np.eye(0))
    smax22 = float(s22[0]) if s22.size else 0.0
    smin22 = float(s22[-1]) if s22.size else 0.0
    diag["j22_r22_singular_values"] = s22
    diag["j22_r22_sigma_min"] = smin22

    nonneg22 = smax22 > tol * global_scale
    if nonneg22 and smin22 > tol * smax22:
        # Case 2: J22 - R22 nonsingular
        regular = cross_regular
        return IndexReport(
            index=DaeIndex.ONE,
            regular=regular,
            block_sizes=(0, rank_e, n_null, 0, 0),
            nullspace_basis_of_e=_freeze(v_null),
            diagnostics=diag,
        )

    # Split off ker(A22); the kernel is two-sided for dissipative blocks.
    if not nonneg22:
        kernel_dim = n_null
        w = np.eye(n_null, dtype=a22.dtype if a22.size else float)
    else:
        kernel_mask = s22 <= tol * smax22
        kernel_dim = int(np.sum(kernel_mask))
        w = vh22.conj().T[:, kernel_mask]
    n3 = n_null - kernel_dim
    coupling = w.conj().T @ a21
    sc = np.linalg.svd(coupling, compute_uv=False) if coupling.size else np.zeros(0)
    smax_c = float(sc[0]) if sc.size else 0.0
    diag["coupling_singular_values"] = sc
    if smax_c <= tol * global_scale:
        rank_c = 0
    else:
        rank_c = int(np.sum(sc > tol * smax_c))
    full_row_rank = rank_c == kernel_dim and kernel_dim <= rank_e
    n1 = n4 = rank_c
    n5 = kernel_dim - rank_c
    block_sizes = (n1, rank_e - n1, n3, n4, n5)

    if full_row_rank and kernel_dim > 0:
        return IndexReport(
            index=DaeIndex.TWO,
            regular=cross_regular,
            block_sizes=block_sizes,
            nullspace_basis_of_e=_freeze(v_null),
            diagnostics=diag,
        )
    return IndexReport(
        index=None,
        regular=False,
        block_sizes=block_sizes,
        nullspace_basis_of_e=_freeze(v_null),
        diagnostics=diag,
    )


# ---------------------------------------------------------------------------
# JSON model descriptors (used by the CLI and the bench harness)
# ---------------------------------------------------------------------------

def _random_spd(rng, n, cond=10.0):
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    eigs = np.geomspace(1.0, cond, n)
    return (q * eigs) @ q.T


def _build_mechanical(params):
    n = int(params.get("n", 20))
    seed = int(params.get("seed", 0))
    damping = float(params.get("damping", 1.0))
    cond = float(params.get("cond", 10.0))
    rng = np.random.default_rng(seed)
    m = _random_spd(rng, n, cond)
    k = _random_spd(rng, n, cond)
    if damping == 0.0:
        d = np.zeros((n, n))
    else:
        g = rng.standard_normal((n, n))
        d = damping * (g @ g.T) / n
    return assemble_mechanical(m, d, k)


def _build_rlc(params):
    eg_spec = params.get("eg", 0.0)
    if isinstance(eg_spec, dict):
        kind = eg_spec.get("kind", "constant")
        amp = float(eg_spec.get("amplitude", 1.0))
        if kind == "constant":
            eg = amp
        elif kind == "sin":
            omega = float(eg_spec.get("omega", 1.0))
            eg = lambda t: amp * np.sin(omega * t)
        elif kind == "zero":
            eg = 0.0
        else:
            raise ModelError(f"unknown eg kind {kind!r}")
    else:
        eg = float(eg_spec)
    return assemble_rlc(
        L=float(params.get("L", 1.0)),
        C1=float(params.get("C1", 1.0)),
        C2=float(params.get("C2", 1.0)),
        RG=float(params.get("RG", 1.0)),
        RL=float(params.get("RL", 1.0)),
        RR=float(params.get("RR", 1.0)),
        eg=eg,
    )


def _build_stokes(params):
    return assemble_stokes_like(
        grid_n=int(params.get("grid_n", 6)),
        viscosity=float(params.get("viscosity", 1.0)),
        convection=float(params.get("convection", 0.0)),
        stabilization=float(params.get("stabilization", 0.0)),
    )


def _build_poroelastic(params):
    n = int(params.get("n", 8))
    p = int(params.get("p", 4))
    seed = int(params.get("seed", 0))
    y_scale = float(params.get("y_scale", 1e-3))
    k_scale = float(params.get("k_scale", 1.0))
    quasi = bool(params.get("quasi_stationary", False))
    rng = np.random.default_rng(seed)
    a = _random_spd(rng, n)
    m = _random_spd(rng, p)
    d = rng.standard_normal((p, n))
    k = k_scale * _random_spd(rng, p) if k_scale > 0 else np.zeros((p, p))
    y = y_scale * _random_spd(rng, n)
    if quasi:
        return assemble_poroelastic(a, m, k=k, d=d, quasi_stationary=True)
    return assemble_poroelastic(a, m, y=y, k=k, d=d, quasi_stationary=False)


MODEL_REGISTRY = {
    "mechanical": {
        "build": _build_mechanical,
        "params": {"n": 20, "seed": 0, "damping": 1.0, "cond": 10.0},
        "doc": "random damped mechanical system (index 0); damping=0 gives R=0",
    },
    "rlc": {
        "build": _build_rlc,
        "params": {"L": 1.0, "C1": 1.0, "C2": 1.0, "RG": 1.0, "RL": 1.0, "RR": 1.0,
                   "eg": {"kind": "constant", "amplitude": 1.0}},
        "doc": "five-state RLC circuit with controlled voltage source (index 1)",
    },
    "stokes": {
        "build": _build_stokes,
        "params": {"grid_n": 6, "viscosity": 1.0, "convection": 0.0, "stabilization": 0.0},
        "doc": "staggered-grid Stokes flow; index 1 if stabilization > 0, else index 2",
    },
    "poroelastic": {
        "build": _build_poroelastic,
        "params": {"n": 8, "p": 4, "seed": 0, "y_scale": 1e-3, "k_scale": 1.0,
                   "quasi_stationary": False},
        "doc": "poroelasticity; index 0 dynamic, index 2 quasi-stationary",
    },
}


def from_descriptor(descriptor: dict) -> DhDaeSystem:
    """Build a model from a JSON descriptor {"name": ..., "params": {...}}."""
    name = descriptor.get("name")
    if name not in MODEL_REGISTRY:
        raise ModelError(f"unknown model {name!r}; known: {sorted(MODEL_REGISTRY)}")
    params = descriptor.get("params", {})
    return MODEL_REGISTRY[name]["build"](params)
