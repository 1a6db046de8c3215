"""Implicit midpoint discretization of dHDAE systems.

One step of the midpoint rule on E x' = (J - R) x + f(t) solves

    (E + tau/2 (R - J)) x_{k+1} = (E - tau/2 (R - J)) x_k + tau f(t_k + tau/2),

so the step matrix A = E + tau/2 (R - J) carries the natural split
A = H + S with H = E + tau/2 R and S = -tau/2 J.  H inherits positive
semidefiniteness from the model; one Hermitian factorization per (system,
tau) pair is reused across all steps.

The scheme is second order and reproduces the energy balance of the model
exactly: with midpoint state m_k = (x_k + x_{k+1})/2 and f = 0,

    Ha(x_{k+1}) - Ha(x_k) = -tau * m_k^* R m_k.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .dhdae import DhDaeSystem, nullspace_of_e
from .errors import ConsistencyError, DimensionError, SingularHermitianPartError
from .hs_core import DEFAULT_TOL, Definiteness, HsSplitSystem

#: Relative tolerance for the algebraic-constraint residual of initial values.
CONSISTENCY_TOL = 1e-8


@dataclass(frozen=True)
class MidpointSystem:
    """The time-discrete linear system of one midpoint step."""

    sys: HsSplitSystem
    tau: float
    source: DhDaeSystem

    @property
    def n(self):
        return self.sys.n


def midpoint_system(sys: DhDaeSystem, tau: float, tol=DEFAULT_TOL) -> MidpointSystem:
    """Assemble A = E + tau/2 (R - J) with its Hermitian/skew split."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    a = sys.e + (tau / 2.0) * (sys.r - sys.j)
    return MidpointSystem(sys=HsSplitSystem.from_matrix(a, tol), tau=tau, source=sys)


def midpoint_rhs(msys: MidpointSystem, x_k, t_k: float):
    """Right side b = (E - tau/2 (R - J)) x_k + tau f(t_k + tau/2).

    The source is sampled at the interval midpoint, which is what keeps the
    rule second order.
    """
    x_k = np.asarray(x_k)
    model = msys.source
    if x_k.shape[0] != model.n:
        raise DimensionError("x_k has wrong length")
    tau = msys.tau
    b = (model.e - (tau / 2.0) * (model.r - model.j)) @ x_k
    return b + tau * np.asarray(model.f(t_k + tau / 2.0))


@dataclass(frozen=True)
class Trajectory:
    """Midpoint trajectory with per-step energy accounting.

    ``hamiltonians[k] = 1/2 x_k* E x_k``; ``dissipation[k]`` is the energy
    removed in the step arriving at ``times[k]`` (zero at k = 0), i.e.
    ``tau * m^* R m`` with m the midpoint state of that step.
    """

    times: np.ndarray
    states: np.ndarray
    hamiltonians: np.ndarray
    dissipation: np.ndarray

    def to_csv(self, path):
        n = self.states.shape[1]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t"] + [f"x{i + 1}" for i in range(n)]
                            + ["hamiltonian", "dissipation"])
            for k in range(len(self.times)):
                row = [repr(float(self.times[k]))]
                row += [repr(complex(v)) if np.iscomplexobj(self.states) else repr(float(v))
                        for v in self.states[k]]
                row += [repr(float(self.hamiltonians[k])), repr(float(self.dissipation[k]))]
                writer.writerow(row)


def check_consistency(sys: DhDaeSystem, x0, t0=0.0, tol=CONSISTENCY_TOL, rank_tol=1e-10):
    """Residual of the algebraic constraints at the initial value.

    After splitting off ker(E), the algebraic block demands
    V2* ((J - R) x0 + f(t0)) = 0.  Raises ``ConsistencyError`` when the
    relative residual exceeds ``tol``.
    """
    v_null = nullspace_of_e(sys, rank_tol)
    if v_null.shape[1] == 0:
        return 0.0
    x0 = np.asarray(x0)
    jr = sys.operator()
    g = v_null.conj().T @ (jr @ x0 + np.asarray(sys.f(t0)))
    scale = float(np.linalg.norm(jr, 2) * np.linalg.norm(x0) + np.linalg.norm(sys.f(t0)))
    resid = float(np.linalg.norm(g))
    rel = resid / scale if scale > 0 else resid
    if rel > tol:
        raise ConsistencyError(
            f"initial value violates the algebraic constraints: relative residual {rel:.3e}"
        )
    return rel


def integrate(sys: DhDaeSystem, x0, tau: float, n_steps: int, solver="direct",
              tol=1e-12, t0=0.0, solver_kwargs=None) -> Trajectory:
    """Integrate with the implicit midpoint rule on a uniform grid.

    ``solver`` selects how each step's linear system is solved: "direct"
    (LU of A, factored once) or one of the Krylov methods "widlund",
    "rapoport", "gmres", "lgmres", "hss".  The Hermitian part of the step
    matrix must be positive definite; singular-H systems (index two) go
    through the Schur path of :mod:`dhkrylov.krylov` instead.
    """
    from . import krylov  # local import to avoid a cycle

    x0 = np.asarray(x0)
    x0 = x0.astype(np.result_type(sys.e.dtype, x0.dtype))
    if x0.shape[0] != sys.n:
        raise DimensionError("x0 has wrong length")
    msys = midpoint_system(sys, tau)
    if msys.sys.definiteness is not Definiteness.POSITIVE_DEFINITE:
        raise SingularHermitianPartError(
            "Hermitian part E + tau/2 R is singular; use the Schur-complement "
            "path (krylov.solve_via_schur) for this system"
        )
    check_consistency(sys, x0, t0)

    solver_kwargs = dict(solver_kwargs or {})
    lu = scipy.linalg.lu_factor(msys.sys.a) if solver == "direct" else None

    times = [t0]
    states = [x0]
    hams = [sys.hamiltonian(x0)]
    diss = [0.0]
    x = x0
    t = t0
    for _ in range(n_steps):
        b = midpoint_rhs(msys, x, t)
        if solver == "direct":
            x_next = scipy.linalg.lu_solve(lu, b)
        else:
            report = krylov.solve(solver, msys.sys, b, tol=tol, **solver_kwargs)
            x_next = report.solution
        resid = np.linalg.norm(msys.sys.a @ x_next - b)
        bnorm = np.linalg.norm(b)
        if bnorm > 0 and resid > max(tol, 1e-10) * bnorm:
            raise SingularHermitianPartError(
                f"step solve residual {resid / bnorm:.3e} exceeds tolerance"
            )
        m = (x + x_next) / 2.0
        diss.append(tau * float(np.vdot(m, sys.r @ m).real))
        x = x_next
        t += tau
        times.append(t)
        states.append(x)
        hams.append(sys.hamiltonian(x))
    return Trajectory(
        times=np.asarray(times),
        states=np.asarray(states),
        hamiltonians=np.asarray(hams),
        dissipation=np.asarray(diss),
    )


def midpoint_saddle_blocks(sys: DhDaeSystem, tau: float):
    """Extract saddle blocks (a11, b) of the midpoint matrix of a 2-block model.

    For models with blocks (v, p) whose midpoint matrix has the form
    [[A11, B], [-B*, 0]] (unstabilized Stokes type), returns ``(a11, b)``
    together with the block sizes.  Raises when the trailing diagonal block
    is not negligible.
    """
    if sys.blocks is None or len(sys.blocks) != 2:
        raise DimensionError("model must carry two named blocks")
    n1 = sys.blocks[0][1]
    a = sys.e + (tau / 2.0) * (sys.r - sys.j)
    a11 = a[:n1, :n1]
    b = a[:n1, n1:]
    lower = a[n1:, :n1]
    corner = a[n1:, n1:]
    scale = float(np.max(np.abs(a)))
    if float(np.max(np.abs(lower + b.conj().T))) > 1e-12 * scale:
        raise DimensionError("midpoint matrix is not in [[A, B], [-B*, 0]] form")
    if corner.size and float(np.max(np.abs(corner))) > 1e-12 * scale:
        raise DimensionError("trailing diagonal block is not zero; Schur path not applicable")
    return a11, b, (n1, sys.n - n1)
