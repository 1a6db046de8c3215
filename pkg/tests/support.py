"""Shared builders and independent oracles used across the test modules."""

import numpy as np

import dhkrylov as dk


def random_spd(rng, n, cond=10.0):
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return (q * np.geomspace(1.0, cond, n)) @ q.T


def random_unitary(rng, n, complex_=False):
    g = rng.standard_normal((n, n))
    if complex_:
        g = g + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hs_system(rng, n, cond_h=100.0, lam=1.0, complex_=False):
    """HsSplitSystem with prescribed kappa(H) and spectral half-width."""
    q = random_unitary(rng, n, complex_)
    h = (q * np.geomspace(1.0, cond_h, n)) @ q.conj().T
    h = (h + h.conj().T) / 2
    g = rng.standard_normal((n, n))
    if complex_:
        g = g + 1j * rng.standard_normal((n, n))
    s = (g - g.conj().T) / 2
    sys0 = dk.HsSplitSystem.from_matrix(h + s)
    lam0 = dk.spectral_interval(sys0).lam
    if lam0 > 0:
        s = s * (lam / lam0)
    return dk.HsSplitSystem.from_matrix(h + s)


def uniform_spectrum_system(rng, n, cond_h=1e3, lam=1.0):
    """K = H^{-1} S with uniformly spaced imaginary eigenvalue pairs.

    No isolated extreme eigenvalues, so Ritz pairs do not converge early
    and the three-term recurrence keeps its H-orthogonality over many
    steps; used for the long-run Lanczos structure checks.
    """
    assert n % 2 == 0
    q = random_unitary(rng, n)
    h = (q * np.geomspace(1.0, cond_h, n)) @ q.T
    h = (h + h.T) / 2
    low = np.linalg.cholesky(h)
    thetas = lam * np.arange(1, n // 2 + 1) / (n // 2)
    blocks = np.zeros((n, n))
    for i, th in enumerate(thetas):
        blocks[2 * i, 2 * i + 1] = th
        blocks[2 * i + 1, 2 * i] = -th
    z = random_unitary(rng, n)
    s = low @ (z @ blocks @ z.T) @ low.T
    s = (s - s.T) / 2
    return dk.HsSplitSystem.from_matrix(h + s)


def krylov_basis(apply_a, b, k):
    """Explicit well-conditioned basis of K_k(A, b) for brute-force oracles.

    Each new raw column is A applied to the newest orthonormalized
    direction, so the span chain is exactly K_1 c K_2 c ... while the
    returned matrix stays numerically orthonormal.
    """
    cols = [np.asarray(b)]
    q = np.linalg.qr(np.column_stack(cols))[0]
    for _ in range(1, k):
        cols.append(apply_a(q[:, -1]))
        q = np.linalg.qr(np.column_stack(cols))[0]
    return q


def pencil_index_exact(e, a0):
    """Differentiation index of a regular pencil lambda*E - A0, exactly.

    Independent oracle: for a regular shift c, the infinite-eigenvalue
    Jordan structure of the pencil equals the Jordan structure at 0 of
    Ehat = (c E - A0)^{-1} E, so the index is the smallest k with
    rank(Ehat^k) = rank(Ehat^{k+1}).  Exact rational arithmetic; only for
    small integer/rational matrices.
    """
    import sympy as sp

    e_s = sp.Matrix([[sp.nsimplify(v, rational=True) for v in row] for row in np.asarray(e)])
    a_s = sp.Matrix([[sp.nsimplify(v, rational=True) for v in row] for row in np.asarray(a0)])
    n = e_s.shape[0]
    c = 1
    while (c * e_s - a_s).det() == 0:
        c += 1
        if c > 25:
            raise ValueError("pencil appears singular")
    ehat = (c * e_s - a_s).inv() * e_s
    ranks = []
    power = sp.eye(n)
    for _ in range(n + 2):
        ranks.append(power.rank())
        power = power * ehat
    for k in range(n + 1):
        if ranks[k] == ranks[k + 1]:
            return k
    raise AssertionError("rank chain did not stabilize")


def pencil_index_numeric(e, a0, tol=1e-9):
    """Floating-point version of :func:`pencil_index_exact`."""
    n = e.shape[0]
    for c in (1.37, -2.43, 3.71, -5.13):
        pencil = c * e - a0
        svals = np.linalg.svd(pencil, compute_uv=False)
        if svals[-1] > 1e-10 * svals[0]:
            ehat = np.linalg.solve(pencil, e)
            break
    else:
        raise ValueError("pencil appears singular")

    def nrank(m):
        s = np.linalg.svd(m, compute_uv=False)
        if s.size == 0 or s[0] == 0:
            return 0
        return int(np.sum(s > tol * s[0]))

    ranks = []
    power = np.eye(n)
    for _ in range(n + 2):
        ranks.append(nrank(power))
        power = power @ ehat
    for k in range(n + 1):
        if ranks[k] == ranks[k + 1]:
            return k
    raise AssertionError("rank chain did not stabilize")
