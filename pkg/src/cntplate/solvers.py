"""Static solve and lowest-mode generalized eigenanalysis."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla


class SingularSystemError(RuntimeError):
    pass


class EigenConvergenceError(RuntimeError):
    pass


@dataclass
class StaticSolution:
    delta: np.ndarray  # reduced solution
    residual: float  # ||K d - f|| / ||f||


@dataclass
class ModalResult:
    omegas: np.ndarray  # rad/s, ascending
    modes: np.ndarray  # (n_eq, n_modes), M-orthonormal
    eigen_residuals: np.ndarray

    def nondimensional(self, a, h, rho_ref, E_ref):
        return self.omegas * a * a / h * np.sqrt(rho_ref / E_ref)


def _factor(K):
    K = sp.csc_matrix(K)
    try:
        lu = spla.splu(K, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                       options=dict(SymmetricMode=True))
    except RuntimeError as exc:
        raise SingularSystemError(f"factorization failed: {exc}") from exc
    d = lu.U.diagonal()
    if np.any(d <= 0) or not np.all(np.isfinite(d)):
        bad = int(np.argmin(d))
        raise SingularSystemError(
            f"stiffness not positive definite: pivot {bad} = {d[bad]:.3e}"
        )
    return lu


def solve_static(system_or_K, f=None):
    """Solve K d = f by sparse LU without pivoting (a Cholesky-equivalent path)."""
    if f is None:
        K, f = system_or_K.K, system_or_K.f
    else:
        K = system_or_K
    f = np.asarray(f, dtype=float)
    if not np.any(f):
        return StaticSolution(np.zeros_like(f), 0.0)
    lu = _factor(K)
    d = lu.solve(f)
    res = np.linalg.norm(K @ d - f) / np.linalg.norm(f)
    return StaticSolution(d, float(res))


def _sign_normalize(vecs):
    for j in range(vecs.shape[1]):
        nz = np.flatnonzero(np.abs(vecs[:, j]) > 1e-12 * np.abs(vecs[:, j]).max())
        if nz.size and vecs[nz[0], j] < 0:
            vecs[:, j] *= -1
    return vecs


def solve_modes(K, M, n_modes=6, dense=False):
    """Lowest ``n_modes`` eigenpairs of K phi = w^2 M phi.

    Sparse problems use shift-invert Lanczos about zero on the factored K;
    ``dense=True`` (or tiny systems) uses a full symmetric decomposition.
    """
    n = K.shape[0]
    n_modes = min(n_modes, n)
    if dense or n <= max(50, 3 * n_modes):
        Kd = K.toarray() if sp.issparse(K) else np.asarray(K, dtype=float)
        Md = M.toarray() if sp.issparse(M) else np.asarray(M, dtype=float)
        lam, vec = sla.eigh(Kd, Md, subset_by_index=(0, n_modes - 1))
    else:
        lu = _factor(K)
        Ks = sp.csr_matrix(K)
        Ms = sp.csr_matrix(M)
        opinv = spla.LinearOperator((n, n), matvec=lu.solve, dtype=float)
        try:
            lam, vec = spla.eigsh(Ks, k=n_modes, M=Ms, sigma=0.0, which="LM",
                                  OPinv=opinv, v0=np.ones(n), tol=1e-13)
        except spla.ArpackNoConvergence as exc:
            raise EigenConvergenceError(
                f"ARPACK converged {len(exc.eigenvalues)} of {n_modes} modes"
            ) from exc
    if np.any(lam <= 0):
        raise EigenConvergenceError(f"non-positive eigenvalue {lam.min():.3e}")
    order = np.argsort(lam, kind="stable")
    lam, vec = lam[order], vec[:, order]
    # re-orthonormalize against M to remove solver round-off
    Mv = M @ vec
    G = vec.T @ Mv
    L = np.linalg.cholesky(0.5 * (G + G.T))
    vec = np.linalg.solve(L, vec.T).T
    vec = _sign_normalize(vec)
    res = np.array([
        np.linalg.norm(K @ vec[:, j] - lam[j] * (M @ vec[:, j])) / np.linalg.norm(K @ vec[:, j])
        for j in range(vec.shape[1])
    ])
    return ModalResult(np.sqrt(lam), vec, res)

