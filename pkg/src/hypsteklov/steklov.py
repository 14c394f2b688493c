"""Discrete Steklov spectra through the Dirichlet-to-Neumann Schur complement."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .graphcore import GraphWithBoundary

TOL_ZERO = 1e-10
DENSE_LIMIT = 4000
CG_RTOL = 1e-12
ORACLE_LIMIT = 200


class SpectrumError(RuntimeError):
    pass


@dataclass(frozen=True)
class LaplacianBlocks:
    L_II: sp.csr_matrix
    L_IB: sp.csr_matrix
    L_BB: sp.csr_matrix

    @property
    def n_interior(self) -> int:
        return self.L_II.shape[0]

    @property
    def n_boundary(self) -> int:
        return self.L_BB.shape[0]

    def full(self) -> np.ndarray:
        return np.block([[self.L_II.toarray(), self.L_IB.toarray()],
                         [self.L_IB.T.toarray(), self.L_BB.toarray()]])


@dataclass(frozen=True)
class SteklovSpectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, boundary-indexed
    residuals: np.ndarray

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def sigma(self, k: int) -> float:
        return float(self.eigenvalues[k])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "sigma"])
        for k, s in enumerate(self.eigenvalues):
            w.writerow([k, repr(float(s))])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [float(s) for s in self.eigenvalues],
            "residuals": [float(r) for r in self.residuals],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def assemble_laplacian(G: GraphWithBoundary) -> LaplacianBlocks:
    A = G.adjacency_matrix()
    deg = np.asarray(A.sum(axis=1)).ravel()
    L = (sp.diags(deg) - A).tocsr()
    ni = G.n_interior
    return LaplacianBlocks(L[:ni, :ni].tocsr(), L[:ni, ni:].tocsr(), L[ni:, ni:].tocsr())


def _solve_interior(L: LaplacianBlocks, rhs: np.ndarray) -> np.ndarray:
    """Solve L_II X = rhs (rhs may have several columns)."""
    ni = L.n_interior
    if ni == 0:
        return np.zeros((0,) + rhs.shape[1:])
    if ni <= DENSE_LIMIT:
        try:
            cf = sla.cho_factor(L.L_II.toarray(), lower=True)
        except sla.LinAlgError as e:
            raise SpectrumError("interior Laplacian block is singular") from e
        return sla.cho_solve(cf, rhs)
    A = L.L_II.tocsc()
    try:
        lu = spla.splu(A)
        precond = lu.solve
    except (RuntimeError, MemoryError):
        d = 1.0 / A.diagonal()
        precond = lambda R: d[:, None] * R  # noqa: E731
    return _block_cg(L.L_II, rhs, precond)


def _block_cg(A: sp.csr_matrix, B: np.ndarray, precond=None, rtol: float = CG_RTOL,
              maxiter: int = 20000) -> np.ndarray:
    """Preconditioned conjugate gradients, one independent recurrence per column.

    Without a preconditioner, Jacobi (diagonal) scaling is used.
    """
    B2 = B.reshape(B.shape[0], -1)
    if precond is None:
        dinv = 1.0 / A.diagonal()
        precond = lambda R: dinv[:, None] * R  # noqa: E731
    X = np.zeros_like(B2)
    R = B2.copy()
    Z = precond(R)
    P = Z.copy()
    rz = np.einsum("ij,ij->j", R, Z)
    bnorm = np.linalg.norm(B2, axis=0)
    bnorm[bnorm == 0] = 1.0
    for _ in range(maxiter):
        if np.all(np.linalg.norm(R, axis=0) <= rtol * bnorm):
            return X.reshape(B.shape)
        AP = A @ P
        pAp = np.einsum("ij,ij->j", P, AP)
        alpha = np.where(pAp > 0, rz / np.where(pAp > 0, pAp, 1.0), 0.0)
        X += alpha * P
        R -= alpha * AP
        Z = precond(R)
        rz_new = np.einsum("ij,ij->j", R, Z)
        beta = np.where(rz > 0, rz_new / np.where(rz > 0, rz, 1.0), 0.0)
        P = Z + beta * P
        rz = rz_new
    raise SpectrumError("conjugate gradient did not converge")


def harmonic_extension(L: LaplacianBlocks, f) -> np.ndarray:
    """Extend boundary data harmonically; result is interior values followed by f."""
    f = np.asarray(f, dtype=float)
    if f.shape[0] != L.n_boundary:
        raise ValueError("boundary vector has the wrong length")
    u_int = _solve_interior(L, -(L.L_IB @ f))
    return np.concatenate([u_int, f])


def dtn_matrix(L: LaplacianBlocks) -> np.ndarray:
    """Schur complement L_BB - L_IB^T L_II^{-1} L_IB, symmetrized."""
    LBB = L.L_BB.toarray()
    if L.n_interior == 0:
        return LBB
    X = _solve_interior(L, L.L_IB.toarray())
    D = LBB - L.L_IB.T @ X
    D = np.asarray(D)
    return 0.5 * (D + D.T)


def _finish(D: np.ndarray, vals: np.ndarray, vecs: np.ndarray) -> SteklovSpectrum:
    order = np.argsort(vals, kind="stable")
    vals = vals[order].copy()
    vecs = vecs[:, order]
    if vals[0] < -TOL_ZERO:
        raise SpectrumError(f"negative Steklov eigenvalue {vals[0]:.3e}: assembly bug")
    vals[(vals > -TOL_ZERO) & (vals < TOL_ZERO)] = 0.0
    resid = np.linalg.norm(D @ vecs - vecs * vals, axis=0)
    return SteklovSpectrum(vals, vecs, resid)


def steklov_spectrum(G: GraphWithBoundary) -> SteklovSpectrum:
    D = dtn_matrix(assemble_laplacian(G))
    try:
        vals, vecs = np.linalg.eigh(D)
    except np.linalg.LinAlgError as e:
        raise SpectrumError("eigensolver did not converge") from e
    return _finish(D, vals, vecs)


def jacobi_eigh(S: np.ndarray, tol: float = 1e-14, max_sweeps: int = 100):
    """Cyclic Jacobi eigenvalue iteration for a dense symmetric matrix."""
    A = np.array(S, dtype=float, copy=True)
    n = A.shape[0]
    V = np.eye(n)
    scale = max(np.abs(A).max(), 1e-300)
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= tol * scale:
            return np.diag(A).copy(), V
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) < 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                elif theta != 0.0:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                else:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                Ap, Aq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * Ap - s * Aq
                A[:, q] = s * Ap + c * Aq
                Ap, Aq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * Ap - s * Aq
                A[q, :] = s * Ap + c * Aq
                Vp, Vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * Vp - s * Vq
                V[:, q] = s * Vp + c * Vq
    raise SpectrumError("Jacobi iteration did not converge")


def rayleigh_oracle(G: GraphWithBoundary) -> SteklovSpectrum:
    """Independent route: Dirichlet energy of harmonic extensions of boundary basis vectors."""
    nb = G.n_boundary
    if nb > ORACLE_LIMIT:
        raise SpectrumError(f"oracle is dense and capped at {ORACLE_LIMIT} boundary vertices")
    ni = G.n_interior
    A = G.adjacency_matrix().toarray()
    deg = A.sum(axis=1)
    # extensions via LU on the interior block, one boundary basis vector at a time
    U = np.zeros((G.n, nb))
    if ni:
        LII = np.diag(deg[:ni]) - A[:ni, :ni]
        for j in range(nb):
            rhs = A[:ni, ni + j]
            U[:ni, j] = np.linalg.solve(LII, rhs)
    U[ni:, :] = np.eye(nb)
    e = np.array(G.edges, dtype=int)
    grad = U[e[:, 0], :] - U[e[:, 1], :]
    Q = grad.T @ grad
    vals, vecs = jacobi_eigh(Q)
    return _finish(Q, vals, vecs)
