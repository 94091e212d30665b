"""Unitary evolution exp(-iQ) for Hermitian generators.

Small problems go through a dense Hermitian eigendecomposition (exact up to
rounding, and reusable across states via :class:`HermitianEvolution`);
larger ones use a Lanczos Krylov action that never materializes the dense
matrix.  The switch dimension is configurable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.linalg import eigh_tridiagonal

from .errors import DimensionError, HermiticityError
from .fock import LinearOperator, StateVector, _check_same_layout

DENSE_DIM_LIMIT = 5000
MAX_DIMENSION = 4_000_000
LANCZOS_TOL = 1e-13
LANCZOS_MAX_STEPS = 120


def _require_hermitian(op: LinearOperator) -> None:
    if not op.hermitian:
        raise HermiticityError(
            "evolution requires an operator with the hermitian flag set; "
            "use LinearOperator.as_hermitian() to verify and set it"
        )


class HermitianEvolution:
    """Reusable handle applying exp(-i * scale * Q) to states.

    For dimensions up to `dense_dim_limit` the eigendecomposition is
    computed once and shared by every apply; beyond that each apply runs a
    Lanczos iteration on the sparse matrix.
    """

    def __init__(self, op: LinearOperator, *, scale: float = 1.0,
                 dense_dim_limit: int = DENSE_DIM_LIMIT,
                 max_dimension: int = MAX_DIMENSION,
                 tol: float = LANCZOS_TOL):
        _require_hermitian(op)
        if op.dim > max_dimension:
            raise DimensionError(
                f"dimension {op.dim} exceeds memory budget {max_dimension}"
            )
        self.op = op
        self.scale = float(scale)
        self.tol = tol
        self._dense = op.dim <= dense_dim_limit
        if self._dense:
            w, v = np.linalg.eigh(op.to_dense())
            self._eigvals = w
            self._eigvecs = v
        else:
            self._matrix = op.matrix

    def apply(self, state: StateVector) -> StateVector:
        _check_same_layout(self.op, state)
        if self._dense:
            phases = np.exp(-1j * self.scale * self._eigvals)
            coeffs = self._eigvecs.conj().T @ state.amplitudes
            out = self._eigvecs @ (phases * coeffs)
            return StateVector(state.layout, out)
        out = lanczos_expm_apply(self._matrix, state.amplitudes,
                                 scale=self.scale, tol=self.tol)
        return StateVector(state.layout, out)

    __call__ = apply


def evolve_exact(op: LinearOperator, state: StateVector, *,
                 dense_dim_limit: int = DENSE_DIM_LIMIT,
                 max_dimension: int = MAX_DIMENSION,
                 tol: float = LANCZOS_TOL) -> StateVector:
    """exp(-iQ)|state> for Hermitian Q; norm preserved to ~1e-13."""
    return HermitianEvolution(op, dense_dim_limit=dense_dim_limit,
                              max_dimension=max_dimension, tol=tol).apply(state)


def lanczos_expm_apply(matrix: sparse.spmatrix, vec: np.ndarray, *,
                       scale: float = 1.0, tol: float = LANCZOS_TOL,
                       max_steps: int = LANCZOS_MAX_STEPS) -> np.ndarray:
    """exp(-i * scale * A) @ vec for Hermitian sparse A via Lanczos.

    Full reorthogonalization is used for robustness; generators here are
    small-norm mixing operators, so the basis stays tiny.  If the Krylov
    estimate has not converged by `max_steps` the time interval is split
    and the pieces applied sequentially.
    """
    beta0 = float(np.linalg.norm(vec))
    if beta0 == 0.0:
        return np.zeros_like(vec, dtype=np.complex128)

    # Substep when the spectral spread is large; row-sum bound is cheap.
    norm_bound = float(np.abs(matrix).sum(axis=1).max()) * abs(scale)
    nsteps = max(1, int(np.ceil(norm_bound / 25.0)))
    out = np.asarray(vec, dtype=np.complex128)
    for _ in range(nsteps):
        out = _lanczos_single(matrix, out, scale / nsteps, tol, max_steps)
    return out


def _lanczos_single(matrix: sparse.spmatrix, vec: np.ndarray, scale: float,
                    tol: float, max_steps: int) -> np.ndarray:
    beta0 = float(np.linalg.norm(vec))
    basis = [vec / beta0]
    alphas: list[float] = []
    betas: list[float] = []
    y = None
    for j in range(max_steps):
        w = matrix.dot(basis[j])
        alpha = float(np.real(np.vdot(basis[j], w)))
        alphas.append(alpha)
        w = w - alpha * basis[j]
        if j > 0:
            w = w - betas[j - 1] * basis[j - 1]
        # full reorthogonalization against the existing basis
        for q in basis:
            w = w - np.vdot(q, w) * q
        beta = float(np.linalg.norm(w))
        y = _tridiag_expm_e1(alphas, betas, scale)
        if j > 0:
            err = abs(beta * y[-1])
            if err <= tol:
                break
        if beta <= 1e-14 * beta0:
            break  # invariant subspace: Krylov result is exact
        betas.append(beta)
        basis.append(w / beta)
    else:
        y = _tridiag_expm_e1(alphas, betas[: len(alphas) - 1], scale)
    k = len(y)
    v = np.stack(basis[:k], axis=1)
    return beta0 * (v @ y)


def _tridiag_expm_e1(alphas: list[float], betas: list[float], scale: float) -> np.ndarray:
    """First column of exp(-i * scale * T) for tridiagonal T."""
    k = len(alphas)
    if k == 1:
        return np.array([np.exp(-1j * scale * alphas[0])])
    w, v = eigh_tridiagonal(np.asarray(alphas), np.asarray(betas[: k - 1]))
    return v @ (np.exp(-1j * scale * w) * v[0, :].conj())


def matrix_power_apply(op: LinearOperator, n: int, state: StateVector) -> StateVector:
    """Q^n |state> by repeated sparse application."""
    if n < 0:
        raise ValueError("power must be >= 0")
    out = state
    for _ in range(n):
        out = op.apply(out)
    return out
