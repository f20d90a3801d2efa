"""Dense matrix kernels for the alternating optimizer.

Matrices are plain 2-D float64 numpy arrays in C (row-major) order; there is
no wrapper type. Every entry point validates shapes and rejects non-finite
input, so downstream code can assume clean operands.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg


class LinalgError(Exception):
    """Base class for numerical failures in the dense kernels."""


class SingularSystemError(LinalgError):
    """Linear system is singular or too close to singular to solve reliably."""


class NotPositiveDefiniteError(LinalgError):
    """Matrix passed to an SPD solve is not positive definite."""


class NonConvergenceError(LinalgError):
    """Iterative factorization (SVD / eigensolver) failed to converge."""


class AsymmetryError(LinalgError):
    """Matrix expected to be symmetric is not, beyond tolerance."""


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a validated 2-D float64 array (finite entries only)."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError(f"{name} contains NaN or Inf entries")
    return a


def _require_square(a: np.ndarray, name: str) -> None:
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")


def _require_symmetric(a: np.ndarray, name: str, tol: float = 1e-10) -> None:
    scale = max(1.0, float(np.abs(a).max(initial=0.0)))
    if np.abs(a - a.T).max(initial=0.0) > tol * scale:
        raise AsymmetryError(f"{name} is not symmetric within {tol:g} (relative)")


class SvdFactors(NamedTuple):
    """Thin SVD, ``u @ diag(sigma) @ vt`` reconstructing the input."""

    u: np.ndarray
    sigma: np.ndarray
    vt: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.sigma) @ self.vt


def svd(m) -> SvdFactors:
    """Thin singular value decomposition with nonincreasing ``sigma >= 0``.

    Raises NonConvergenceError if the underlying iteration fails, which
    signals numerically pathological input rather than a usage error.
    """
    a = as_matrix(m)
    try:
        u, sigma, vt = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NonConvergenceError(f"SVD did not converge: {exc}") from exc
    return SvdFactors(u, sigma, vt)


def svt(m, tau: float) -> np.ndarray:
    """Singular value shrinkage: soft-threshold the spectrum of ``m`` by ``tau``.

    Returns ``u @ diag(max(sigma - tau, 0)) @ vt``, the proximal operator of
    ``tau * ||.||_*`` at ``m``.
    """
    if tau < 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    u, sigma, vt = svd(m)
    shrunk = np.maximum(sigma - tau, 0.0)
    return (u * shrunk) @ vt


class SpdSolver:
    """Cached Cholesky factorization of a symmetric positive definite matrix.

    Factor once, then solve against many right-hand sides (the per-view
    inconsistency updates reuse the same system every iteration).
    """

    def __init__(self, a):
        a = as_matrix(a, "a")
        _require_square(a, "a")
        _require_symmetric(a, "a")
        self.n = a.shape[0]
        try:
            self._factor = scipy.linalg.cho_factor(a, lower=True, check_finite=False)
        except scipy.linalg.LinAlgError as exc:
            raise NotPositiveDefiniteError(f"matrix is not positive definite: {exc}") from exc

    def solve(self, rhs) -> np.ndarray:
        rhs = as_matrix(rhs, "rhs")
        if rhs.shape[0] != self.n:
            raise ValueError(f"rhs has {rhs.shape[0]} rows, expected {self.n}")
        return scipy.linalg.cho_solve(self._factor, rhs, check_finite=False)


def solve_spd(a, rhs) -> np.ndarray:
    """Solve ``a @ x = rhs`` for symmetric positive definite ``a`` via Cholesky."""
    return SpdSolver(a).solve(rhs)


def solve_sylvester(a, b, q, tol: float = 1e-9) -> np.ndarray:
    """Solve ``a @ s + s @ b = q`` by Schur reduction (Bartels-Stewart).

    The solution is unique when the spectra of ``a`` and ``-b`` are disjoint;
    the relative residual ``||a s + s b - q||_F / max(1, ||q||_F)`` is checked
    against ``tol`` and a SingularSystemError is raised when it is exceeded,
    which catches (near-)overlapping spectra.
    """
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    q = as_matrix(q, "q")
    _require_square(a, "a")
    _require_square(b, "b")
    if q.shape != (a.shape[0], b.shape[0]):
        raise ValueError(
            f"q must have shape ({a.shape[0]}, {b.shape[0]}), got {q.shape}"
        )
    try:
        s = scipy.linalg.solve_sylvester(a, b, q)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise SingularSystemError(f"Sylvester solve failed: {exc}") from exc
    if not np.isfinite(s).all():
        raise SingularSystemError("Sylvester solve produced non-finite entries")
    residual = np.linalg.norm(a @ s + s @ b - q, "fro")
    bound = tol * max(1.0, np.linalg.norm(q, "fro"))
    if residual > bound:
        raise SingularSystemError(
            f"Sylvester residual {residual:.3e} exceeds {bound:.3e}; "
            "spectra of a and -b may overlap"
        )
    return s


class SymmetricSylvesterSolver:
    """Sylvester solver specialized to symmetric coefficient matrices.

    Eigendecomposes ``a`` and ``b`` once; each solve of
    ``(a + shift_a * I) s + s b = q`` is then three dense multiplies. The
    shift makes a scheduled penalty parameter free of refactorizations.
    """

    def __init__(self, a, b, sym_tol: float = 1e-10):
        a = as_matrix(a, "a")
        b = as_matrix(b, "b")
        _require_square(a, "a")
        _require_square(b, "b")
        _require_symmetric(a, "a", sym_tol)
        _require_symmetric(b, "b", sym_tol)
        self.wa, self.va = sym_eig(a)
        self.wb, self.vb = sym_eig(b)

    def solve(self, q, shift_a: float = 0.0) -> np.ndarray:
        q = as_matrix(q, "q")
        if q.shape != (self.wa.size, self.wb.size):
            raise ValueError(
                f"q must have shape ({self.wa.size}, {self.wb.size}), got {q.shape}"
            )
        denom = (self.wa + shift_a)[:, None] + self.wb[None, :]
        scale = max(np.abs(self.wa).max(initial=0.0), np.abs(self.wb).max(initial=0.0), 1.0)
        if np.abs(denom).min() <= 1e-14 * scale:
            raise SingularSystemError(
                "eigenvalue sums of a and b vanish; Sylvester system is singular"
            )
        core = (self.va.T @ q @ self.vb) / denom
        return self.va @ core @ self.vb.T


def sym_eig(m, sym_tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix: ascending ``w``, orthonormal ``v``."""
    a = as_matrix(m)
    _require_square(a, "matrix")
    _require_symmetric(a, "matrix", sym_tol)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NonConvergenceError(f"eigendecomposition did not converge: {exc}") from exc
    return w, v


def nuclear_norm(m) -> float:
    """Sum of singular values."""
    a = as_matrix(m)
    return float(np.linalg.svd(a, compute_uv=False).sum())
