"""Cyclic Jacobi eigensolver for dense real symmetric matrices.

All spectral work in the package is routed through this solver: complex
Hermitian matrices are embedded as 2n x 2n real symmetric matrices and
quaternionic Hermitian matrices as 4n x 4n real symmetric matrices before
being handed to :func:`jacobi_eigh`.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["JacobiError", "jacobi_eigh"]


class JacobiError(RuntimeError):
    """Raised when the rotation sweep fails to converge."""

    def __init__(self, sweeps: int, off_norm: float):
        self.sweeps = sweeps
        self.off_norm = off_norm
        super().__init__(
            f"Jacobi sweep did not converge after {sweeps} sweeps "
            f"(off-diagonal norm {off_norm:.3e})"
        )


def _off_norm(a: np.ndarray) -> float:
    n = a.shape[0]
    mask = ~np.eye(n, dtype=bool)
    return float(np.sqrt(np.sum(a[mask] ** 2)))


def jacobi_eigh(matrix: np.ndarray, tol: float = 1e-13, max_sweeps: int = 64):
    """Diagonalize a real symmetric matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    matrix:
        Real symmetric ``(n, n)`` array.  The input is not modified.
    tol:
        Convergence threshold on the off-diagonal Frobenius norm, relative
        to the Frobenius norm of the input.
    max_sweeps:
        Upper bound on full (p, q) sweeps before giving up.

    Returns
    -------
    (w, v):
        Eigenvalues ``w`` in ascending order and the matrix ``v`` whose
        columns are the corresponding orthonormal eigenvectors.
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n == 0:
        return np.empty(0), np.empty((0, 0))
    if n == 1:
        return a[0, :1].copy(), np.ones((1, 1))
    a = 0.5 * (a + a.T)
    v = np.eye(n)

    scale = float(np.linalg.norm(a))
    if scale == 0.0:
        return np.zeros(n), v
    threshold = tol * scale

    for sweep in range(max_sweeps):
        off = _off_norm(a)
        if off <= threshold:
            break
        # Rotations smaller than this contribute nothing at working precision
        # but still cost a sweep iteration each.
        skip = off / (n * n) * 1e-2
        vt = v.T
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if -skip <= apq <= skip:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (
                    abs(theta) + math.sqrt(theta * theta + 1.0)
                )
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                # Row rotation on contiguous rows, mirrored into the columns;
                # the 2x2 pivot block is set from the closed two-sided form.
                row_p = a[p].copy()
                row_q = a[q].copy()
                new_p = c * row_p - s * row_q
                new_q = s * row_p + c * row_q
                new_p[p] = app - t * apq
                new_p[q] = 0.0
                new_q[q] = aqq + t * apq
                new_q[p] = 0.0
                a[p] = new_p
                a[q] = new_q
                a[:, p] = new_p
                a[:, q] = new_q

                vec_p = vt[p]
                vec_q = vt[q]
                tmp = c * vec_p - s * vec_q
                vec_q *= c
                vec_q += s * vec_p
                vec_p[:] = tmp
    else:
        raise JacobiError(max_sweeps, _off_norm(a))

    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]
