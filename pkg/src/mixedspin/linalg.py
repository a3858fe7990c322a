"""Small dense complex linear algebra for bipartite density matrices.

Matrices are plain ``numpy`` complex arrays. Bipartite operators live on a
``dims = (d1, d2)`` product space with the first factor as the slow index,
i.e. row ``i1 * d2 + i2`` -- the layout produced by :func:`numpy.kron`.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import BadShape, NoConvergence, NotDensityMatrix, NotHermitian

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
TRACE_TOL = 1e-10
MAX_SWEEPS = 100

QUTRIT_QUBIT = (3, 2)


class EigenSystem(NamedTuple):
    """Ascending eigenvalues with eigenvectors stored as columns."""

    values: np.ndarray
    vectors: np.ndarray


def as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise BadShape(f"expected a 2-D matrix, got shape {m.shape}")
    return m


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol)


def _check_hermitian(m: np.ndarray) -> None:
    if m.shape[0] != m.shape[1]:
        raise BadShape(f"expected a square matrix, got shape {m.shape}")
    if not is_hermitian(m):
        err = np.max(np.abs(m - m.conj().T))
        raise NotHermitian(f"matrix deviates from its adjoint by {err:.3g}")


def _jacobi(a: np.ndarray, max_sweeps: int) -> EigenSystem:
    # Cyclic Jacobi for complex Hermitian input: each 2x2 pivot is made real
    # by a phase on column q, then annihilated by a real plane rotation.
    a = a.copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return EigenSystem(np.zeros(n), v)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= 1e-15 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # columns p, q of U = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                col_p = v[:, p].copy()
                col_q = v[:, q].copy()
                v[:, p] = c * col_p - s * np.conj(phase) * col_q
                v[:, q] = s * col_p + c * np.conj(phase) * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * phase * row_q
                a[q, :] = s * row_p + c * phase * row_q
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * np.conj(phase) * col_q
                a[:, q] = s * col_p + c * np.conj(phase) * col_q
                a[p, q] = a[q, p] = 0.0
    else:
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off > 1e-15 * scale:
            raise NoConvergence(
                f"Jacobi iteration did not converge in {max_sweeps} sweeps "
                f"(off-diagonal norm {off:.3g})"
            )
    values = np.diag(a).real
    order = np.argsort(values, kind="stable")
    return EigenSystem(values[order], v[:, order])


def hermitian_eigensystem(m, method: str = "lapack", max_sweeps: int = MAX_SWEEPS) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix.

    Args:
        m: square Hermitian matrix (checked to within ``HERMITIAN_TOL``).
        method: ``"lapack"`` (``numpy.linalg.eigh``) or ``"jacobi"`` (cyclic
            complex Jacobi, capped at ``max_sweeps`` sweeps).

    Returns:
        EigenSystem with ascending ``values`` and orthonormal column
        ``vectors`` such that ``m @ vectors[:, k] == values[k] * vectors[:, k]``.

    Raises:
        NotHermitian, BadShape, NoConvergence.
    """
    m = as_matrix(m)
    _check_hermitian(m)
    # symmetrize so both backends see exactly Hermitian data
    m = 0.5 * (m + m.conj().T)
    if method == "jacobi":
        return _jacobi(m, max_sweeps)
    if method != "lapack":
        raise ValueError(f"unknown eigensolver method {method!r}")
    try:
        values, vectors = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return EigenSystem(values, vectors)


def hermitian_eigenvalues(m) -> np.ndarray:
    m = as_matrix(m)
    _check_hermitian(m)
    return np.linalg.eigvalsh(0.5 * (m + m.conj().T))


def kron(a, b) -> np.ndarray:
    """Kronecker product, ``out[i*p + k, j*q + l] = a[i, j] * b[k, l]``."""
    return np.kron(as_matrix(a), as_matrix(b))


def _split(m: np.ndarray, dims) -> np.ndarray:
    d1, d2 = dims
    if m.shape != (d1 * d2, d1 * d2):
        raise BadShape(f"expected a {d1 * d2}x{d1 * d2} matrix on {d1}x{d2}, got {m.shape}")
    return m.reshape(d1, d2, d1, d2)


def partial_transpose_first(m, dims=QUTRIT_QUBIT) -> np.ndarray:
    """Transpose the first factor's indices: ``out[(a,i),(b,j)] = m[(b,i),(a,j)]``."""
    m = as_matrix(m)
    d = dims[0] * dims[1]
    return _split(m, dims).transpose(2, 1, 0, 3).reshape(d, d)


def partial_trace(m, keep: str = "first", dims=QUTRIT_QUBIT) -> np.ndarray:
    """Reduced operator on the kept factor (``"first"`` or ``"second"``)."""
    t = _split(as_matrix(m), dims)
    if keep == "first":
        return np.einsum("aibi->ab", t)
    if keep == "second":
        return np.einsum("aiaj->ij", t)
    raise ValueError(f"keep must be 'first' or 'second', got {keep!r}")


def density_spectrum(rho) -> np.ndarray:
    """Eigenvalues of a density matrix with round-off negatives clamped to 0.

    Raises NotDensityMatrix if an eigenvalue is below ``-PSD_TOL`` or the trace
    is off by more than ``TRACE_TOL``.
    """
    rho = as_matrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise BadShape(f"expected a square matrix, got shape {rho.shape}")
    if not is_hermitian(rho):
        raise NotDensityMatrix("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1.0) > TRACE_TOL:
        raise NotDensityMatrix(f"trace is {tr.real:.12g}, expected 1")
    lam = hermitian_eigenvalues(rho)
    if lam[0] < -PSD_TOL:
        raise NotDensityMatrix(f"negative eigenvalue {lam[0]:.3g}")
    return np.where(lam < 0.0, 0.0, lam)


def shannon_entropy(p) -> float:
    """Base-2 Shannon entropy with ``0 log 0 = 0``, kept inside [0, log2 len(p)]."""
    p = np.asarray(p, dtype=float)
    nz = p[p > 0.0]
    h = float(-np.sum(nz * np.log2(nz)))
    return min(max(h, 0.0), math.log2(p.size))


def von_neumann_entropy(rho) -> float:
    """``-tr(rho log2 rho)`` in bits."""
    return shannon_entropy(density_spectrum(rho))


def trace_norm(m) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.sum(np.abs(hermitian_eigenvalues(m))))
