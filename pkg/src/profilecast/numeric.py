"""Small numerical kernel: z-scores, covariance, correlation, Jacobi eigensolver, distances.

Matrices are plain 2-D float64 numpy arrays (rows are observations).
Covariance uses the sample denominator ``n - 1``; standardization uses the
population denominator ``n``.
"""

import logging
from typing import NamedTuple

import numpy as np

from .errors import ConvergenceError, InsufficientDataError, ShapeError

logger = logging.getLogger(__name__)

JACOBI_MAX_SWEEPS = 100
JACOBI_TOL = 1e-12
SYMMETRY_TOL = 1e-9
_EPS = np.finfo(np.float64).eps


class Standardized(NamedTuple):
    values: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    constant: np.ndarray  # bool mask of zero-variance columns


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # column i pairs with eigenvalues[i]
    sweeps: int


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.float64)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ShapeError("matrix contains non-finite entries")
    return a


def _constant_mask(x, mean, std):
    return std <= 1e-12 * np.maximum(1.0, np.abs(mean))


def standardize(m) -> Standardized:
    """Column-wise z-scores with population std; constant columns become zeros."""
    x = as_matrix(m)
    if x.shape[0] == 0:
        raise InsufficientDataError("cannot standardize a matrix with no rows")
    mean = x.mean(axis=0)
    centered = x - mean
    std = np.sqrt((centered * centered).mean(axis=0))
    constant = _constant_mask(x, mean, std)
    safe = np.where(constant, 1.0, std)
    z = centered / safe
    z[:, constant] = 0.0
    if constant.any():
        logger.debug("standardize: %d constant column(s) mapped to zero", int(constant.sum()))
    return Standardized(z, mean, std, constant)


def covariance_matrix(m) -> np.ndarray:
    x = as_matrix(m)
    n = x.shape[0]
    if n < 2:
        raise InsufficientDataError(f"covariance needs at least 2 rows, got {n}")
    centered = x - x.mean(axis=0)
    cov = centered.T @ centered / (n - 1)
    return (cov + cov.T) / 2.0


def constant_columns(m) -> np.ndarray:
    x = as_matrix(m)
    mean = x.mean(axis=0)
    std = np.sqrt(((x - mean) ** 2).mean(axis=0))
    return _constant_mask(x, mean, std)


def pearson_correlation_matrix(m) -> np.ndarray:
    """Pearson correlation; constant columns correlate 0 with everything, including themselves."""
    x = as_matrix(m)
    if x.shape[0] < 2:
        raise InsufficientDataError(f"correlation needs at least 2 rows, got {x.shape[0]}")
    constant = constant_columns(x)
    cov = covariance_matrix(x)
    sd = np.sqrt(np.diag(cov))
    safe = np.where(constant, 1.0, sd)
    corr = cov / np.outer(safe, safe)
    corr[constant, :] = 0.0
    corr[:, constant] = 0.0
    live = ~constant
    corr[live, live] = 1.0
    np.clip(corr, -1.0, 1.0, out=corr)
    return corr


def _off_norm(a):
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return np.sqrt(np.sum(off * off))


def eigh_symmetric(a, max_sweeps: int = JACOBI_MAX_SWEEPS, tol: float = JACOBI_TOL) -> EigenDecomposition:
    """Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Converges when the off-diagonal Frobenius norm drops below
    ``tol * ||A||_F``. Eigenvalues are returned in descending order and each
    eigenvector is signed so that its largest-magnitude component is positive.
    """
    a = as_matrix(a).copy()
    n, m = a.shape
    if n != m:
        raise ShapeError(f"expected a square matrix, got {a.shape}")
    asym = np.max(np.abs(a - a.T)) if n else 0.0
    if asym > SYMMETRY_TOL * max(1.0, float(np.max(np.abs(a))) if n else 1.0):
        raise ShapeError(f"matrix is not symmetric (max |A - A^T| = {asym:.3e})")
    a = (a + a.T) / 2.0
    original = a.copy()
    v = np.eye(n)

    scale = np.sqrt(np.sum(a * a))
    target = tol * scale
    sweeps = 0
    while _off_norm(a) > target:
        if sweeps >= max_sweeps:
            resid = _residual(original, np.diag(a), v)
            raise ConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps (off-norm {_off_norm(a):.3e}, residual {resid:.3e})",
                residual=resid,
            )
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                diff = a[q, q] - a[p, p]
                if abs(apq) < 1e-300 + _EPS * 1e-3 * abs(diff):
                    # rotation angle below machine resolution
                    t = apq / diff
                else:
                    theta = diff / (2.0 * apq)
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # A <- J^T A J with J the (p, q) rotation
                ap = a[:, p].copy()
                aq = a[:, q]
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :]
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq

    vals = np.diag(a).copy()
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    v = v[:, order]
    for i in range(n):
        j = int(np.argmax(np.abs(v[:, i])))
        if v[j, i] < 0:
            v[:, i] = -v[:, i]
    return EigenDecomposition(vals, v, sweeps)


def _residual(a, vals, vecs):
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a @ vecs - vecs * vals)))


def euclidean_distance(x, y) -> float:
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise ShapeError(f"length mismatch: {x.size} vs {y.size}")
    d = x - y
    return float(np.sqrt(np.dot(d, d)))


def squared_distances(x, y) -> np.ndarray:
    """All squared Euclidean distances between rows of ``x`` and rows of ``y``.

    Computed from explicit differences rather than the ``|x|^2 - 2xy + |y|^2``
    expansion so that zero distances stay exactly zero.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape[1] != y.shape[1]:
        raise ShapeError(f"dimension mismatch: {x.shape[1]} vs {y.shape[1]}")
    diff = x[:, None, :] - y[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def pairwise_distances(x, y=None) -> np.ndarray:
    return np.sqrt(squared_distances(x, x if y is None else y))
