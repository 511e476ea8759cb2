"""Point-cloud geometry, Stiefel frames and projection distortion bounds."""

import numpy as np
from scipy.linalg import subspace_angles

from .errors import DimensionMismatch, InputError

#: Frobenius tolerance for ``P.T @ P == I``.
ORTHONORMAL_TOL = 1e-10


def as_point_cloud(X):
    """Validate ``X`` as an ``(m, n)`` float array with ``m, n >= 1``."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise InputError(f"point cloud must be a non-empty 2-D array, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise InputError("point cloud contains non-finite coordinates")
    return X


def is_stiefel(P, tol=ORTHONORMAL_TOL):
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[1] > P.shape[0]:
        return False
    k = P.shape[1]
    return bool(np.linalg.norm(P.T @ P - np.eye(k)) <= tol)


def check_stiefel(P, tol=ORTHONORMAL_TOL):
    """Return ``P`` as a float array, raising if its columns are not orthonormal."""
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[1] > P.shape[0] or P.shape[1] < 1:
        raise DimensionMismatch(f"projection must be n x k with 1 <= k <= n, got {P.shape}")
    if not is_stiefel(P, tol):
        err = np.linalg.norm(P.T @ P - np.eye(P.shape[1]))
        raise InputError(f"projection columns are not orthonormal (||P^T P - I||_F = {err:.3g})")
    return P


def coordinate_frame(n, axes):
    """Stiefel frame selecting the coordinate ``axes`` of ``R^n``.

    >>> coordinate_frame(3, [0, 1]).shape
    (3, 2)
    """
    P = np.zeros((n, len(axes)))
    P[list(axes), np.arange(len(axes))] = 1.0
    return P


def pairwise_distances(X):
    """Euclidean distance matrix of the rows of ``X``.

    The result is exactly symmetric with an exactly zero diagonal.
    """
    X = as_point_cloud(X)
    diff = X[:, None, :] - X[None, :, :]
    D = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    D = np.maximum(D, D.T)
    np.fill_diagonal(D, 0.0)
    return D


def diameter(X):
    """Largest pairwise distance of ``X`` (0 for a single point)."""
    return float(pairwise_distances(X).max())


def project(X, P):
    """Image ``X @ P`` of the cloud under the frame ``P``; row ``i`` maps to row ``i``."""
    X = as_point_cloud(X)
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or X.shape[1] != P.shape[0]:
        raise DimensionMismatch(
            f"cannot project points of dimension {X.shape[1]} with a {P.shape} frame")
    return X @ P


def eta_bounds(X, P):
    """Smallest and largest distance contraction over distinct point pairs.

    For each pair ``a != b`` the contraction is ``|a - b| - |La - Lb|``
    where ``L`` is the orthogonal projection onto the column span of ``P``.

    Parameters
    ----------
    X : ndarray, shape (m, n)
        Point cloud, ``m >= 2``.
    P : ndarray, shape (n, k)
        Column-orthonormal frame.

    Returns
    -------
    eta_min, eta_max : float
        Both are non-negative; round-off below zero is clipped.
    """
    X = as_point_cloud(X)
    if X.shape[0] < 2:
        raise InputError("eta bounds need at least two points")
    P = check_stiefel(P)
    DX = pairwise_distances(X)
    DY = pairwise_distances(project(X, P))
    iu = np.triu_indices(X.shape[0], k=1)
    eta = np.clip(DX[iu] - DY[iu], 0.0, None)
    return float(eta.min()), float(eta.max())


def principal_angles(A, B):
    """Principal angles (ascending) between the column spans of two frames.

    Uses the sine/cosine formulation of :func:`scipy.linalg.subspace_angles`,
    which stays accurate for angles near zero where ``arccos`` does not.
    """
    return np.sort(subspace_angles(np.asarray(A, dtype=float), np.asarray(B, dtype=float)))
