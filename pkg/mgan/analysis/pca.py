""" Principal component projection by power iteration with deflation
    License: MIT
"""

from typing import Tuple, Union

import numpy as np

from mgan.utilities import check_finite

PCA_TOLERANCE = 1e-10
PCA_MAX_ITER = 10_000
PCA_START_SEED = 0


def _fix_sign(vec: np.ndarray) -> np.ndarray:
    """flip so the loading of largest magnitude is positive"""
    pivot = int(np.argmax(np.abs(vec)))
    return -vec if vec[pivot] < 0 else vec


def _leading_eigenvector(
    cov: np.ndarray, found: np.ndarray, tol: float, max_iter: int
) -> Tuple[np.ndarray, float]:
    """power iteration restricted to the complement of the rows of `found`"""
    dim = cov.shape[0]
    if np.linalg.norm(cov, axis=0).max(initial=0.0) <= tol:
        return np.zeros(dim), 0.0
    # a covariance column can sit exactly on a minor eigenvector
    vec = np.random.default_rng(PCA_START_SEED).normal(size=dim)
    vec -= found.T @ (found @ vec)
    vec /= np.linalg.norm(vec)
    for _ in range(max_iter):
        nxt = cov @ vec
        nxt -= found.T @ (found @ nxt)
        size = np.linalg.norm(nxt)
        if size <= tol:
            return np.zeros(dim), 0.0
        nxt /= size
        if nxt @ vec < 0:
            nxt = -nxt
        done = np.linalg.norm(nxt - vec) < tol
        vec = nxt
        if done:
            break
    return _fix_sign(vec), float(vec @ cov @ vec)


def pca_components(
    vectors: Union[np.ndarray, list], n_components: int = 2, tol: float = PCA_TOLERANCE, max_iter: int = PCA_MAX_ITER
) -> Tuple[np.ndarray, np.ndarray]:
    """Top principal axes of a set of vectors

    Args:
        vectors (array-like): Data of shape `[m, d]`, `m >= 2`
        n_components (int): Number of axes
        tol (float): Convergence tolerance of the power iteration
        max_iter (int): Iteration cap per axis
    Returns:
        tuple: axes `[n_components, d]` (zero rows where no variance is left) and their variances
    Raises:
        ValueError: When fewer than two vectors are given"""
    data = check_finite(np.asarray(vectors, dtype=np.float64), "pca")
    if data.ndim != 2 or data.shape[0] < 2:
        raise ValueError(f"pca: needs a [m, d] array with m >= 2; got shape {data.shape}")
    centered = data - data.mean(axis=0)
    cov = centered.T @ centered / (data.shape[0] - 1)
    dim = data.shape[1]
    axes = np.zeros((n_components, dim), dtype=np.float64)
    variances = np.zeros(n_components, dtype=np.float64)
    for k in range(min(n_components, dim)):
        vec, var = _leading_eigenvector(cov, axes[:k], tol, max_iter)
        if var <= tol:
            break
        axes[k], variances[k] = vec, var
        cov = cov - var * np.outer(vec, vec)
    order = np.argsort(-variances, kind="stable")
    return axes[order], variances[order]


def pca_project(vectors: Union[np.ndarray, list], n_components: int = 2) -> np.ndarray:
    """Centered data projected onto the top principal axes

    Args:
        vectors (array-like): Data of shape `[m, d]`, `m >= 2`
        n_components (int): Output width
    Returns:
        np.ndarray: Shape `[m, n_components]`; all zeros when the data has no variance"""
    data = np.asarray(vectors, dtype=np.float64)
    axes, _ = pca_components(data, n_components)
    return (data - data.mean(axis=0)) @ axes.T
