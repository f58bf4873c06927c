"""Smallest eigenvalues of the assembled operators.

Two routes: a dense LAPACK oracle for verification at desk scale, and a
Lanczos iteration with full reorthogonalization for larger instances. The
iterative solver is deterministic given its starting-vector seed and fails
loudly, carrying its best residuals, when the iteration cap is hit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .discretize import DiscreteOperator
from .errors import ConvergenceError

DENSE_LIMIT = 8192

_CHECK_EVERY = 10


@dataclass(frozen=True)
class SpectralResult:
    k: int
    eigenvalues: np.ndarray
    residuals: np.ndarray
    method: str
    iterations: int = 0
    start_seed: Optional[int] = None


def _check_dense_size(op: DiscreteOperator, dense_limit: int) -> None:
    if op.size > dense_limit:
        raise ValueError(
            f"operator size {op.size} exceeds the dense limit {dense_limit}"
        )


def dense_eigenvalues(op: DiscreteOperator,
                      dense_limit: int = DENSE_LIMIT) -> np.ndarray:
    """Full ascending spectrum via LAPACK; desk-scale sizes only."""
    _check_dense_size(op, dense_limit)
    return np.linalg.eigvalsh(op.to_dense())


def smallest_eigs_dense(op: DiscreteOperator, k: int,
                        dense_limit: int = DENSE_LIMIT) -> SpectralResult:
    """First k eigenpairs of the dense symmetric decomposition."""
    _check_dense_size(op, dense_limit)
    if not 1 <= k <= op.size:
        raise ValueError(f"k must be in [1, {op.size}], got {k}")
    vals, vecs = scipy.linalg.eigh(op.to_dense(), subset_by_index=(0, k - 1))
    resid = np.linalg.norm(op.matvec(vecs) - vecs * vals, axis=0)
    return SpectralResult(k, vals, resid, method="dense")


def count_eigs_below(op: DiscreteOperator, energy: float,
                     dense_limit: int = DENSE_LIMIT) -> int:
    """Number of eigenvalues at or below the energy (closed interval)."""
    w = dense_eigenvalues(op, dense_limit)
    return int(np.searchsorted(w, energy, side="right"))


def _fresh_directions(rng, basis, cols) -> np.ndarray:
    """Random directions orthogonalized against the current basis."""
    w = rng.standard_normal((basis.shape[0], cols))
    for _ in range(2):
        w -= basis @ (basis.T @ w)
    return w


def smallest_eigs_iterative(op: DiscreteOperator, k: int, tol: float = 1e-10,
                            maxiter: Optional[int] = None,
                            start_seed: int = 0,
                            block: Optional[int] = None) -> SpectralResult:
    """Block Lanczos with full reorthogonalization, k smallest eigenvalues.

    The block size defaults to k so that eigenvalue multiplicities within
    the bottom of the spectrum are captured (a single Lanczos vector is
    blind to repeated eigenvalues, which the free operator has in d >= 2).
    Iterates until the k lowest Ritz pairs have true residuals at most tol;
    a subspace of the full dimension makes the answer exact, so convergence
    can only fail by capping the subspace with maxiter.
    """
    n = op.size
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    width = min(block if block is not None else k, n)
    if width < 1:
        raise ValueError(f"block size must be >= 1, got {width}")
    cap = n if maxiter is None else min(maxiter, n)
    if cap < k:
        raise ValueError(f"maxiter={maxiter} cannot hold {k} eigenpairs")

    rng = np.random.default_rng(start_seed)
    tiny = 64 * np.finfo(float).eps * max(op.norm_bound(), 1.0)

    basis = np.zeros((n, cap))
    # projected matrix V^T A V; block tridiagonal up to rounding
    proj = np.zeros((cap, cap))
    size = 0
    steps_since_check = 0
    banded = True
    best: Optional[tuple[np.ndarray, np.ndarray]] = None

    new_block, _ = np.linalg.qr(rng.standard_normal((n, min(width, cap))))
    while size < cap:
        b_cur = new_block.shape[1]
        basis[:, size:size + b_cur] = new_block
        image = op.matvec(new_block)
        coeffs = basis[:, :size + b_cur].T @ image
        proj[: size + b_cur, size:size + b_cur] = coeffs
        proj[size:size + b_cur, : size + b_cur] = coeffs.T
        size += b_cur
        steps_since_check += 1

        exhausted = size >= cap
        if size >= k and (exhausted or steps_since_check >= _CHECK_EVERY):
            steps_since_check = 0
            if banded:
                # full reorthogonalization keeps the projection block
                # tridiagonal to rounding; the banded solve is O(size^2)
                stripes = np.zeros((width + 1, size))
                for off in range(width + 1):
                    stripes[off, : size - off] = np.diagonal(
                        proj[:size, :size], offset=-off)
                vals, ritz = scipy.linalg.eig_banded(
                    stripes, lower=True, select="i", select_range=(0, k - 1))
            else:
                vals, ritz = scipy.linalg.eigh(
                    proj[:size, :size], subset_by_index=(0, k - 1))
            vecs = basis[:, :size] @ ritz
            resid = np.linalg.norm(op.matvec(vecs) - vecs * vals, axis=0)
            best = (vals, resid)
            if np.all(resid <= tol):
                return SpectralResult(k, vals, resid, method="iterative",
                                      iterations=size, start_seed=start_seed)
        if exhausted:
            break

        # next block: residual of the image, fully reorthogonalized twice
        b_next = min(width, cap - size)
        image = image[:, :b_next] - basis[:, :size] @ coeffs[:size, :b_next]
        image -= basis[:, :size] @ (basis[:, :size].T @ image)
        q, r = np.linalg.qr(image)
        dead = np.abs(np.diag(r)) <= tiny
        if np.any(dead):
            # Krylov space closed along some directions: continue afresh;
            # replacement columns may couple outside the band
            banded = False
            repl = _fresh_directions(rng, basis[:, :size], int(dead.sum()))
            q[:, dead] = repl
            q, _ = np.linalg.qr(q)
            q -= basis[:, :size] @ (basis[:, :size].T @ q)
            norms = np.linalg.norm(q, axis=0)
            if np.any(norms <= tiny):
                break
            q /= norms
        new_block = q

    vals, resid = best if best is not None else (np.array([]), np.array([]))
    raise ConvergenceError(
        f"block Lanczos did not reach residual {tol:g} with a subspace of "
        f"{size} vectors (best residuals: {resid})",
        eigenvalues=vals, residuals=resid, iterations=size,
    )
