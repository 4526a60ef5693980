"""Dense matrix primitives: truncated SVD, row normalization, cosine of rows.

All matrices are plain float64 numpy arrays. Tolerance conventions used
throughout the package: 1e-12 for exact algebraic identities on small
matrices, 1e-8 for orthonormality, 1e-6 for identities that flow through a
full SVD at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ZeroRowError

ZERO_NORM_THRESHOLD = 1e-300


@dataclass(frozen=True)
class SvdFactors:
    """Truncated SVD triple: ``left @ diag(singular_values) @ right.T``.

    Columns of `left` and `right` are orthonormal; singular values are
    sorted descending. Signs are fixed so the largest-magnitude entry of
    each right singular vector is positive.
    """

    left: np.ndarray
    singular_values: np.ndarray
    right: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.left * self.singular_values) @ self.right.T


def as_matrix(values) -> np.ndarray:
    """Coerce to a 2-D float64 array and reject non-finite entries."""
    m = np.asarray(values, dtype=np.float64)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite entries")
    return m


def svd(m: np.ndarray, r: int) -> SvdFactors:
    """Rank-r truncated SVD with a deterministic sign convention.

    The sign of each singular-vector pair is flipped so that the entry of
    largest magnitude in each right singular vector is positive, making the
    factors reproducible across runs and platforms.
    """
    m = as_matrix(m)
    n, p = m.shape
    if not 1 <= r <= min(n, p):
        raise ValueError(f"rank r={r} out of range [1, {min(n, p)}]")
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    u, s, vt = u[:, :r], s[:r], vt[:r, :]
    v = vt.T
    # sign convention keyed on the right singular vectors
    anchor = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[anchor, np.arange(r)])
    signs[signs == 0] = 1.0
    return SvdFactors(left=u * signs, singular_values=s, right=v * signs)


def row_norms(m: np.ndarray) -> np.ndarray:
    return np.linalg.norm(m, axis=1)


def normalize_rows(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Scale each row to unit Euclidean norm.

    Returns (normalized matrix, scale vector) where scale[i] = 1/||row_i||,
    so that the output equals diag(scale) @ m.

    Raises ZeroRowError for any row with (numerically) zero norm.
    """
    m = as_matrix(m)
    norms = row_norms(m)
    bad = np.flatnonzero(norms < ZERO_NORM_THRESHOLD)
    if bad.size:
        raise ZeroRowError(int(bad[0]))
    scale = 1.0 / norms
    return m * scale[:, None], scale


def cosine_of_rows(m1: np.ndarray, m2: np.ndarray) -> np.ndarray:
    """Pairwise cosine similarity between the rows of m1 and the rows of m2."""
    m1 = as_matrix(m1)
    m2 = as_matrix(m2)
    if m1.shape[1] != m2.shape[1]:
        raise ValueError(f"column mismatch: {m1.shape[1]} vs {m2.shape[1]}")
    n1, _ = normalize_rows(m1)
    n2, _ = normalize_rows(m2)
    return n1 @ n2.T
