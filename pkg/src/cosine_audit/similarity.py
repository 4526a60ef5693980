"""Similarity matrices between items, users, and user-item pairs.

Item embeddings are the rows of B; user embeddings are the rows of X @ A.
Each combination is available under both the cosine metric and the raw
dot product. Cosine depends on the diagonal rescaling gauge of the
product-regularized solver; the dot-product user-item matrix does not.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ZeroRowError
from .matrix_core import ZERO_NORM_THRESHOLD, as_matrix, cosine_of_rows, row_norms
from .mf_solvers import EmbeddingPair

KIND_ITEM_ITEM = "item-item"
KIND_USER_USER = "user-user"
KIND_USER_ITEM = "user-item"
METRIC_COSINE = "cosine"
METRIC_DOT = "dot"


@dataclass(frozen=True)
class SimilarityMatrix:
    values: np.ndarray
    kind: str    # item-item | user-user | user-item
    metric: str  # cosine | dot
    excluded_rows: tuple[int, ...] = ()
    excluded_cols: tuple[int, ...] = ()


def _zero_rows(m: np.ndarray) -> np.ndarray:
    return np.flatnonzero(row_norms(m) < ZERO_NORM_THRESHOLD)


def _cosine_sided(left: np.ndarray, right: np.ndarray, kind: str,
                  on_zero: str) -> SimilarityMatrix:
    zl, zr = _zero_rows(left), _zero_rows(right)
    if zl.size or zr.size:
        if on_zero == "raise":
            raise ZeroRowError(int((zl if zl.size else zr)[0]),
                               what="embedding row")
        # drop: exclude zero-norm entities from the matrix but report them
        keep_l = np.setdiff1d(np.arange(left.shape[0]), zl)
        keep_r = np.setdiff1d(np.arange(right.shape[0]), zr)
        left, right = left[keep_l], right[keep_r]
    if left.shape[0] == 0 or right.shape[0] == 0:
        values = np.zeros((left.shape[0], right.shape[0]))
    else:
        values = cosine_of_rows(left, right)
    return SimilarityMatrix(values=values, kind=kind, metric=METRIC_COSINE,
                            excluded_rows=tuple(int(i) for i in zl),
                            excluded_cols=tuple(int(i) for i in zr))


def _similarity(left: np.ndarray, right: np.ndarray, kind: str, metric: str,
                on_zero: str) -> SimilarityMatrix:
    if metric == METRIC_DOT:
        return SimilarityMatrix(values=left @ right.T, kind=kind, metric=METRIC_DOT)
    if metric != METRIC_COSINE:
        raise ValueError(f"unknown metric {metric!r}")
    return _cosine_sided(left, right, kind, on_zero)


def item_item(X, pair: EmbeddingPair, metric: str = METRIC_COSINE,
              on_zero: str = "raise") -> SimilarityMatrix:
    B = pair.B
    return _similarity(B, B, KIND_ITEM_ITEM, metric, on_zero)


def user_user(X, pair: EmbeddingPair, metric: str = METRIC_COSINE,
              on_zero: str = "raise") -> SimilarityMatrix:
    XA = as_matrix(X) @ pair.A
    return _similarity(XA, XA, KIND_USER_USER, metric, on_zero)


def user_item(X, pair: EmbeddingPair, metric: str = METRIC_COSINE,
              on_zero: str = "raise") -> SimilarityMatrix:
    XA = as_matrix(X) @ pair.A
    return _similarity(XA, pair.B, KIND_USER_ITEM, metric, on_zero)


def _tie_groups(row: np.ndarray, tol: float) -> list[frozenset]:
    """Ordered partition of column indices into descending tie groups.

    Consecutive sorted values closer than tol are merged into one group.
    """
    order = np.argsort(-row, kind="stable")
    vals = row[order]
    groups: list[frozenset] = []
    start = 0
    for i in range(1, len(order)):
        if vals[i - 1] - vals[i] > tol:
            groups.append(frozenset(order[start:i].tolist()))
            start = i
    groups.append(frozenset(order[start:].tolist()))
    return groups


def ranking_equal(s1: SimilarityMatrix, s2: SimilarityMatrix,
                  tol: float = 1e-9) -> np.ndarray:
    """Per-row flags: does row u of s1 rank the columns the same as row u of s2?

    Entries within tol of each other count as tied; tied groups must match
    as sets.
    """
    a, b = s1.values, s2.values
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    out = np.empty(a.shape[0], dtype=bool)
    for u in range(a.shape[0]):
        out[u] = _tie_groups(a[u], tol) == _tie_groups(b[u], tol)
    return out
