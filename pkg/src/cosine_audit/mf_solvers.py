"""Closed-form solvers for the two regularized factorization objectives.

Objective 1 ("product-reg") penalizes the product of the factors:
    ||X - X A B^T||_F^2 + lambda * ||A B^T||_F^2
Its minimizer is A = B = V_k diag((1 + lambda/sigma_i^2)^(-1/2)) and is only
determined up to an arbitrary diagonal rescaling of the latent dimensions
(see the rescale module).

Objective 2 ("split-reg") penalizes the user and item factors separately:
    ||X - X A B^T||_F^2 + lambda * (||X A||_F^2 + ||B||_F^2)
Its minimizer is unique up to rotation:
    A = V_k diag(sqrt((1/sigma_i) * max(0, 1 - lambda/sigma_i)))
    B = V_k diag(sqrt(sigma_i * max(0, 1 - lambda/sigma_i)))

A full-batch gradient-descent oracle is included for independent
verification of both closed forms on small instances.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .matrix_core import as_matrix, svd

OBJECTIVE_PRODUCT_REG = "product-reg"
OBJECTIVE_SPLIT_REG = "split-reg"


@dataclass(frozen=True)
class EmbeddingPair:
    """Fitted factor pair (A, B) plus the training metadata needed downstream."""

    A: np.ndarray          # (p, k) item-side map; user embeddings are rows of X @ A
    B: np.ndarray          # (p, k) item embeddings as rows
    lam: float
    rank: int
    objective: str         # "product-reg" | "split-reg", "+scaled"/"+rotated" markers appended
    sigma: np.ndarray      # top-k singular values of the training matrix

    def __post_init__(self):
        assert self.A.shape == self.B.shape
        assert self.A.shape[1] == self.rank

    def with_factors(self, A: np.ndarray, B: np.ndarray, marker: str) -> "EmbeddingPair":
        objective = self.objective
        if not objective.endswith("+" + marker):
            objective = objective + "+" + marker
        return replace(self, A=A, B=B, objective=objective)


def _check_rank(X: np.ndarray, k: int) -> None:
    if not 1 <= k <= min(X.shape):
        raise ValueError(f"rank k={k} out of range [1, {min(X.shape)}]")


def _positive_mask(sigma: np.ndarray) -> np.ndarray:
    # relative threshold: sigma below sigma_1 * 1e-12 counts as zero
    return sigma > (sigma[0] if sigma[0] > 0 else 1.0) * 1e-12


def _warn_if_deficient(mask: np.ndarray, k: int) -> None:
    n_zero = k - int(np.count_nonzero(mask))
    if n_zero:
        warnings.warn(
            f"{n_zero} of the top {k} singular values are zero; "
            "the corresponding embedding dimensions are zero-padded",
            RuntimeWarning, stacklevel=3)


def solve_objective1(X: np.ndarray, k: int, lam: float) -> EmbeddingPair:
    """Closed form of the product-regularized objective (symmetric split)."""
    X = as_matrix(X)
    _check_rank(X, k)
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    f = svd(X, k)
    s = f.singular_values
    pos = _positive_mask(s)
    _warn_if_deficient(pos, k)
    shrink = np.where(pos, 1.0 / (1.0 + lam / np.where(pos, s, 1.0) ** 2), 0.0)
    A = f.right * np.sqrt(shrink)
    return EmbeddingPair(A=A, B=A.copy(), lam=lam, rank=k,
                         objective=OBJECTIVE_PRODUCT_REG, sigma=s.copy())


def solve_objective2(X: np.ndarray, k: int, lam: float) -> EmbeddingPair:
    """Closed form of the split-regularized objective (unique up to rotation)."""
    X = as_matrix(X)
    _check_rank(X, k)
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    f = svd(X, k)
    s = f.singular_values
    pos = _positive_mask(s)
    _warn_if_deficient(pos, k)
    safe = np.where(pos, s, 1.0)
    gain = np.where(pos, np.maximum(0.0, 1.0 - lam / safe), 0.0)
    A = f.right * np.sqrt(gain / safe)
    B = f.right * np.sqrt(gain * safe)
    return EmbeddingPair(A=A, B=B, lam=lam, rank=k,
                         objective=OBJECTIVE_SPLIT_REG, sigma=s.copy())


def objective1_loss(X, A, B, lam: float) -> float:
    X, A, B = as_matrix(X), as_matrix(A), as_matrix(B)
    M = A @ B.T
    r = X - X @ M
    return float(np.sum(r * r) + lam * np.sum(M * M))


def objective2_loss(X, A, B, lam: float) -> float:
    X, A, B = as_matrix(X), as_matrix(A), as_matrix(B)
    XA = X @ A
    r = X - XA @ B.T
    return float(np.sum(r * r) + lam * (np.sum(XA * XA) + np.sum(B * B)))


def predicted_scores(X, pair: EmbeddingPair) -> np.ndarray:
    """Score matrix X @ A @ B^T; invariant under diagonal rescaling and rotation."""
    X = as_matrix(X)
    return (X @ pair.A) @ pair.B.T


def objective1_gradients(X, A, B, lam: float) -> tuple[np.ndarray, np.ndarray]:
    M = A @ B.T
    G = -2.0 * X.T @ (X - X @ M) + 2.0 * lam * M
    return G @ B, G.T @ A


def objective2_gradients(X, A, B, lam: float) -> tuple[np.ndarray, np.ndarray]:
    XA = X @ A
    r = X - XA @ B.T
    gA = -2.0 * X.T @ (r @ B) + 2.0 * lam * (X.T @ XA)
    gB = -2.0 * r.T @ XA + 2.0 * lam * B
    return gA, gB


_LOSSES = {OBJECTIVE_PRODUCT_REG: objective1_loss, OBJECTIVE_SPLIT_REG: objective2_loss}
_GRADS = {OBJECTIVE_PRODUCT_REG: objective1_gradients,
          OBJECTIVE_SPLIT_REG: objective2_gradients}


class OracleDivergence(RuntimeError):
    def __init__(self, last_loss: float):
        self.last_loss = last_loss
        super().__init__(f"gradient descent diverged; last finite loss {last_loss}")


def gradient_descent_oracle(X, k: int, lam: float, objective: str,
                            iters: int = 200_000, step: float = 1e-3,
                            seed: int = 0, rel_tol: float = 1e-13) -> EmbeddingPair:
    """Independent full-batch gradient-descent check of either closed form.

    Intended for small instances only (n, p <= 50). The step is halved
    whenever a candidate update would increase the loss; iteration stops
    early once the relative loss improvement over a 100-step window falls
    below rel_tol.
    """
    if objective not in _LOSSES:
        raise ValueError(f"unknown objective {objective!r}")
    X = as_matrix(X)
    _check_rank(X, k)
    loss_fn, grad_fn = _LOSSES[objective], _GRADS[objective]
    rng = np.random.default_rng(seed)
    p = X.shape[1]
    A = 0.01 * rng.standard_normal((p, k))
    B = 0.01 * rng.standard_normal((p, k))

    loss = loss_fn(X, A, B, lam)
    window_loss = loss
    for it in range(iters):
        gA, gB = grad_fn(X, A, B, lam)
        while True:
            cand_A = A - step * gA
            cand_B = B - step * gB
            cand_loss = loss_fn(X, cand_A, cand_B, lam)
            if np.isfinite(cand_loss) and cand_loss <= loss:
                break
            step *= 0.5
            if step < 1e-18:
                if not np.isfinite(cand_loss):
                    raise OracleDivergence(loss)
                cand_A, cand_B, cand_loss = A, B, loss
                break
        A, B, loss = cand_A, cand_B, cand_loss
        if it % 100 == 99:
            if window_loss - loss <= rel_tol * max(1.0, abs(loss)):
                break
            window_loss = loss

    sigma = svd(X, k).singular_values
    return EmbeddingPair(A=A, B=B, lam=lam, rank=k, objective=objective,
                         sigma=sigma)
