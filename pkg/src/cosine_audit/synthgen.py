"""Synthetic user-item interaction generator with known item clusters.

Items belong to one of C clusters; each cluster gets a power-law popularity
profile, users get Dirichlet cluster preferences, and each user samples a
power-law-distributed number of items without replacement.

Determinism contract: all randomness flows from a single 64-bit seed through
named child streams spawned in a fixed order
(clusters -> exponents -> popularities -> prefs -> activity -> picks),
so identical configs reproduce bit-identical outputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

MIN_ITEMS_PER_USER = 5
DIRICHLET_CONCENTRATION = 0.5

_STREAMS = ("clusters", "exponents", "popularities", "prefs", "activity", "picks")


@dataclass(frozen=True)
class SimConfig:
    n: int
    p: int
    C: int
    cluster_probs: tuple[float, ...]
    beta_item_min: float = 0.25
    beta_item_max: float = 1.5
    beta_user: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("n", "must be >= 1")
        if self.p < 1:
            raise ConfigError("p", "must be >= 1")
        if self.C < 1:
            raise ConfigError("C", "must be >= 1")
        probs = np.asarray(self.cluster_probs, dtype=np.float64)
        if probs.shape != (self.C,):
            raise ConfigError("cluster_probs", f"must have length C={self.C}")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-9:
            raise ConfigError("cluster_probs", "must be nonnegative and sum to 1")
        if self.beta_item_min > self.beta_item_max:
            raise ConfigError("beta_item_min", "must be <= beta_item_max")

    @classmethod
    def uniform_clusters(cls, n: int, p: int, C: int, **kw) -> "SimConfig":
        return cls(n=n, p=p, C=C, cluster_probs=tuple([1.0 / C] * C), **kw)

    @classmethod
    def from_json(cls, path) -> "SimConfig":
        with open(path) as f:
            raw = json.load(f)
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw: dict) -> "SimConfig":
        required = {"n", "p", "C", "cluster_probs", "beta_item_min",
                    "beta_item_max", "beta_user", "seed"}
        missing = required - raw.keys()
        if missing:
            raise ConfigError(sorted(missing)[0], "missing key")
        try:
            return cls(
                n=int(raw["n"]), p=int(raw["p"]), C=int(raw["C"]),
                cluster_probs=tuple(float(x) for x in raw["cluster_probs"]),
                beta_item_min=float(raw["beta_item_min"]),
                beta_item_max=float(raw["beta_item_max"]),
                beta_user=float(raw["beta_user"]),
                seed=int(raw["seed"]),
            )
        except (TypeError, ValueError) as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError("config", str(e)) from e

    def to_dict(self) -> dict:
        return {
            "n": self.n, "p": self.p, "C": self.C,
            "cluster_probs": list(self.cluster_probs),
            "beta_item_min": self.beta_item_min,
            "beta_item_max": self.beta_item_max,
            "beta_user": self.beta_user, "seed": self.seed,
        }


@dataclass(frozen=True)
class GroundTruth:
    item_cluster: np.ndarray       # (p,) ints in [0, C)
    item_popularity: np.ndarray    # (p,) positive reals
    cluster_exponents: np.ndarray  # (C,)
    user_prefs: np.ndarray         # (n, C), rows sum to 1

    def to_dict(self) -> dict:
        return {
            "item_cluster": self.item_cluster.tolist(),
            "item_popularity": self.item_popularity.tolist(),
            "cluster_exponents": self.cluster_exponents.tolist(),
            "user_prefs": self.user_prefs.tolist(),
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "GroundTruth":
        return cls(
            item_cluster=np.asarray(raw["item_cluster"], dtype=np.int64),
            item_popularity=np.asarray(raw["item_popularity"], dtype=np.float64),
            cluster_exponents=np.asarray(raw["cluster_exponents"], dtype=np.float64),
            user_prefs=np.asarray(raw["user_prefs"], dtype=np.float64),
        )


@dataclass(frozen=True)
class InteractionSample:
    matrix: np.ndarray          # (n, p) binary 0/1
    items_per_user: np.ndarray  # (n,) ints

    def __post_init__(self):
        assert self.matrix.shape[0] == self.items_per_user.shape[0]


def _streams(seed: int) -> dict[str, np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(len(_STREAMS))
    return {name: np.random.default_rng(ss) for name, ss in zip(_STREAMS, children)}


def sample_ground_truth(config: SimConfig) -> GroundTruth:
    rng = _streams(config.seed)
    probs = np.asarray(config.cluster_probs, dtype=np.float64)
    probs = probs / probs.sum()
    item_cluster = rng["clusters"].choice(config.C, size=config.p, p=probs)
    exponents = rng["exponents"].uniform(
        config.beta_item_min, config.beta_item_max, size=config.C)

    # Zipf-style popularity: within each cluster, items get rank 1..m in
    # generation order and p_i proportional to rank^(-beta_c).
    popularity = np.empty(config.p, dtype=np.float64)
    for c in range(config.C):
        members = np.flatnonzero(item_cluster == c)
        ranks = np.arange(1, members.size + 1, dtype=np.float64)
        popularity[members] = ranks ** (-exponents[c])

    prefs = rng["prefs"].dirichlet(
        np.full(config.C, DIRICHLET_CONCENTRATION), size=config.n)
    prefs = prefs / prefs.sum(axis=1, keepdims=True)
    return GroundTruth(item_cluster=item_cluster, item_popularity=popularity,
                       cluster_exponents=exponents, user_prefs=prefs)


def user_item_probabilities(gt: GroundTruth, user: int) -> np.ndarray:
    """Probability of user picking each item: prefs[cluster] * popularity, normalized."""
    if not 0 <= user < gt.user_prefs.shape[0]:
        raise IndexError(f"user {user} out of range")
    w = gt.user_prefs[user, gt.item_cluster] * gt.item_popularity
    return w / w.sum()


def _items_per_user(config: SimConfig, rng: np.random.Generator) -> np.ndarray:
    """Bounded-Pareto activity: k_u = round(k_min * u^(-beta)), clamped.

    beta_user = 0.5 is non-normalizable on unbounded support, so both ends
    are clamped: [k_min, p/2] with k_min = min(5, p).
    """
    k_min = min(MIN_ITEMS_PER_USER, config.p)
    k_max = max(k_min, config.p // 2)
    u = rng.random(config.n)
    k = np.rint(k_min * u ** (-config.beta_user))
    return np.clip(k, k_min, k_max).astype(np.int64)


def sample_interactions(config: SimConfig) -> tuple[InteractionSample, GroundTruth]:
    gt = sample_ground_truth(config)
    rng = _streams(config.seed)
    k_u = _items_per_user(config, rng["activity"])

    # Weighted sampling without replacement via Gumbel top-k: adding i.i.d.
    # Gumbel noise to log-weights and keeping the k largest keys draws k
    # distinct items with the sequential-renormalization probabilities.
    weights = gt.user_prefs[:, gt.item_cluster] * gt.item_popularity
    picks_rng = rng["picks"]
    matrix = np.zeros((config.n, config.p), dtype=np.float64)
    with np.errstate(divide="ignore"):
        log_w = np.log(weights)
    for u in range(config.n):
        keys = log_w[u] + picks_rng.gumbel(size=config.p)
        k = min(int(k_u[u]), int(np.count_nonzero(weights[u] > 0)))
        k_u[u] = k
        chosen = np.argpartition(keys, -k)[-k:]
        matrix[u, chosen] = 1.0
    return InteractionSample(matrix=matrix, items_per_user=k_u), gt


def ground_truth_similarity(gt: GroundTruth) -> np.ndarray:
    """p x p indicator matrix: 1 where two items share a cluster."""
    c = gt.item_cluster
    return (c[:, None] == c[None, :]).astype(np.float64)


def figure_item_order(gt: GroundTruth) -> np.ndarray:
    """Item permutation: by cluster, then descending popularity within cluster."""
    return np.lexsort((-gt.item_popularity, gt.item_cluster))
