"""Domain types and label utilities for multi-graph stochastic block models.

A *multi-graph* is a stack of T simple undirected graphs (layers) on a shared
node set.  Under the block model every node carries a latent class label and
each layer t has its own K x K symmetric class-connection matrix; the label
vector is shared across layers.  This module holds the in-memory containers
plus the permutation-invariant label utilities (Hungarian-style alignment,
accuracy, block statistics, and the majority-mismatch count r(z)).

Class indices are 0-based everywhere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class MultiGraph:
    """T symmetric binary N x N adjacency layers on a common node set.

    ``layers`` has shape (T, N, N) with entries in {0, 1}, zero diagonal.
    """

    layers: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.layers)
        if A.ndim != 3 or A.shape[1] != A.shape[2]:
            raise ValueError(f"layers must have shape (T, N, N), got {A.shape}")
        if not np.isin(A, (0, 1)).all():
            raise ValueError("adjacency entries must be 0 or 1")
        if not (A == np.swapaxes(A, 1, 2)).all():
            raise ValueError("every layer must be symmetric")
        if np.diagonal(A, axis1=1, axis2=2).any():
            raise ValueError("layers must have zero diagonal (no self-edges)")
        object.__setattr__(self, "layers", A.astype(np.uint8, copy=False))

    @property
    def num_layers(self) -> int:
        return self.layers.shape[0]

    @property
    def num_nodes(self) -> int:
        return self.layers.shape[1]


@dataclass(frozen=True)
class ClassLabels:
    """A length-N assignment of nodes into K classes (entries in 0..K-1)."""

    num_classes: int
    labels: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.labels, dtype=np.int64)
        if self.num_classes < 1:
            raise ValueError("num_classes must be positive")
        if z.ndim != 1:
            raise ValueError("labels must be a 1-d vector")
        if z.size and (z.min() < 0 or z.max() >= self.num_classes):
            raise ValueError("label out of range")
        object.__setattr__(self, "labels", z)

    @property
    def num_nodes(self) -> int:
        return self.labels.size

    def all_classes_nonempty(self) -> bool:
        return np.unique(self.labels).size == self.num_classes


@dataclass(frozen=True)
class ProbArray:
    """Per-layer K x K symmetric class-connection probability matrices.

    ``mats`` has shape (T, K, K), entries in [0, 1].  The edge-probability
    matrix of layer t is mats[t][z_i, z_j] for node pair (i, j).
    """

    mats: np.ndarray

    def __post_init__(self):
        P = np.asarray(self.mats, dtype=float)
        if P.ndim != 3 or P.shape[1] != P.shape[2]:
            raise ValueError(f"mats must have shape (T, K, K), got {P.shape}")
        if P.min(initial=0.0) < 0.0 or P.max(initial=0.0) > 1.0:
            raise ValueError("probabilities must lie in [0, 1]")
        if not np.allclose(P, np.swapaxes(P, 1, 2)):
            raise ValueError("each layer's matrix must be symmetric")
        object.__setattr__(self, "mats", P)

    @property
    def num_layers(self) -> int:
        return self.mats.shape[0]

    @property
    def num_classes(self) -> int:
        return self.mats.shape[1]


@dataclass(frozen=True)
class BlockStats:
    """Block-level counts induced by a labeling z on a multi-graph.

    class_sizes : (K,) class sizes n_k.
    pair_counts : (K, K) symmetric; n_kl = n_k * n_l for k != l and
                  n_k (n_k - 1) / 2 on the diagonal (unordered node pairs).
    edge_counts : (T, K, K) symmetric; o^t_kl counts each undirected edge
                  once (within-class blocks use the half-count convention).
    """

    class_sizes: np.ndarray
    pair_counts: np.ndarray
    edge_counts: np.ndarray


@dataclass
class FitResult:
    """Outcome of a label-estimation routine."""

    labels: ClassLabels
    objective: float
    iterations: int
    converged: bool
    seed: int
    icl: Optional[float] = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not np.isfinite(self.objective):
            raise ValueError("objective must be finite")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


# ---------------------------------------------------------------------------
# label utilities
# ---------------------------------------------------------------------------

# K up to this bound uses exhaustive permutation search, which makes the
# "lexicographically smallest optimal permutation" tie-break exact.
_EXHAUSTIVE_K = 8


def confusion_matrix(est: ClassLabels, ref: ClassLabels) -> np.ndarray:
    """C[a, b] = number of nodes with est label a and ref label b."""
    if est.num_nodes != ref.num_nodes:
        raise ValueError("label vectors must have the same length")
    K = max(est.num_classes, ref.num_classes)
    C = np.zeros((K, K), dtype=np.int64)
    np.add.at(C, (est.labels, ref.labels), 1)
    return C


def align_labels(est: ClassLabels, ref: ClassLabels) -> np.ndarray:
    """Class permutation maximizing agreement between est and ref.

    Returns perm with perm[a] = the ref-class matched to est-class a, chosen
    to maximize sum_i 1[perm[est_i] == ref_i].  Among optima the
    lexicographically smallest permutation is returned (exact for K <= 8;
    larger K falls back to a single assignment-problem solution).
    """
    if est.num_nodes != ref.num_nodes:
        raise ValueError("label vectors must have the same length")
    if est.num_classes != ref.num_classes:
        raise ValueError("label vectors must have the same number of classes")
    K = est.num_classes
    C = confusion_matrix(est, ref)
    if K <= _EXHAUSTIVE_K:
        best, best_perm = -1, None
        for perm in itertools.permutations(range(K)):
            agree = int(C[np.arange(K), perm].sum())
            if agree > best:
                best, best_perm = agree, perm
        return np.array(best_perm, dtype=np.int64)
    from scipy.optimize import linear_sum_assignment

    _, cols = linear_sum_assignment(-C)
    return cols.astype(np.int64)


def accuracy(est: ClassLabels, truth: ClassLabels) -> float:
    """Fraction of correctly labeled nodes after optimal class alignment."""
    perm = align_labels(est, truth)
    return float(np.mean(perm[est.labels] == truth.labels))


def block_stats(z: ClassLabels, G: MultiGraph) -> BlockStats:
    """Class sizes, pair counts, and per-layer block edge counts under z."""
    if z.num_nodes != G.num_nodes:
        raise ValueError("labels and graph disagree on the number of nodes")
    K = z.num_classes
    sizes = np.bincount(z.labels, minlength=K)
    pair = np.outer(sizes, sizes)
    np.fill_diagonal(pair, sizes * (sizes - 1) // 2)

    Z = np.zeros((z.num_nodes, K), dtype=np.int64)
    Z[np.arange(z.num_nodes), z.labels] = 1
    # Z' G Z double-counts within-class edges; halve the diagonal.
    O = np.einsum("ik,tij,jl->tkl", Z, G.layers.astype(np.int64), Z)
    d = np.einsum("tkk->tk", O)
    d //= 2
    return BlockStats(class_sizes=sizes, pair_counts=pair, edge_counts=O)


def majority_mismatch_r(z: ClassLabels, c: ClassLabels) -> int:
    """Number of nodes whose true class is not the strict majority of their
    z-class.  A tied vote means no majority: all nodes of that z-class count
    as mismatched."""
    if z.num_nodes != c.num_nodes:
        raise ValueError("label vectors must have the same length")
    r = 0
    for k in range(z.num_classes):
        members = c.labels[z.labels == k]
        if members.size == 0:
            continue
        counts = np.bincount(members)
        top = counts.max()
        if (counts == top).sum() > 1:  # tie: no majority
            r += members.size
        else:
            r += members.size - int(top)
    return r
