"""Seeded samplers for multi-graph block-model instances.

Everything here is deterministic given (inputs, seed).  Layer-level draws use
independent child streams spawned from a single root ``SeedSequence`` so a
parallel implementation over layers would reproduce the sequential result
bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import ClassLabels, MultiGraph, ProbArray

_ATOL = 1e-12


@dataclass(frozen=True)
class PProcessSpec:
    """A process generating the per-layer class-connection matrices.

    kind:
      constant         -- every layer equals ``base[0]``.
      finite-mixture   -- each layer drawn iid from ``base`` with ``weights``.
      noisy-stationary -- base[0] plus iid uniform noise on [-eps, eps] per
                          entry (symmetrized); requires base[0] +- eps within
                          [0, 1] so no truncation biases the mean.
    """

    kind: str
    base: tuple
    num_layers: int
    weights: Optional[tuple] = None
    eps: float = 0.0

    def __post_init__(self):
        if self.kind not in ("constant", "finite-mixture", "noisy-stationary"):
            raise ValueError(f"unknown process kind {self.kind!r}")
        if self.num_layers < 1:
            raise ValueError("num_layers must be positive")
        mats = tuple(np.asarray(m, dtype=float) for m in self.base)
        if not mats:
            raise ValueError("at least one base matrix required")
        K = mats[0].shape[0]
        for m in mats:
            if m.shape != (K, K):
                raise ValueError("base matrices must share a common K x K shape")
            if not np.allclose(m, m.T):
                raise ValueError("base matrices must be symmetric")
            if m.min() < 0.0 or m.max() > 1.0:
                raise ValueError("base matrix entries must lie in [0, 1]")
        object.__setattr__(self, "base", mats)
        if self.kind == "finite-mixture":
            if self.weights is None or len(self.weights) != len(mats):
                raise ValueError("finite-mixture needs one weight per matrix")
            w = np.asarray(self.weights, dtype=float)
            if (w < 0).any() or abs(w.sum() - 1.0) > _ATOL:
                raise ValueError("mixture weights must sum to 1")
            object.__setattr__(self, "weights", tuple(float(x) for x in w))
        if self.kind == "noisy-stationary":
            if self.eps < 0:
                raise ValueError("eps must be nonnegative")
            M = mats[0]
            if (M - self.eps < -_ATOL).any() or (M + self.eps > 1.0 + _ATOL).any():
                raise ValueError(
                    "noisy-stationary requires base +- eps within [0, 1]; "
                    "truncation would bias the stationary mean"
                )

    @property
    def num_classes(self) -> int:
        return self.base[0].shape[0]


def _symmetrize_noise(rng: np.random.Generator, K: int, eps: float) -> np.ndarray:
    noise = rng.uniform(-eps, eps, size=(K, K))
    iu = np.triu_indices(K, 1)
    noise[(iu[1], iu[0])] = noise[iu]
    return noise


def sample_p_array(spec: PProcessSpec, seed: int) -> ProbArray:
    """Draw the T per-layer matrices independently across layers."""
    T = spec.num_layers
    if spec.kind == "constant":
        return ProbArray(np.repeat(spec.base[0][None], T, axis=0))
    children = np.random.SeedSequence(seed).spawn(T)
    mats = np.empty((T, spec.num_classes, spec.num_classes))
    for t, child in enumerate(children):
        rng = np.random.default_rng(child)
        if spec.kind == "finite-mixture":
            idx = rng.choice(len(spec.base), p=spec.weights)
            mats[t] = spec.base[idx]
        else:  # noisy-stationary
            mats[t] = spec.base[0] + _symmetrize_noise(rng, spec.num_classes, spec.eps)
    return ProbArray(mats)


def sample_multigraph(c: ClassLabels, P: ProbArray, seed: int) -> MultiGraph:
    """Sample each layer's edges independently: pair (i, j) is Bernoulli with
    probability P^t[c_i, c_j]."""
    if P.num_classes < c.num_classes:
        raise ValueError("probability array has fewer classes than the labels")
    N, T = c.num_nodes, P.num_layers
    children = np.random.SeedSequence(seed).spawn(T)
    iu = np.triu_indices(N, 1)
    layers = np.zeros((T, N, N), dtype=np.uint8)
    for t, child in enumerate(children):
        rng = np.random.default_rng(child)
        phi = P.mats[t][np.ix_(c.labels, c.labels)]
        draw = (rng.random(iu[0].size) < phi[iu]).astype(np.uint8)
        layers[t][iu] = draw
        layers[t][(iu[1], iu[0])] = draw
    return MultiGraph(layers)


def planted_partition(K: int, p_in: float, p_out: float) -> np.ndarray:
    """K x K matrix with p_in on the diagonal and p_out elsewhere."""
    if not (0.0 <= p_in <= 1.0 and 0.0 <= p_out <= 1.0):
        raise ValueError("p_in and p_out must lie in [0, 1]")
    M = np.full((K, K), p_out, dtype=float)
    np.fill_diagonal(M, p_in)
    return M


def sample_labels(pi: Sequence[float], N: int, seed: int) -> ClassLabels:
    """Draw N iid labels from the class-probability vector pi."""
    pi = np.asarray(pi, dtype=float)
    if (pi < 0).any() or abs(pi.sum() - 1.0) > 1e-9:
        raise ValueError("pi must be a probability vector")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    labels = rng.choice(pi.size, size=N, p=pi / pi.sum())
    return ClassLabels(num_classes=pi.size, labels=labels)


def balanced_labels(K: int, N: int) -> ClassLabels:
    """Deterministic contiguous-block labeling, sizes as equal as possible."""
    return ClassLabels(num_classes=K, labels=np.arange(N) * K // N)
