"""Profile likelihood for multi-graph block models.

The profile log-likelihood of a labeling z is the complete log-likelihood
with every block probability replaced by its empirical block mean:

    f(z) = sum_t sum_{k<=l} n_kl * sigma(o^t_kl / n_kl),

where sigma(p) = p log p + (1-p) log(1-p) (natural log, sigma(0)=sigma(1)=0),
n_kl counts unordered node pairs in block (k, l) and o^t_kl the layer-t edges
among them.  Empty blocks contribute 0.

Two maximizers are provided: an exhaustive search over canonical assignments
(restricted growth strings, feasible for small N) and a greedy single-node
coordinate ascent with restarts for everything else.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .core import ClassLabels, FitResult, MultiGraph, ProbArray, block_stats

NEG_INF = float("-inf")


def sigma(p):
    """sigma(p) = p log p + (1-p) log(1-p); sigma(0) = sigma(1) = 0."""
    arr = np.asarray(p, dtype=float)
    if (arr < 0).any() or (arr > 1).any():
        raise ValueError("sigma requires p in [0, 1]")
    out = _sigma_unchecked(arr)
    return float(out) if np.isscalar(p) or arr.ndim == 0 else out


def _sigma_unchecked(arr: np.ndarray) -> np.ndarray:
    out = np.zeros_like(arr, dtype=float)
    m = (arr > 0) & (arr < 1)
    a = arr[m]
    out[m] = a * np.log(a) + (1.0 - a) * np.log1p(-a)
    return out


def profile_loglik(z: ClassLabels, G: MultiGraph) -> float:
    """f(z): layer-summed profile log-likelihood of the labeling z."""
    stats = block_stats(z, G)
    return _blocks_loglik(stats.pair_counts, stats.edge_counts)


def _blocks_loglik(pair_counts: np.ndarray, edge_counts: np.ndarray) -> float:
    K = pair_counts.shape[0]
    iu = np.triu_indices(K)
    n = pair_counts[iu].astype(float)
    o = edge_counts[:, iu[0], iu[1]].astype(float)
    mask = n > 0
    if not mask.any():
        return 0.0
    n = n[mask]
    return float(np.sum(n * _sigma_unchecked(o[:, mask] / n)))


def complete_loglik(z: ClassLabels, P: ProbArray, G: MultiGraph) -> float:
    """l(z, P) = sum_t sum_{i<j} [g log P_{z_i z_j} + (1-g) log(1-P_{z_i z_j})].

    Returns -inf when some block with an edge has probability exactly 0 (or a
    non-edge has probability exactly 1); the 0*log(0) convention applies
    otherwise.
    """
    stats = block_stats(z, G)
    n = stats.pair_counts.astype(float)[None]  # (1, K, K)
    o = stats.edge_counts.astype(float)  # (T, K, K)
    p = P.mats
    iu = np.triu_indices(z.num_classes)
    total = 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        le = np.where(o > 0, o * np.log(p), 0.0)
        ln = np.where(n - o > 0, (n - o) * np.log1p(-p), 0.0)
    vals = (le + ln)[:, iu[0], iu[1]]
    if np.isnan(vals).any() or np.isneginf(vals).any():
        return NEG_INF
    total = float(vals.sum())
    return total


class _BlockState:
    """Incrementally maintained block statistics for single-node moves.

    Keeps the one-hot label matrix, class sizes, and the (T, K, K) symmetric
    edge-count array (diagonal = within-class half counts) in sync while
    nodes move between classes, so each move costs O(T N K) instead of a full
    O(T N^2) recount.
    """

    def __init__(self, G: MultiGraph, labels: np.ndarray, K: int):
        self.G = G.layers.astype(np.float64)
        self.N = G.num_nodes
        self.K = K
        self.labels = np.array(labels, dtype=np.int64)
        self.Z = np.zeros((self.N, K))
        self.Z[np.arange(self.N), self.labels] = 1.0
        self.sizes = np.bincount(self.labels, minlength=K).astype(np.int64)
        stats = block_stats(ClassLabels(K, self.labels), G)
        self.O = stats.edge_counts.astype(np.float64)
        self._iu = np.triu_indices(K)

    def degree_by_class(self, i: int) -> np.ndarray:
        """(T, K) edges from node i into each class under current labels."""
        return self.G[:, i, :] @ self.Z

    def move(self, i: int, b: int, d: Optional[np.ndarray] = None) -> None:
        a = self.labels[i]
        if a == b:
            return
        if d is None:
            d = self.degree_by_class(i)
        O = self.O
        O[:, a, :] -= d
        O[:, :, a] -= d
        O[:, a, a] += d[:, a]
        O[:, b, :] += d
        O[:, :, b] += d
        O[:, b, b] -= d[:, b]
        self.sizes[a] -= 1
        self.sizes[b] += 1
        self.Z[i, a] = 0.0
        self.Z[i, b] = 1.0
        self.labels[i] = b

    def objective(self) -> float:
        sizes = self.sizes.astype(float)
        n = np.outer(sizes, sizes)
        np.fill_diagonal(n, sizes * (sizes - 1) / 2.0)
        nf = n[self._iu]
        o = self.O[:, self._iu[0], self._iu[1]]
        mask = nf > 0
        if not mask.any():
            return 0.0
        nf = nf[mask]
        return float(np.sum(nf * _sigma_unchecked(o[:, mask] / nf)))


# ---------------------------------------------------------------------------
# exhaustive maximization over canonical assignments
# ---------------------------------------------------------------------------


def count_canonical_assignments(N: int, K: int) -> int:
    """Number of partitions of N nodes into at most K classes (canonical
    assignments with the class-permutation symmetry removed)."""
    # Stirling numbers of the second kind, summed over 1..K parts.
    row = [1] + [0] * K  # S(0, j)
    for _ in range(N):
        new = [0] * (K + 1)
        for j in range(1, K + 1):
            new[j] = row[j - 1] + j * row[j]
        row = new
    return sum(row[1:])


def _canonical_steps(N: int, K: int) -> Iterator[list[tuple[int, int]]]:
    """Yield the move lists stepping through all canonical assignments.

    Assignments are restricted growth strings (z[0] = 0; each later entry at
    most one above the running prefix maximum, capped at K - 1) visited in
    lexicographic order starting from the all-zeros string.  Each yielded
    list of (node, new_class) moves transforms the current assignment into
    its successor.
    """
    z = [0] * N
    prefix_max = [0] * N  # prefix_max[i] = max(z[:i]) (0 for i = 0)
    while True:
        i = N - 1
        while i > 0 and not (z[i] < K - 1 and z[i] <= prefix_max[i]):
            i -= 1
        if i == 0:
            return
        moves = [(i, z[i] + 1)]
        z[i] += 1
        for j in range(i + 1, N):
            prefix_max[j] = max(prefix_max[j - 1], z[j - 1])
            if z[j] != 0:
                moves.append((j, 0))
                z[j] = 0
        yield moves


def exact_profile_mle(G: MultiGraph, K: int, cap: int = 10**7) -> FitResult:
    """Global maximizer of the profile log-likelihood by exhaustive search.

    Enumerates all assignments up to class permutation; ties are broken by
    the first maximizer found in canonical order and flagged in
    ``result.extra['tie']``.  Raises when the assignment count exceeds
    ``cap`` (use local_search_profile_mle instead for such sizes).
    """
    N = G.num_nodes
    if K < 1:
        raise ValueError("K must be positive")
    total = count_canonical_assignments(N, K)
    if total > cap:
        raise ValueError(
            f"{total} canonical assignments exceed the cap {cap}; "
            "use local_search_profile_mle for instances of this size"
        )
    state = _BlockState(G, np.zeros(N, dtype=np.int64), K)
    best = state.objective()
    best_labels = state.labels.copy()
    tie = False
    for moves in _canonical_steps(N, K):
        for i, b in moves:
            state.move(i, b)
        obj = state.objective()
        if obj > best:
            best, best_labels, tie = obj, state.labels.copy(), False
        elif obj == best and not np.array_equal(state.labels, best_labels):
            tie = True
    labels = ClassLabels(K, best_labels)
    return FitResult(
        labels=labels,
        objective=best,
        iterations=total,
        converged=True,
        seed=0,
        extra={"tie": tie, "assignments": total},
    )


# ---------------------------------------------------------------------------
# greedy local search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SearchOptions:
    restarts: int = 10
    max_sweeps: int = 100
    init: str = "spectral"  # random | spectral | given
    seed: int = 0
    given: Optional[ClassLabels] = None

    def __post_init__(self):
        if self.restarts < 1 or self.max_sweeps < 1:
            raise ValueError("restarts and max_sweeps must be >= 1")
        if self.init not in ("random", "spectral", "given"):
            raise ValueError(f"unknown init {self.init!r}")


def _greedy_ascent(G: MultiGraph, labels: np.ndarray, K: int, max_sweeps: int):
    state = _BlockState(G, labels, K)
    obj = state.objective()
    sweeps = 0
    converged = False
    for _ in range(max_sweeps):
        sweeps += 1
        changed = False
        for i in range(state.N):
            a = state.labels[i]
            d = state.degree_by_class(i)
            best_obj, best_b = obj, a
            for b in range(K):
                if b == a:
                    continue
                state.move(i, b, d)
                cand = state.objective()
                if cand > best_obj:
                    best_obj, best_b = cand, b
                state.move(i, a, d)
            if best_b != a:
                state.move(i, best_b, d)
                obj = best_obj
                changed = True
        if not changed:
            converged = True
            break
    return state.labels.copy(), obj, sweeps, converged


def local_search_profile_mle(
    G: MultiGraph, K: int, opts: SearchOptions = SearchOptions()
) -> FitResult:
    """Greedy single-node coordinate ascent on the profile log-likelihood.

    Runs ``restarts`` seeded starts (with init="spectral" the first start is
    the spectral-clustering labeling and the rest are random) and returns the
    best local optimum.  The objective never decreases along a run.
    """
    N = G.num_nodes
    if K > N:
        raise ValueError("K cannot exceed the number of nodes")
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(opts.seed).spawn(opts.restarts)]
    inits = []
    for r in range(opts.restarts):
        if opts.init == "given":
            inits.append(opts.given.labels.copy() if r == 0 else rngs[r].integers(0, K, size=N))
        elif opts.init == "spectral" and r == 0:
            from .spectral import SpectralOptions, spectral_cluster

            fit = spectral_cluster(G, K, SpectralOptions(seed=opts.seed))
            inits.append(fit.labels.labels.copy())
        else:
            inits.append(rngs[r].integers(0, K, size=N))
    best = None
    total_sweeps = 0
    for labels in inits:
        lab, obj, sweeps, conv = _greedy_ascent(G, np.asarray(labels, dtype=np.int64), K, opts.max_sweeps)
        total_sweeps += sweeps
        if best is None or obj > best[1]:
            best = (lab, obj, conv)
    return FitResult(
        labels=ClassLabels(K, best[0]),
        objective=best[1],
        iterations=max(total_sweeps, 1),
        converged=best[2],
        seed=opts.seed,
    )
