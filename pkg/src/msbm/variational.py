"""Variational EM for the multi-graph block model.

The mean-field family factorizes the label posterior over nodes; one fit
alternates sequential per-node responsibility updates (coordinate ascent, so
the bound never decreases) with closed-form M-steps for the class proportions
and the per-layer block probabilities.  Model order is scored by a penalized
classification-likelihood criterion (lower is better).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .core import ClassLabels, FitResult, MultiGraph, ProbArray

_SIMPLEX_TOL = 1e-9


@dataclass
class VariationalState:
    """Mean-field posterior: responsibilities b (N x K, rows on the simplex),
    class proportions pi, and the estimated probability array."""

    responsibilities: np.ndarray
    class_probs: np.ndarray
    prob_array: ProbArray

    def __post_init__(self):
        b = np.asarray(self.responsibilities, dtype=float)
        pi = np.asarray(self.class_probs, dtype=float)
        if b.ndim != 2:
            raise ValueError("responsibilities must be N x K")
        if (b < -_SIMPLEX_TOL).any() or np.abs(b.sum(axis=1) - 1.0).max() > _SIMPLEX_TOL:
            raise ValueError("responsibility rows must lie on the simplex")
        if (pi < -_SIMPLEX_TOL).any() or abs(pi.sum() - 1.0) > _SIMPLEX_TOL:
            raise ValueError("class_probs must lie on the simplex")
        self.responsibilities = b
        self.class_probs = pi

    def hard_labels(self) -> ClassLabels:
        return ClassLabels(self.responsibilities.shape[1], self.responsibilities.argmax(axis=1))


@dataclass(frozen=True)
class VemOptions:
    max_iter: int = 500
    tol: float = 1e-6  # relative ELBO change
    restarts: int = 5
    init: str = "spectral"  # random | spectral | given
    seed: int = 0
    prob_floor: float = 1e-6
    given: Optional[np.ndarray] = None  # initial responsibilities for init="given"

    def __post_init__(self):
        if self.max_iter < 1 or self.restarts < 1:
            raise ValueError("iteration caps must be >= 1")
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")
        if not 0.0 < self.prob_floor < 0.5:
            raise ValueError("prob_floor must lie in (0, 0.5)")
        if self.init not in ("random", "spectral", "given"):
            raise ValueError(f"unknown init {self.init!r}")


def elbo(G: MultiGraph, state: VariationalState) -> float:
    """Mean-field lower bound on the log-likelihood (0*log 0 = 0)."""
    B = state.responsibilities
    pi = state.class_probs
    P = state.prob_array.mats
    Gf = G.layers.astype(float)
    with np.errstate(divide="ignore"):
        logpi = np.where(pi > 0, np.log(np.maximum(pi, 1e-300)), 0.0)
    mix = float(np.sum(B @ logpi)) if (pi > 0).all() else _mix_term(B, pi)
    M1 = np.einsum("ik,tij,jl->tkl", B, Gf, B)
    s = B.sum(axis=0)
    pairs = np.outer(s, s) - B.T @ B
    with np.errstate(divide="ignore", invalid="ignore"):
        le = np.where(M1 > 0, M1 * np.log(P), 0.0)
        ln = np.where(pairs[None] - M1 > 0, (pairs[None] - M1) * np.log1p(-P), 0.0)
    like = 0.5 * float((le + ln).sum())
    ent = -float(np.sum(np.where(B > 0, B * np.log(np.maximum(B, 1e-300)), 0.0)))
    return mix + like + ent


def _mix_term(B: np.ndarray, pi: np.ndarray) -> float:
    total = 0.0
    for k in range(pi.size):
        col = B[:, k]
        if pi[k] > 0:
            total += float(col.sum()) * math.log(pi[k])
        elif (col > 0).any():
            return float("-inf")
    return total


def icl(G: MultiGraph, state: VariationalState, K: int) -> float:
    """Penalized model-order score: -2 * elbo plus a label-complexity term
    (K-1) log N and a parameter term T K(K+1)/2 * log(N(N-1)/2).  Lower is
    better."""
    N, T = G.num_nodes, G.num_layers
    pen = (K - 1) * math.log(N) + T * K * (K + 1) / 2 * math.log(N * (N - 1) / 2)
    return -2.0 * elbo(G, state) + pen


def _m_step(G_f: np.ndarray, B: np.ndarray, floor: float):
    s = B.sum(axis=0)
    pi = s / s.sum()
    M1 = np.einsum("ik,tij,jl->tkl", B, G_f, B)
    pairs = np.outer(s, s) - B.T @ B
    with np.errstate(divide="ignore", invalid="ignore"):
        P = np.where(pairs[None] > 0, M1 / np.maximum(pairs[None], 1e-300), 0.5)
    P = np.clip(P, floor, 1.0 - floor)
    P = 0.5 * (P + np.swapaxes(P, 1, 2))  # exact symmetry against float drift
    return pi, P


def _e_step(G_f: np.ndarray, B: np.ndarray, pi: np.ndarray, P: np.ndarray) -> None:
    """Sequential per-node responsibility updates (in place, log domain)."""
    N = B.shape[0]
    logpi = np.log(np.maximum(pi, 1e-300))
    L1 = np.log(P)
    L0 = np.log1p(-P)
    D = L1 - L0
    L0sum = L0.sum(axis=0)
    colsum = B.sum(axis=0)
    for i in range(N):
        s = G_f[:, i, :] @ B  # (T, K): expected edges into each class
        c = colsum - B[i]  # other-node class mass, layer-independent
        logits = logpi + np.einsum("tkl,tl->k", D, s) + L0sum @ c
        logits -= logits.max()
        bi = np.exp(logits)
        bi /= bi.sum()
        colsum += bi - B[i]
        B[i] = bi


def _init_responsibilities(G: MultiGraph, K: int, kind: str, rng, opts: VemOptions):
    N = G.num_nodes
    if kind == "given":
        B = np.array(opts.given, dtype=float)
        return B / B.sum(axis=1, keepdims=True)
    if kind == "spectral":
        from .spectral import SpectralOptions, spectral_cluster

        fit = spectral_cluster(G, K, SpectralOptions(seed=opts.seed))
        B = np.full((N, K), 0.1 / K)
        B[np.arange(N), fit.labels.labels] += 0.9
        return B
    B = rng.random((N, K)) + 0.1
    return B / B.sum(axis=1, keepdims=True)


def _fit_once(G: MultiGraph, K: int, B: np.ndarray, opts: VemOptions):
    G_f = G.layers.astype(float)
    trace = []
    prev = -np.inf
    converged = False
    state = None
    pi, P = _m_step(G_f, B, opts.prob_floor)
    for it in range(opts.max_iter):
        _e_step(G_f, B, pi, P)
        if (B.sum(axis=0) < 1e-8).any():
            return None  # a class vanished; restart consumed
        pi, P = _m_step(G_f, B, opts.prob_floor)
        state = VariationalState(B.copy(), pi, ProbArray(P))
        cur = elbo(G, state)
        trace.append(cur)
        if it > 0 and abs(cur - prev) <= opts.tol * (abs(prev) + 1e-12):
            converged = True
            break
        prev = cur
    return state, trace, converged


def vem_fit(G: MultiGraph, K: int, opts: VemOptions = VemOptions()):
    """Best-of-restarts variational EM fit.

    With init="spectral" the first restart is warm-started from spectral
    clustering and the remaining restarts are random; "random" uses random
    soft assignments throughout; "given" starts from ``opts.given``.

    Returns (state, result, elbo_trace) for the restart with the best final
    bound.
    """
    N = G.num_nodes
    if K > N:
        raise ValueError("K cannot exceed the number of nodes")
    children = np.random.SeedSequence(opts.seed).spawn(opts.restarts)
    best = None
    failures = 0
    for r, child in enumerate(children):
        rng = np.random.default_rng(child)
        if opts.init == "given" and r > 0:
            kind = "random"
        elif opts.init == "spectral":
            kind = "spectral" if r == 0 else "random"
        else:
            kind = opts.init
        B0 = _init_responsibilities(G, K, kind, rng, opts)
        out = _fit_once(G, K, B0, opts)
        if out is None:
            failures += 1
            continue
        state, trace, converged = out
        if best is None or trace[-1] > best[1][-1]:
            best = (state, trace, converged)
    if best is None:
        raise RuntimeError("every restart collapsed a class; try fewer classes")
    state, trace, converged = best
    result = FitResult(
        labels=state.hard_labels(),
        objective=trace[-1],
        iterations=len(trace),
        converged=converged and failures < opts.restarts,
        seed=opts.seed,
        extra={"failed_restarts": failures},
    )
    return state, result, trace


def select_k(G: MultiGraph, k_min: int, k_max: int, opts: VemOptions = VemOptions()):
    """Fit every K in [k_min, k_max] and pick the lowest ICL.

    Returns (best_k, table) where table rows are (K, elbo, icl) sorted by K.
    """
    if not 1 <= k_min <= k_max <= G.num_nodes:
        raise ValueError("need 1 <= k_min <= k_max <= N")
    table = []
    for K in range(k_min, k_max + 1):
        state, result, _ = vem_fit(G, K, replace(opts, seed=opts.seed + K))
        score = icl(G, state, K)
        table.append((K, result.objective, score))
    best_k = min(table, key=lambda row: row[2])[0]
    return best_k, table
