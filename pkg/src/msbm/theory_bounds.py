"""Exact evaluation of the consistency machinery for 2-class block models.

Quantities implemented here:

- ``c0_of`` / ``delta_of``: the margin keeping probabilities away from {0, 1}
  and the separation (minimum over class pairs of the maximal Jensen gap of
  sigma across columns), the two constants governing label consistency.
- ``exact_sigma_gap``: the exact centered binomial expectation
  N (E[sigma(X/N)] - sigma(p)) - 1/2, X ~ Bin(N, p).
- ``lemma3_bound``: a closed-form envelope for that gap, combining a
  third-order Taylor remainder with a Chernoff tail for leaving the margin
  region (instantiated at margin p/2).
- ``expected_profile_terms``: the exact expectation g(z) of the profile
  log-likelihood and its large-sample limit h(z), for any candidate labeling.
- ``min_nodes_k2``: the smallest balanced 2-class problem size at which a
  sufficient condition for the expected profile likelihood to separate the
  true labeling from its single-node perturbations holds, taken over the
  worst probability matrix compatible with a requested (c0, delta).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import binom

from .core import ClassLabels, ProbArray
from .likelihood import _sigma_unchecked, sigma

_GRID_STEP = 1e-3
_DELTA_TOL = 1e-3
_N_MAX = 4000


@dataclass(frozen=True)
class TheoryReport:
    c0: float
    delta: float
    m0: float
    m1: float
    m2: float
    m3: float
    m4: float
    min_nodes: Optional[int] = None


def c0_of(P: ProbArray) -> float:
    """Margin: min over all layers and entries of min(p, 1-p)."""
    p = P.mats
    return float(np.minimum(p, 1.0 - p).min())


def delta_of(P: ProbArray) -> float:
    """Separation: min over layers and class pairs k != l of
    max_m sigma(P_km) + sigma(P_lm) - 2 sigma((P_km + P_lm)/2); nonnegative
    by convexity of sigma and zero iff two rows coincide."""
    K = P.num_classes
    if K < 2:
        raise ValueError("separation needs at least two classes")
    s = _sigma_unchecked(P.mats)  # (T, K, K)
    best = np.inf
    for k in range(K):
        for l in range(k + 1, K):
            mid = _sigma_unchecked((P.mats[:, k, :] + P.mats[:, l, :]) / 2.0)
            gap = (s[:, k, :] + s[:, l, :] - 2.0 * mid).max(axis=1)  # per layer
            best = min(best, float(gap.min()))
    return best


def _pair_delta(a: float, b: float) -> float:
    return sigma(a) + sigma(b) - 2.0 * sigma((a + b) / 2.0)


def bound_constants(c0: float) -> tuple[float, float, float, float, float]:
    """Envelope constants (M0..M4) of sigma and its derivatives on the margin
    region [c0, 1 - c0]."""
    if not 0.0 < c0 < 0.5:
        raise ValueError("c0 must lie in (0, 0.5)")
    m0 = math.log(2.0)
    m1 = math.log(1.0 - c0) - math.log(c0)
    m2 = 1.0 / (c0 * (1.0 - c0))
    m3 = 1.0 / c0**2 - 1.0 / (1.0 - c0) ** 2
    m4 = 1.0 / (2.0 * c0**3) + 1.0 / (2.0 * (1.0 - c0) ** 3)
    return m0, m1, m2, m3, m4


def exact_sigma_gap(N: int, p: float) -> float:
    """N (E[sigma(X/N)] - sigma(p)) - 1/2 with X ~ Bin(N, p), by exact
    summation over the binomial mass function."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    k = np.arange(N + 1)
    pmf = binom.pmf(k, N, p)
    e = float(pmf @ _sigma_unchecked(k / N))
    return N * (e - sigma(p)) - 0.5


def _expected_sigma(n: int, p: float) -> float:
    """E[sigma(X/n)], X ~ Bin(n, p), exact (truncated 12-sd window)."""
    if n == 0:
        return 0.0
    if p <= 0.0 or p >= 1.0:
        return 0.0
    sd = math.sqrt(n * p * (1.0 - p))
    lo = max(0, int(n * p - 12.0 * sd - 5.0))
    hi = min(n, int(n * p + 12.0 * sd + 5.0))
    k = np.arange(lo, hi + 1)
    pmf = binom.pmf(k, n, p)
    return float(pmf @ _sigma_unchecked(k / n))


def lemma3_bound(N: int, p: float) -> float:
    """Closed-form envelope dominating |exact_sigma_gap(N, p)|.

    Splits the expectation at the margin region [p/2, 1 - p/2]: a Taylor
    remainder controls the inside (polynomial terms in 1/N) and a Chernoff
    tail exp(-N p^2 / 2) the outside.  Symmetric in p <-> 1 - p.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    if p > 0.5:
        p = 1.0 - p
    _, m1, _, m3, m4 = bound_constants(p / 2.0)
    poly = m3 / (24.0 * N) + (m4 / 24.0) * (1.0 / (2.0 * N * N) + 1.0 / (4.0 * N))
    tail = 2.0 * N * (1.0 + m1 + m3 / 6.0) * math.exp(-N * p * p / 2.0)
    return poly + tail


def expected_profile_terms(z: ClassLabels, c: ClassLabels, P: ProbArray):
    """Exact expectation of the profile log-likelihood under candidate z.

    For each layer, Pbar_kl(z) averages the true pair probabilities over the
    node pairs that z places in block (k, l).  Returns

      g(z) = sum_t sum_{k<=l} n_kl E[sigma(Bin(n_kl, Pbar_kl)/n_kl)]
      h(z) = sum_t sum_{k<=l} n_kl sigma(Pbar_kl)

    and the per-layer Pbar matrices (shape (T, Kz, Kz)).
    """
    if z.num_nodes != c.num_nodes:
        raise ValueError("label vectors must have the same length")
    Kz, Kc = z.num_classes, c.num_classes
    T = P.num_layers
    # M[k, a] = number of nodes in z-class k with true class a
    M = np.zeros((Kz, Kc))
    np.add.at(M, (z.labels, c.labels), 1.0)
    sizes = M.sum(axis=1)
    pbar = np.zeros((T, Kz, Kz))
    npairs = np.zeros((Kz, Kz))
    for t in range(T):
        Pt = P.mats[t]
        S = M @ Pt @ M.T  # ordered-pair probability mass between z-classes
        for k in range(Kz):
            nk = sizes[k]
            n_within = nk * (nk - 1) / 2.0
            npairs[k, k] = n_within
            if n_within > 0:
                mass = (M[k] @ Pt @ M[k] - M[k] @ np.diagonal(Pt)) / 2.0
                pbar[t, k, k] = mass / n_within
            for l in range(k + 1, Kz):
                n_between = nk * sizes[l]
                npairs[k, l] = npairs[l, k] = n_between
                if n_between > 0:
                    val = S[k, l] / n_between
                    pbar[t, k, l] = pbar[t, l, k] = val
    iu = np.triu_indices(Kz)
    g = 0.0
    h = 0.0
    for t in range(T):
        for k, l in zip(*iu):
            n = npairs[k, l]
            if n <= 0:
                continue
            pb = min(max(pbar[t, k, l], 0.0), 1.0)
            h += n * sigma(pb)
            g += n * _expected_sigma(int(round(n)), pb)
    return g, h, pbar


# ---------------------------------------------------------------------------
# minimum problem size for 2-class consistency
# ---------------------------------------------------------------------------


def _deviation_bound(n: float, p: float, consts) -> float:
    """Envelope for the block-level deviation |n(E sigma - sigma) - 1/2| with
    fixed margin constants and a Chernoff tail at the block mean's own
    margin."""
    m1, m3, m4 = consts
    q = min(p, 1.0 - p)
    poly = m3 / (24.0 * n) + (m4 / 24.0) * (1.0 / (2.0 * n * n) + 1.0 / (4.0 * n))
    tail = 2.0 * n * (1.0 + m1 + m3 / 6.0) * math.exp(-n * q * q / 2.0)
    return poly + tail


def _perturbation_blocks(N: int, a: float, b: float):
    """Pair counts and mean probabilities of the blocks involved when one
    node of a balanced 2-class labeling is moved to the other class, together
    with the true labeling's blocks."""
    h = N // 2
    c2 = lambda m: m * (m - 1) / 2.0
    moved = [
        (c2(h + 1), (c2(h) * a + h * b) / c2(h + 1)),
        (c2(h - 1), a),
        (float((h + 1) * (h - 1)), (h * b + a) / (h + 1)),
    ]
    true = [(c2(h), a), (c2(h), a), (float(h * h), b)]
    return moved + true


def _separation_holds(N: int, a: float, b: float, delta: float, consts) -> bool:
    """Sufficient condition: a quarter of the separation times the class size
    exceeds the summed deviation envelopes of all blocks involved."""
    h = N // 2
    slack = sum(_deviation_bound(n, p, consts) for n, p in _perturbation_blocks(N, a, b) if n >= 1)
    return 0.25 * delta * h > slack


def _threshold(a: float, b: float, delta: float, consts, n_start: int = 6) -> Optional[int]:
    for N in range(n_start, _N_MAX + 1, 2):
        if _separation_holds(N, a, b, delta, consts):
            return N
    return None


def min_nodes_k2(c0: float, delta: float) -> int:
    """Minimum balanced 2-class problem size implied by (c0, delta).

    Searches symmetric 2x2 matrices [[a, b], [b, a]] with
    c0 <= b < a <= 1 - c0 on a 1e-3 grid whose separation is within 1e-3 of
    the requested delta, and returns the largest (worst-case) threshold: the
    smallest even N at which the sufficient separation condition holds.

    A request exceeding the maximum separation achievable inside the margin
    region is clamped to that maximum (with a warning); invalid inputs raise.
    """
    if not 0.0 < c0 < 0.5:
        raise ValueError("c0 must lie in (0, 0.5)")
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    d_max = _pair_delta(1.0 - c0, c0)
    d_eff = delta
    if delta > d_max + _DELTA_TOL:
        warnings.warn(
            f"separation {delta:.4g} is unachievable at margin {c0}; "
            f"clamping to the maximum {d_max:.4g}",
            stacklevel=2,
        )
        d_eff = d_max
    _, m1, _, m3, m4 = bound_constants(c0)
    consts = (m1, m3, m4)
    step = _GRID_STEP
    a_grid = np.round(np.arange(c0 + step, 1.0 - c0 + step / 2.0, step), 9)
    best = 0
    found = False
    for a in a_grid[::-1]:  # descending: the small-margin endpoint binds
        b_grid = np.round(np.arange(c0, a - step / 2.0, step), 9)
        if b_grid.size == 0:
            continue
        dv = np.array([_pair_delta(a, bb) for bb in b_grid])
        for bb in b_grid[np.abs(dv - d_eff) <= _DELTA_TOL]:
            found = True
            if best >= 6 and _separation_holds(best, a, bb, d_eff, consts):
                continue  # threshold cannot exceed the current worst case
            t = _threshold(float(a), float(bb), d_eff, consts)
            if t is not None and t > best:
                best = t
    if not found or best == 0:
        raise ValueError(
            f"no symmetric 2x2 matrix on the grid attains separation "
            f"{d_eff:.4g} at margin {c0}"
        )
    return best


def theory_report(P: ProbArray, min_nodes: Optional[int] = None) -> TheoryReport:
    c0 = c0_of(P)
    delta = delta_of(P) if P.num_classes >= 2 else 0.0
    if 0.0 < c0 < 0.5:
        m0, m1, m2, m3, m4 = bound_constants(c0)
    else:
        m0, m1, m2, m3, m4 = math.log(2.0), float("inf"), float("inf"), float("inf"), float("inf")
    return TheoryReport(c0=c0, delta=delta, m0=m0, m1=m1, m2=m2, m3=m3, m4=m4, min_nodes=min_nodes)
