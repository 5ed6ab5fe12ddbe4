"""Per-layer estimation with sequentially aligned majority voting.

These are the heuristic baselines: fit each layer on its own (spectral or
variational), then reconcile the per-layer labelings by maximum-agreement
matching against the running vote and let each node's most frequent aligned
label win.  When single layers sit below the detectability limit these
baselines stay near chance even as T grows, unlike methods that pool layers
before estimating.
"""

from __future__ import annotations

import numpy as np

from .core import ClassLabels, MultiGraph, align_labels
from .spectral import SpectralOptions, spectral_cluster
from .variational import VemOptions, vem_fit


def per_layer_fit(G: MultiGraph, K: int, method: str, seed: int) -> list[ClassLabels]:
    """Fit every layer independently as a single-network problem.

    method is "spectral" or "vem"; per-layer seeds are derived from ``seed``
    so the result is deterministic and layer-order independent.
    """
    if method not in ("spectral", "vem"):
        raise ValueError(f"unknown per-layer method {method!r}")
    if K > G.num_nodes:
        raise ValueError("K cannot exceed the number of nodes")
    children = np.random.SeedSequence(seed).spawn(G.num_layers)
    out = []
    for t, child in enumerate(children):
        layer = MultiGraph(G.layers[t : t + 1])
        layer_seed = int(child.generate_state(1)[0])
        if method == "spectral":
            fit = spectral_cluster(layer, K, SpectralOptions(seed=layer_seed))
            out.append(fit.labels)
        else:
            opts = VemOptions(restarts=2, max_iter=100, tol=1e-5, seed=layer_seed)
            _, fit, _ = vem_fit(layer, K, opts)
            out.append(fit.labels)
    return out


def _vote(aligned: list[np.ndarray], K: int) -> np.ndarray:
    counts = np.zeros((aligned[0].size, K), dtype=np.int64)
    for lab in aligned:
        np.add.at(counts, (np.arange(lab.size), lab), 1)
    return counts.argmax(axis=1)  # argmax takes the lowest index on ties


def majority_vote(per_layer: list[ClassLabels]) -> ClassLabels:
    """Sequentially aligned per-node majority vote over layer labelings.

    Layer t (t >= 2) is aligned by maximum-agreement matching to the running
    vote over layers 1..t-1 before being absorbed; the final output is each
    node's most frequent aligned label, ties broken toward the lower class
    index.
    """
    if not per_layer:
        raise ValueError("need at least one layer labeling")
    K = per_layer[0].num_classes
    N = per_layer[0].num_nodes
    for lab in per_layer:
        if lab.num_classes != K or lab.num_nodes != N:
            raise ValueError("layer labelings must share N and K")
    aligned = [per_layer[0].labels]
    for lab in per_layer[1:]:
        running = ClassLabels(K, _vote(aligned, K))
        perm = align_labels(lab, running)
        aligned.append(perm[lab.labels])
    return ClassLabels(K, _vote(aligned, K))
