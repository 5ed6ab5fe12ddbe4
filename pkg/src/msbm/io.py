"""Text/JSON serialization of the domain objects.

Formats:

- multigraph (.mgr): first line ``N T``; then one line ``t i j`` per
  undirected edge with 0-based integers, t in [0, T) and i < j.  Duplicate
  edge lines are rejected on read.
- labels (.csv): one 0-based class index per line, N lines.
- probability array (.json): object {"T": ..., "K": ..., "mats": [...]} with
  mats row-major per layer.
- fit result (.json): labels, objective, icl, iterations, converged, seed,
  and accuracy when a reference labeling was supplied.
"""

from __future__ import annotations

import json
from typing import Optional

import numpy as np

from .core import ClassLabels, FitResult, MultiGraph, ProbArray


def write_mgr(G: MultiGraph, path: str) -> None:
    lines = [f"{G.num_nodes} {G.num_layers}"]
    for t in range(G.num_layers):
        ii, jj = np.nonzero(np.triu(G.layers[t], 1))
        for i, j in zip(ii, jj):
            lines.append(f"{t} {i} {j}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_mgr(path: str) -> MultiGraph:
    with open(path, "r", encoding="utf-8") as fh:
        raw = [line.strip() for line in fh if line.strip()]
    if not raw:
        raise ValueError(f"{path}: empty multigraph file")
    head = raw[0].split()
    if len(head) != 2:
        raise ValueError(f"{path}: header must be 'N T'")
    N, T = (int(x) for x in head)
    if N < 1 or T < 1:
        raise ValueError(f"{path}: N and T must be positive")
    layers = np.zeros((T, N, N), dtype=np.uint8)
    seen = set()
    for lineno, line in enumerate(raw[1:], start=2):
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected 't i j'")
        t, i, j = (int(x) for x in parts)
        if not (0 <= t < T and 0 <= i < N and 0 <= j < N):
            raise ValueError(f"{path}:{lineno}: index out of range")
        if i >= j:
            raise ValueError(f"{path}:{lineno}: edges must satisfy i < j")
        if (t, i, j) in seen:
            raise ValueError(f"{path}:{lineno}: duplicate edge")
        seen.add((t, i, j))
        layers[t, i, j] = layers[t, j, i] = 1
    return MultiGraph(layers)


def write_labels(labels: ClassLabels, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(str(int(x)) for x in labels.labels) + "\n")


def read_labels(path: str, num_classes: Optional[int] = None) -> ClassLabels:
    with open(path, "r", encoding="utf-8") as fh:
        vals = [int(line.strip()) for line in fh if line.strip()]
    if not vals:
        raise ValueError(f"{path}: empty labels file")
    K = num_classes if num_classes is not None else max(vals) + 1
    return ClassLabels(K, np.array(vals, dtype=np.int64))


def write_prob_array(P: ProbArray, path: str) -> None:
    obj = {"T": P.num_layers, "K": P.num_classes, "mats": P.mats.tolist()}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh)
        fh.write("\n")


def read_prob_array(path: str) -> ProbArray:
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    mats = np.asarray(obj["mats"], dtype=float)
    if mats.shape != (int(obj["T"]), int(obj["K"]), int(obj["K"])):
        raise ValueError(f"{path}: mats shape disagrees with T/K header")
    return ProbArray(mats)


def fit_result_json(result: FitResult, accuracy: Optional[float] = None) -> str:
    obj = {
        "labels": [int(x) for x in result.labels.labels],
        "objective": result.objective,
        "icl": result.icl,
        "iterations": result.iterations,
        "converged": result.converged,
        "seed": result.seed,
    }
    if accuracy is not None:
        obj["accuracy"] = accuracy
    return json.dumps(obj)


def write_csv(rows: list[dict], columns: list[str], path: str) -> None:
    """UTF-8, LF-terminated CSV with a header row."""
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in columns))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)
