#!/usr/bin/env python3
"""Aggregate a layer-sweep CSV (fig3 output) into per-method mean accuracies.

Usage: python3 scripts/summarize_layer_sweep.py results/fig3.csv
"""

import argparse
import csv
from collections import defaultdict


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv_path")
    args = ap.parse_args()
    acc = defaultdict(list)
    with open(args.csv_path, encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            acc[(row["method"], int(row["t"]))].append(float(row["accuracy"]))
    methods = sorted({m for m, _ in acc})
    layer_counts = sorted({t for _, t in acc})
    header = "method".ljust(20) + "".join(f"T={t}".rjust(9) for t in layer_counts)
    print(header)
    for m in methods:
        cells = "".join(
            f"{sum(acc[(m, t)]) / len(acc[(m, t)]):9.3f}" for t in layer_counts
        )
        print(m.ljust(20) + cells)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
