#!/usr/bin/env python3
"""Run every named replication study and write one CSV per study.

Usage: python3 scripts/run_all_experiments.py [--out-dir results] [--seed 0]
"""

import argparse
import time
from pathlib import Path

from msbm.experiments import EXPERIMENTS
from msbm.io import write_csv


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="results")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, fn in sorted(EXPERIMENTS.items()):
        kwargs = {} if name in ("fig2", "table1") else {"seed": args.seed}
        start = time.monotonic()
        rows, columns = fn(**kwargs)
        path = out / f"{name}.csv"
        write_csv(rows, columns, str(path))
        print(f"{name}: {len(rows)} rows -> {path}  ({time.monotonic() - start:.1f}s)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
