"""Regenerate every table and figure comparison into one directory."""

import argparse
import time
from pathlib import Path

from mechdesign.experiments import ARTIFACTS
from mechdesign.io import write_aggregate_csv, write_comparison_csv, write_run_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/reproduce")
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--only", nargs="*", choices=sorted(ARTIFACTS), default=sorted(ARTIFACTS))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in args.only:
        t0 = time.perf_counter()
        art = ARTIFACTS[name](workers=args.workers)
        write_comparison_csv(out / f"{name}_comparison.csv", art.records)
        if art.summaries:
            write_aggregate_csv(out / f"{name}_aggregate.csv", art.summaries.items())
        if name == "fig1":
            for label, runs in art.runs.items():
                for seed, rows in runs:
                    write_run_csv(out / f"fig1_{label}_seed{seed}.csv", rows)
        print(f"== {name} ({time.perf_counter() - t0:.0f}s)")
        for check in art.checks:
            print("  " + check.line())


if __name__ == "__main__":
    main()
