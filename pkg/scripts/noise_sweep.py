#!/usr/bin/env python3
"""Sweep depolarizing noise on the packed run and tabulate the damage.

For each probability p the whole corpus is packed and executed with
per-gate Pauli noise at p (the individual reference runs stay
noiseless), and the mean distances are printed. A second table shows,
per circuit, whether the most frequent outcome at p matches the
noiseless mode — the "can you still read the answer" check.

Run from the repo root:

    python scripts/noise_sweep.py
    python scripts/noise_sweep.py --corpus circuits --shots 10000 \
        --probs 0,0.005,0.01,0.02,0.05 --seed 42 -o noise-sweep.csv
"""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from qmux.backend import NoiseConfig, execute, probabilities_dict
from qmux.bench import BenchConfig, load_corpus, run_bench


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--corpus", default="circuits", type=Path)
    ap.add_argument("--capacity", default=16, type=int)
    ap.add_argument("--shots", default=10000, type=int)
    ap.add_argument("--seed", default=42, type=int)
    ap.add_argument("--probs", default="0,0.005,0.01,0.02,0.05",
                    help="comma-separated depolarizing probabilities")
    ap.add_argument("-o", "--output", type=Path, default=None,
                    help="also write the sweep table as CSV")
    args = ap.parse_args()

    probs = [float(p) for p in args.probs.split(",")]
    rows = []
    print(f"{'p':>7}  {'mean hellinger':>15}  {'mean wasserstein':>17}")
    for p in probs:
        noise = None if p == 0.0 else NoiseConfig(depolarizing_prob=p)
        result = run_bench(
            BenchConfig(
                corpus_dir=args.corpus,
                capacity=args.capacity,
                shots=args.shots,
                seed=args.seed,
                noise=noise,
            )
        )
        report = result.report
        rows.append((p, report.mean_hellinger, report.mean_wasserstein))
        print(f"{p:>7.3f}  {report.mean_hellinger:>15.4f}  {report.mean_wasserstein:>17.4f}")

    print("\nmode survival (most frequent outcome vs noiseless mode):")
    jobs = load_corpus(args.corpus, capacity=args.capacity)
    header = "circuit".ljust(12) + "".join(f"  p={p:<7.3f}" for p in probs)
    print(header)
    for i, job in enumerate(jobs):
        ideal_mode = max(probabilities_dict(job.circuit).items(), key=lambda kv: kv[1])[0]
        cells = []
        for p in probs:
            noise = None if p == 0.0 else NoiseConfig(depolarizing_prob=p)
            counts = execute(job.circuit, args.shots, seed=args.seed + i, noise=noise)
            mode = max(counts.counts.items(), key=lambda kv: kv[1])[0]
            cells.append("ok " if mode == ideal_mode else "LOST")
        print(job.name.ljust(12) + "".join(f"  {c:<9}" for c in cells))

    if args.output is not None:
        with open(args.output, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["depolarizing_prob", "mean_hellinger", "mean_wasserstein"])
            writer.writerows(rows)
        print(f"\nsweep table written to {args.output}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
