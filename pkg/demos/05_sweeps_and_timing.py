"""Hyperparameter sweeps and training-time scaling through the CLI surface.

The same functionality is reachable as `xrm sweep` / `xrm bench` from a
shell; here the commands run in-process on a synthetic dataset.

Run:  python demos/05_sweeps_and_timing.py
"""

import csv
import tempfile
from collections import defaultdict
from pathlib import Path

import numpy as np

from xrm import DataSet, save_dataset
from xrm.cli import main

rng = np.random.default_rng(9)
n, m = 1200, 8
y = np.where(rng.random(n) < 0.5, 1.0, -1.0)
direction = rng.normal(size=m)
direction /= np.linalg.norm(direction)
X = rng.normal(scale=1.2, size=(m, n)) + np.outer(direction, y) * 0.75

with tempfile.TemporaryDirectory() as tmp:
    data_path = Path(tmp) / "synthetic.txt"
    save_dataset(DataSet(X=X, y=y), data_path)

    # Sweep the loss weight: heavier weight fits the training split harder.
    sweep_path = Path(tmp) / "sweep.csv"
    main(["sweep", "--data", str(data_path), "--lambda", "0.05,0.5,2,4",
          "--components", "10", "--train-size", "150", "--trials", "5",
          "--seed", "1", "--out", str(sweep_path), "--no-timing"])
    by_lam = defaultdict(lambda: ([], []))
    with open(sweep_path) as handle:
        for row in list(csv.reader(handle))[1:]:
            by_lam[float(row[0])][0].append(float(row[3]))
            by_lam[float(row[0])][1].append(float(row[4]))
    print("lambda   train error   test error   (means over 5 trials)")
    for lam in sorted(by_lam):
        tr, te = by_lam[lam]
        print(f"{lam:6.2f} {np.mean(tr):12.4f} {np.mean(te):12.4f}")

    # Time the trainer at two sample counts; the totals cover 10 runs each
    # and should grow roughly linearly with the sample count.
    bench_path = Path(tmp) / "bench.csv"
    main(["bench", "--data", str(data_path), "--sizes", "400,800",
          "--runs", "10", "--seed", "0", "--out", str(bench_path)])
    with open(bench_path) as handle:
        rows = list(csv.reader(handle))[1:]
    small, large = (float(r[1]) for r in rows)
    print(f"\n10-run training totals: N=400 -> {small:.3f}s, N=800 -> {large:.3f}s")
    print(f"time ratio for doubled data: {large / small:.2f}")
