"""Eigenvalue count in [0.2, 0.8] minus n times the semicircle mass.

The deviation has no limit in n; it oscillates, but its average over a run of
consecutive sizes settles near the value predicted by the arcsine correction.
Run: python3 demos/count_deviation.py [n_start] [count]
"""
import sys
import time

from betaspectra.sturm import deviation_experiment

n_start = int(sys.argv[1]) if len(sys.argv) > 1 else 100_000
count = int(sys.argv[2]) if len(sys.argv) > 2 else 100

t0 = time.perf_counter()
rep = deviation_experiment(n_start, count, 0.2, 0.8)
print(f"n = {n_start}..{n_start + count - 1}")
print(f"per-n deviations range over [{rep.per_n_deviations.min():+.3f}, {rep.per_n_deviations.max():+.3f}]")
print(f"mean deviation    {rep.mean_deviation:.4f}")
print(f"theoretical value {rep.theoretical:.5f}")
print(f"({time.perf_counter() - t0:.1f}s)")
