"""Histogram of one beta = inf Hermite matrix against the semicircle.

With beta = inf the tridiagonal model has no randomness: its eigenvalues are
rescaled Hermite roots, and their density still approaches the semicircle.
Run: python3 demos/semicircle_histogram.py [n] [bins]
"""
import sys

import numpy as np

from betaspectra import EnsembleSpec, RngStream
from betaspectra.ensembles import sample
from betaspectra.sturm import histogram
from betaspectra.theory import LawMoments

n = int(sys.argv[1]) if len(sys.argv) > 1 else 300
bins = int(sys.argv[2]) if len(sys.argv) > 2 else 25

T = sample(EnsembleSpec.hermite(np.inf, n), RngStream(0))
edges = np.linspace(-1, 1, bins + 1)
h = histogram(T, edges)
expected = n * LawMoments("semicircle").bin_probabilities(edges)

print(f"{'bin':>17} {'count':>6} {'expected':>9}")
for j in range(bins):
    bar = "#" * int(round(60 * h.counts[j] / expected.max()))
    print(f"({edges[j]:+.2f}, {edges[j + 1]:+.2f}] {h.counts[j]:6d} {expected[j]:9.2f} {bar}")
print(f"L1 distance of bin fractions: {np.abs(h.counts / n - expected / n).sum():.4f}")
