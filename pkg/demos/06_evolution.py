"""Evolutionary analysis: estimate a payoff matrix from programs, then run
replicator dynamics on the strategy-type simplex.

Run:  python demos/06_evolution.py
"""

import numpy as np

from osgames.arena import MatchConfig
from osgames.evolution import (
    estimate_payoff_matrix,
    fixed_points,
    flow_field,
    integrate,
)
from osgames.fixtures import load_corpus_programs

by_name = dict(load_corpus_programs("ipd"))
types = [(name, by_name[name]) for name in ("allc", "alld", "tft")]

matrix = estimate_payoff_matrix(types, MatchConfig(rounds=10, seed=0))
print("payoff matrix (row type vs column type):")
for tag, row in zip(matrix.tags, matrix.a):
    print(f"  {tag:5s} {row}")

# From a uniform population the defector first grows by eating the naive
# cooperators, then starves against tit-for-tat and goes extinct.  The run
# freezes on the allc/tft edge: those two behave identically against each
# other, so that whole edge is a fixed line.
trajectory = integrate(matrix, np.full(3, 1 / 3), dt=0.01, steps=20_000)
for t_index in (0, 100, 500, 2000, 20_000):
    x = trajectory.states[t_index]
    print(f"  t={trajectory.times[t_index]:6.1f}  " + "  ".join(f"{v:.4f}" for v in x))

report = fixed_points(matrix, tol=1e-9)
print("\nfixed points:")
for p in report.points:
    coords = ", ".join(f"{v:.4f}" for v in p.x)
    print(f"  ({coords})  {p.classification:8s} {p.stability}")
for c in report.continua:
    tags = " + ".join(matrix.tags[i] for i in c.support)
    print(f"  fixed continuum on the {tags} {c.classification}")

samples = flow_field(matrix, resolution=10)
strongest = max(samples, key=lambda s: s.strength)
print(f"\nflow field: {len(samples)} grid samples;")
print(f"strongest flow {strongest.strength:.2f} at {np.round(strongest.x, 2)}")
print("export CSVs for plotting with:  osgames evolve / osgames flow")
