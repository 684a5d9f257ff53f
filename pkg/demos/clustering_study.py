"""How much does clustering save on random wiring diagrams?

For each pack count we draw random diagrams at resolution 10 and compare
the best plan's serial cost to the unclustered cost. Ratios near 1 mean
clustering did not help; with more packs the savings grow by orders of
magnitude.
"""
import sys

from pixelarray.cluster import clustering_study

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 450
rows = clustering_study(trials=trials, max_packs=9, seed=0)
print(f"{'packs':>5} {'trials':>6} {'mean':>12} {'median':>12}")
for r in rows:
    print(f"{r.packs:5d} {r.trials:6d} {r.mean_ratio:12.3e} {r.median_ratio:12.3e}")
