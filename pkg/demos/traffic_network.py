"""Traffic on a small road network with one dispersing and one merging node.

Runs the smooth test to its exact solution and reports convergence, then
shows the jam profile on the upper road at the two snapshot times.
"""
import numpy as np

from cwenonet.harness import convergence_study, run_scenario

for params in ("sigma1", "sigma2"):
    print(convergence_study("traffic_smooth", params, range(5)))

res = run_scenario("traffic_jam", "sigma1", 3)
for t, states in sorted(res.snapshots.items()):
    print(f"t = {t}:")
    for name, rho in states.items():
        print(f"  {name:>6}: min {rho.min():.3f}  max {rho.max():.3f}  "
              f"mass {np.sum(rho) * res.network.edges[name].h:.5f}")
