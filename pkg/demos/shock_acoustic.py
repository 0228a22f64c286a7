"""Shock hitting an acoustic wave, on one domain and split at x = 0.

Reports the L1 density difference between the two runs per mesh.
"""
import numpy as np

from cwenonet.harness import run_scenario

for params in ("sigma1", "sigma2"):
    for n in (1, 2, 3):
        one = run_scenario("shock_acoustic", params, n)
        two = run_scenario("shock_acoustic_split", params, n)
        rho1 = one.states["domain"][:, 0]
        rho2 = np.concatenate([two.states["left"][:, 0], two.states["right"][:, 0]])
        h = one.network.h()
        print(f"{params} N={rho1.size}: L1 |rho_single - rho_split| = "
              f"{np.sum(np.abs(rho1 - rho2)) * h:.3e}")
