"""Dam break between two reflecting walls, writing CSV snapshots.

Usage: python demos/dam_break.py [outdir]
"""
import sys

import numpy as np

from cwenonet.cli import main
from cwenonet.harness import run_scenario

out = sys.argv[1] if len(sys.argv) > 1 else "dam_break_out"
for case in ("dam-break-a", "dam-break-b"):
    main(["--scenario", case, "--emit", "snapshot", "--n-min", "2",
          "--times", "0.35,0.6", "--out", f"{out}/{case}"])

for case in ("dam_break_a", "dam_break_b"):
    res = run_scenario(case, "sigma1", 2)
    es = res.network.edges["channel"]
    for t, s in sorted(res.snapshots.items()):
        h = s["channel"][:, 0]
        print(f"{case} t={t}: volume {np.sum(h) * es.h:.15f}  h in [{h.min():.3f}, {h.max():.3f}]")
