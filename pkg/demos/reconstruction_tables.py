"""Boundary reconstruction error tables for the three model problems.

Prints error and observed order for each named parameter set as the mesh
is refined, for smooth data and for a jump placed at two distances from
the boundary.
"""
from cwenonet.cweno import PARAM_SETS, validate_conditions
from cwenonet.harness import reconstruction_study

CASES = {
    "smooth": ["sigma1", "sigma2", "sigma3", "sigma4", "sigma5.1"],
    "disc_I25": ["sigma1", "sigma2", "sigma3", "sigma4", "sigma5.2", "sigma6.2"],
    "disc_I15": ["sigma1", "sigma2", "sigma3", "sigma4", "sigma5.3"],
}

for case, names in CASES.items():
    print(f"== {case}")
    for name in names:
        rep = validate_conditions(PARAM_SETS[name])
        table = reconstruction_study(case, PARAM_SETS[name], range(1, 15))
        note = "" if rep.ok else f"  (violates: {', '.join(rep.failures())})"
        print(f"-- {name}{note}")
        print(table)
