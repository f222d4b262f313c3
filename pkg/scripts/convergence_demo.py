"""Lattice convergence of the three flat operators for a few plane waves.

    python3 scripts/convergence_demo.py [--levels 4]
"""

import argparse

import numpy as np

from cliffsheaf.diracop import KINDS, FlatOperator, PlaneWave, convergence_study
from cliffsheaf.gamma import build_representation

ap = argparse.ArgumentParser()
ap.add_argument("--levels", type=int, default=3)
ap.add_argument("--rep", default="dirac")
args = ap.parse_args()

rep = build_representation(args.rep)
u = np.array([1.0, 0.5, -0.25j, 0.125])
A = np.array([0.3, -0.2, 0.1, 0.4])
for p in ([1, 0, 0, 0], [1, 1, 0, -1], [0, 1, 1, 1], [2, 1, 0, 0]):
    w = PlaneWave(np.array(p, float), u)
    for kind in KINDS:
        op = FlatOperator(kind, 1.0 if kind == "dirac_mass" else 0.7, None if kind == "dirac_mass" else A)
        r = convergence_study(op, w, rep, levels=args.levels)
        errs = " ".join(f"{e:.3e}" for e in r.max_errors)
        print(f"p={p!s:<14} {kind:<13} errors {errs}  order {r.order_estimate:.3f}")
