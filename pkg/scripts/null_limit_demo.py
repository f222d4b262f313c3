"""Traces along sequences approaching a null vector from both sides.

    python3 scripts/null_limit_demo.py [y0 y1 y2 y3]
"""

import sys

import numpy as np

from cliffsheaf.finsler import RandersData, null_limit_check, second_order_lagrangian

y = np.array([float(v) for v in sys.argv[1:5]]) if len(sys.argv) >= 5 else np.array([1.0, 1, 0, 0])
d = RandersData.create([0.1, 0.0, 0.0, 0.0])
rep = null_limit_check(d, y)
print(f"y_null = {rep.y_null.tolist()}, A.y = {rep.a_dot_y:g}")
for key, lim in list(rep.traces.items()) + [("randers", rep.randers)]:
    print(f"\n{key}: target {lim.target:+.6f}")
    print(f"  {'delta':>8}  {'timelike side':>16}  {'spacelike side':>16}")
    for dl, t, s in zip(rep.deltas, lim.timelike_values, lim.spacelike_values):
        print(f"  {dl:8.0e}  {t:16.10f}  {s:16.10f}")
so = second_order_lagrangian(d, rep.y_null)
print(f"\nsecond-order Lagrangian at the null point: direct {so.direct:.10f}, "
      f"Tr^2 route (extrapolated) {so.trace_squared:.10f}")
