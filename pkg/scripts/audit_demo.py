"""Run the identity audit at a few representative points and print the tables.

    python3 scripts/audit_demo.py
"""

import numpy as np

from cliffsheaf.algebra import EvalContext
from cliffsheaf.audit import audit_identities, audit_passed, summary_table
from cliffsheaf.metric import random_metric

POINTS = {
    "unit timelike": ([1.0, 0, 0, 0], None),
    "off-shell timelike y=(2,0,0,0)": ([2.0, 0, 0, 0], None),
    "unit spacelike": ([0, 1.0, 0, 0], None),
    "generic metric": ([1.0, 0.2, -0.1, 0.3], random_metric(np.random.default_rng(0))),
}

for label, (y, g) in POINTS.items():
    ctx = EvalContext.create(y, {"A": [0.1, 0.05, 0, 0]}, g)
    entries = audit_identities(ctx)
    print(f"== {label}: audit {'passed' if audit_passed(entries) else 'FAILED'}")
    print(summary_table(entries))
    print()
