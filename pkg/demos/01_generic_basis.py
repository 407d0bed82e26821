"""Gelfand-Zetlin patterns and generators at a generic q."""

import numpy as np

from qgz3 import QParam, RepLabel, build_all, dimension, enumerate_basis, verify_generic
from qgz3.gzbasis import coordinates

lab = RepLabel(4, 2, 0)
basis = enumerate_basis(lab)
print(f"{lab.top}: {dimension(lab)} states")
for p in basis:
    x, y, _ = coordinates(p)
    print(f"  {p.key}  weight ({x:+d}, {y:+d})")

# default q is a point on the unit circle well away from low-order roots
q = QParam.generic()
ops = build_all(lab, q)
e1 = ops["e1"].toarray()
print("\ne1 has", np.count_nonzero(np.abs(e1) > 1e-14), "nonzero entries")

# the defining relations hold to roundoff
report = verify_generic(RepLabel(8, 4, 0), q)
for name, r in sorted(report.residuals.items()):
    print(f"  {name:<12} {r:.1e}")
print("worst residual", f"{report.worst:.1e}")
