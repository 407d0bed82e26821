"""Taking (5,2,0) to the primitive cube root and looking at what survives."""

import numpy as np

from qgz3 import RepLabel, limit_oracle, regularize, verify_root
from qgz3.rootlimit import boundary_audit, casimir_structure

lab, l = RepLabel(5, 2, 0), 3
rep = regularize(lab, l)

# S1-pairs inside the teepee get mixed; the primed vectors replace one member of each pair
print("census", rep.mixed.census())

# every entry is finite and the algebra still closes
check = verify_root(lab, l, rep=rep)
print("relations", f"{max(check.residuals.values()):.1e}")
print("e^l, f^l ", f"{max(check.nilpotency.values()):.1e}")

# an independent route: build near the root in the same basis and extrapolate
for g in ("e1", "f1", "e2"):
    diff = np.abs(limit_oracle(g, lab, l).toarray() - rep.ops[g].toarray()).max()
    print(f"oracle {g}: {diff:.1e}")

# the sl(2) Casimir is no longer diagonalizable on the mixed pairs
cas = casimir_structure(lab, l, rep=rep)
for b in cas.blocks:
    print("block", b["A"], b["B"], "diag", np.round(b["diagonal"], 6), "off", np.round(b["off_diagonal"], 6))

audit = boundary_audit(lab, l)
print("boundary audit passed:", audit["passed"])
