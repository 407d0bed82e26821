"""Reducibility at roots of unity: classification, subrepresentations, flat quotients."""

from qgz3 import RepLabel, analyze, classify
from qgz3.structure import flat_analysis, sl2_slice_check, subrep_image

for l in (3, 5):
    row = []
    for a in range(1, l + 1):
        row.append(" ".join(classify(RepLabel(a + b, b, 0), l)[:4] for b in range(1, l + 1)))
    print(f"l={l}  rows a = p13-p23, columns b = p23-p33")
    print("\n".join(row) + "\n")

# (6,3,0) at l=5 contains the image of (5,3,1) as an invariant subspace
lab = RepLabel(6, 3, 0)
r = analyze(lab, 5)
print(r.classification, "subrep", r.subrep_dimension, "quotient", r.quotient_dimension)
print("image states", len(subrep_image(lab, 5)))

# one step past the classical range the quotient has multiplicity-free weights
f = flat_analysis(RepLabel(4, 2, 0), 3)
print("flat quotient", f["dimension"], "states, max multiplicity", f["max_multiplicity"])
print("hexagon count", f"{f['d0']} - 3*{f['d1']} = {f['hexagon_dimension']}")

# each horizontal slice is a tensor product of two sl(2) spins
for y in (5, 2, -1):
    s = sl2_slice_check(RepLabel(4, 2, 0), y)
    print(f"y={y:+d}  spins {s['j1']} x {s['j2']} -> dims {s['dims']}  ok={s['ok']}")
