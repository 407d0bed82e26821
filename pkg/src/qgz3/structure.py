"""Structure of the regularized representations at a root of unity.

When ``p13 - p33 > l`` and ``p23`` is strictly between ``p13 - l`` and
``p33 + l``, the label map S2 embeds ``M(p33 + l, p23, p13 - l)`` into
``M(p13, p23, p33)`` as the identity on patterns, and the representation
splits as a direct sum of that image and its complement.  This module
computes both pieces, checks that no generator connects them, and provides
the sl(2)-slice and flat-case analyses.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .gzbasis import (
    GZPattern,
    RepLabel,
    coordinates,
    dimension,
    enumerate_basis,
    s2_source_label,
    teepee_states,
)
from .repgeneric import SparseOperator, casimir_from
from .rootlimit import (
    RegularizedRep,
    casimir_structure,
    is_integrable,
    regularize,
)

__all__ = [
    "CLASSICAL_LIKE",
    "IRREDUCIBLE",
    "SPLITS_IN_TWO",
    "classify",
    "subrep_image",
    "quotient_rep",
    "decoupling_residual",
    "sl2_slice_check",
    "flat_analysis",
    "max_characterization_check",
    "StructureReport",
    "analyze",
]

CLASSICAL_LIKE = "ClassicalLike"
IRREDUCIBLE = "Irreducible"
SPLITS_IN_TWO = "SplitsInTwo"


def classify(label: RepLabel, l: int) -> str:
    a, b, c = label.top
    if a - c <= l:
        return CLASSICAL_LIKE
    if b in (a - l, c + l):
        return IRREDUCIBLE
    return SPLITS_IN_TWO


def _require_split(label, l):
    kind = classify(label, l)
    if kind != SPLITS_IN_TWO:
        raise ValueError(f"{label} at l={l} is {kind}, it does not split")


def subrep_image(label: RepLabel, l: int) -> list[int]:
    """Basis indices of the S2 image of ``M(p33 + l, p23, p13 - l)``."""
    _require_split(label, l)
    src = s2_source_label(label, l)
    out = [i for i, p in enumerate(enumerate_basis(label)) if p.is_valid(src)]
    if len(out) != dimension(src):
        raise AssertionError(f"S2 image of {src} has {len(out)} states, expected {dimension(src)}")
    return out


@dataclass
class QuotientRep:
    label: RepLabel
    l: int
    indices: list[int]
    basis: list[GZPattern]
    ops: dict[str, SparseOperator]

    @property
    def dim(self) -> int:
        return len(self.indices)


def _restrict(op: SparseOperator, keep: list[int]) -> SparseOperator:
    pos = {i: k for k, i in enumerate(keep)}
    ent = {(pos[i], pos[j]): v for (i, j), v in op.entries.items() if i in pos and j in pos}
    basis = [op.basis[i] for i in keep]
    primed = frozenset(pos[i] for i in op.primed if i in pos)
    return SparseOperator(op.label, basis, ent, op.gen, primed)


def quotient_rep(label: RepLabel, l: int, m: int = 1, rep: RegularizedRep | None = None) -> QuotientRep:
    """Regularized generators restricted to the complement of the S2 image.

    The sum is direct, so restriction is the quotient action.
    """
    image = set(subrep_image(label, l))
    rep = rep or regularize(label, l, m)
    keep = [i for i in range(rep.dim) if i not in image]
    ops = {g: _restrict(op, keep) for g, op in rep.ops.items()}
    return QuotientRep(label, l, keep, [rep.mixed.patterns[i] for i in keep], ops)


def decoupling_residual(rep: RegularizedRep, image: list[int]) -> dict[str, int]:
    """Number of stored entries connecting the image and its complement, per generator."""
    inside = set(image)
    out = {}
    for g, op in rep.ops.items():
        out[g] = sum(1 for (i, j) in op.entries if (i in inside) != (j in inside))
    return out


def _tensor_weights(j1: Fraction, j2: Fraction) -> Counter:
    # h1 eigenvalues are twice the sl(2) magnetic numbers
    w = Counter()
    for a in range(int(2 * j1) + 1):
        for b in range(int(2 * j2) + 1):
            w[int(2 * (j1 + j2)) - 2 * a - 2 * b] += 1
    return w


def slice_spins(label: RepLabel, y: int) -> tuple[Fraction, Fraction, str]:
    """``(j1, j2, regime)`` predicted for the slice at pyramid height y."""
    a, b, c = label.top
    if y >= a - 2 * b + c + 2:
        j1 = Fraction(a - b - 1, 2)
        j2 = Fraction(a + b - 2 * c - 1 - y, 6)
        return j1, j2, "upper"
    j1 = Fraction(b - c - 1, 2)
    j2 = Fraction(y - (-2 * a + b + c + 5), 6)
    return j1, j2, "lower"


def sl2_slice_check(label: RepLabel, y: int, l: int | None = None, m: int = 1, rep=None) -> dict:
    """Compare the h1-character of a slice with that of a tensor product of two spins.

    ``y`` is the pyramid coordinate (``h1 + 2 h2 + 2``).  At a root the
    Casimir of the first sl(2) is restricted to the slice and its
    generalized eigenspaces are reported as ``(size, number of eigenvectors)``.
    """
    basis = enumerate_basis(label)
    idx = [i for i, p in enumerate(basis) if coordinates(p)[1] == y]
    if not idx:
        raise ValueError(f"no state of {label} at y={y}")
    j1, j2, regime = slice_spins(label, y)
    out = {
        "y": y,
        "regime": regime,
        "j1": str(j1),
        "j2": str(j2),
        "dims": sorted((basis[i].sl2_dim for i in idx if basis[i].p11 == basis[i].p22 + 1), reverse=True),
    }
    slice_w = Counter(coordinates(basis[i])[0] for i in idx)
    out["weights"] = sorted(slice_w.elements())
    if j1.denominator > 2 or j2.denominator > 2 or j1 < 0 or j2 < 0:
        out["ok"] = False
        out["error"] = "spins are not non-negative half-integers at this y"
        return out
    out["ok"] = slice_w == _tensor_weights(j1, j2)
    if l is not None:
        rep = rep or regularize(label, l, m)
        mats = rep.dense()
        diag_h1 = np.real(np.diag(mats["h1"]))[idx]
        out["ok"] = out["ok"] and Counter(int(round(x)) for x in diag_h1) == slice_w
        C = casimir_from(mats["e1"], mats["f1"], mats["h1"], rep.zeta)[np.ix_(idx, idx)]
        out["casimir_blocks"] = _generalized_eigenspaces(C)
    return out


def _generalized_eigenspaces(C: np.ndarray, tol: float = 1e-8) -> list[list[int]]:
    ev = np.linalg.eigvals(C)
    clusters: list[complex] = []
    for v in ev:
        if not any(abs(v - c) < 1e-6 for c in clusters):
            clusters.append(v)
    out = []
    n = C.shape[0]
    for c in sorted(clusters, key=lambda z: (round(z.real, 8), round(z.imag, 8))):
        size = int(sum(abs(v - c) < 1e-6 for v in ev))
        geo = n - int(np.linalg.matrix_rank(C - c * np.eye(n), tol=tol))
        out.append([size, geo])
    return out


def flat_analysis(label: RepLabel, l: int) -> dict:
    a, b, c = label.top
    if a - c != l + 1:
        raise ValueError(f"flat analysis needs p13 - p33 = l + 1, got {a - c} for l={l}")
    tee = teepee_states(label, l)
    line = all(p.p12 == a and p.p22 == c + 1 for p in tee) and len(tee) == l
    basis = enumerate_basis(label)
    itself = b in (a - 1, a - l)
    if itself:
        states = basis
        flat1_ok = True
    else:
        image = set(subrep_image(label, l))
        states = [p for i, p in enumerate(basis) if i not in image]
        flat1 = [p for p in basis if p.p12 == a or p.p22 == c + 1]
        flat1_ok = [p.key for p in states] == [p.key for p in flat1]
    mult = Counter(coordinates(p)[:2] for p in states)

    # the same representation built on a frozen p22 = p23 line of another label
    bar = RepLabel(b + l, a - l, a - l - 1)
    d0 = dimension(bar)
    d1 = (bar.p13 - bar.p23 - l) * (bar.p13 - bar.p23 - l + 1) // 2
    hexagon = []
    for p12 in range(bar.p23 + 1, bar.p13 + 1):
        for p11 in range(bar.p23 + 1, p12 + 1):
            if not _flat_corner(bar, l, p12, p11):
                hexagon.append((p12, bar.p23, p11))
    image_new = [_new_s(p, label, l) for p in states]
    bijective = sorted(image_new) == sorted(hexagon) and len(set(image_new)) == len(states)
    return {
        "flat_irreducible_itself": itself,
        "teepee_line": line,
        "teepee_size": len(tee),
        "states": [list(p.key) for p in states],
        "dimension": len(states),
        "flat1_ok": flat1_ok,
        "max_multiplicity": max(mult.values()),
        "bar_label": list(bar.top),
        "d0": d0,
        "d1": d1,
        "hexagon_dimension": d0 - 3 * d1,
        "hexagon_matches": d0 - 3 * d1 == len(states) == len(hexagon),
        "new_s_bijective": bijective,
    }


def _flat_corner(bar: RepLabel, l: int, p12: int, p11: int) -> bool:
    top, base = bar.p13, bar.p23
    left = p12 > base + l and p11 > base + l
    right = p12 > base + l and p11 <= p12 - l
    bottom = p12 <= top - l
    return left or right or bottom


def _new_s(p: GZPattern, label: RepLabel, l: int) -> tuple[int, int, int]:
    a = label.p13
    if p.p22 == a - l:
        return p.key
    if p.p12 == a:
        return (p.p22 + l, p.p12 - l, p.p11)
    raise ValueError(f"{p} is outside the flat quotient")


def max_characterization_check(label: RepLabel, l: int) -> dict:
    """Which threshold on ``max(p12 - p33, p13 - p22 + 1)`` reproduces the S2 image."""
    a, b, c = label.top
    image = set(subrep_image(label, l))
    basis = enumerate_basis(label)
    vals = [max(p.p12 - c, a - p.p22 + 1) for p in basis]
    le = {i for i, v in enumerate(vals) if v <= l}
    ge = {i for i, v in enumerate(vals) if v >= l}
    matches = [name for name, s in (("<=", le), (">=", ge)) if s == image]
    if len(matches) != 1:
        raise AssertionError(f"max characterization: matching directions {matches} for {label}")
    return {
        "direction": matches[0],
        "image_max": max(vals[i] for i in image),
        "complement_min": min((v for i, v in enumerate(vals) if i not in image), default=None),
    }


@dataclass
class StructureReport:
    label: RepLabel
    l: int | None
    dimension: int
    classification: str
    integrable: bool
    irreducible: bool
    subrep_dimension: int | None = None
    quotient_dimension: int | None = None
    census: dict = field(default_factory=dict)
    casimir: dict = field(default_factory=dict)
    slices: list = field(default_factory=list)
    decoupling: dict | None = None
    max_characterization: dict | None = None
    flat: dict | None = None

    @property
    def passed(self) -> bool:
        ok = all(s["ok"] for s in self.slices)
        if self.decoupling is not None:
            ok = ok and not any(self.decoupling.values())
        if self.subrep_dimension is not None:
            ok = ok and self.subrep_dimension + self.quotient_dimension == self.dimension
        if self.casimir:
            ok = ok and self.casimir["passed"]
        if self.flat is not None:
            ok = ok and self.flat["flat1_ok"] and self.flat["hexagon_matches"] and self.flat["new_s_bijective"]
        return ok

    def to_dict(self) -> dict:
        d = asdict(self)
        d["label"] = list(self.label.top)
        d["passed"] = self.passed
        return d


def analyze(label: RepLabel, l: int | None = None, m: int = 1) -> StructureReport:
    dim = dimension(label)
    ys = sorted({coordinates(p)[1] for p in enumerate_basis(label)}, reverse=True)
    if l is None:
        slices = [sl2_slice_check(label, y) for y in ys]
        return StructureReport(label, None, dim, "Generic", True, True, slices=slices)
    rep = regularize(label, l, m)
    kind = classify(label, l)
    rep_census = rep.mixed.census()
    cas = casimir_structure(label, l, m, rep)
    report = StructureReport(
        label,
        l,
        dim,
        kind,
        integrable=is_integrable(label, l),
        irreducible=kind != SPLITS_IN_TWO,
        census=rep_census,
        casimir={
            "pairs": len(cas.blocks),
            "jordan_blocks": cas.jordan_blocks,
            "off_block_residual": cas.off_block_residual,
            "scalar_residual": cas.scalar_residual,
            "passed": cas.passed,
        },
        slices=[sl2_slice_check(label, y, l, m, rep) for y in ys],
    )
    if kind == SPLITS_IN_TWO:
        image = subrep_image(label, l)
        report.subrep_dimension = len(image)
        report.quotient_dimension = dim - len(image)
        report.decoupling = decoupling_residual(rep, image)
        report.max_characterization = max_characterization_check(label, l)
    if label.p13 - label.p33 == l + 1:
        report.flat = flat_analysis(label, l)
    return report
