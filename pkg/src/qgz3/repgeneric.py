"""Generator matrices in the Gelfand-Zetlin basis at generic q.

The coefficients of e_i, f_i are square roots of products of q-integers.
Every q-integer factor gets its own square root (``branch_sqrt``), so an
entry is a product of the same symbols ``sqrt([n])`` wherever ``[n]``
occurs; with this convention the defining relations hold identically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .gzbasis import GZPattern, RepLabel, coordinates, enumerate_basis
from .qarith import Jet, QParam, branch_sqrt, q_int

__all__ = [
    "GENERATORS",
    "CARTAN",
    "SparseOperator",
    "Edge",
    "edges",
    "coefficient_P",
    "build_operator",
    "build_all",
    "casimir_sl2",
    "casimir_from",
    "qbracket_diag",
    "relation_residuals",
    "RelationReport",
    "verify_generic",
]

GENERATORS = ("h1", "h2", "e1", "f1", "e2", "f2")
CARTAN = ((2, -1), (-1, 2))

# change of (x, y) coordinates produced by each generator
ROOT_SHIFT = {"e1": (2, 0), "f1": (-2, 0), "e2": (-1, 3), "f2": (1, -3)}


@dataclass
class SparseOperator:
    """A generator matrix over an ordered basis; ``entries[(row, col)]``."""

    label: RepLabel
    basis: list
    entries: dict[tuple[int, int], complex]
    gen: str
    primed: frozenset[int] = field(default_factory=frozenset)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def toarray(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for (i, j), v in self.entries.items():
            out[i, j] = v
        return out

    def sorted_entries(self) -> list[tuple[int, int, complex]]:
        return [(i, j, self.entries[i, j]) for i, j in sorted(self.entries)]

    def is_finite(self) -> bool:
        return all(np.isfinite(v.real) and np.isfinite(v.imag) for v in self.entries.values())

    @classmethod
    def from_dense(cls, label, basis, mat, gen, primed=frozenset(), atol=0.0):
        entries = {
            (int(i), int(j)): complex(mat[i, j])
            for i, j in zip(*np.nonzero(np.abs(mat) > atol))
        }
        return cls(label, basis, entries, gen, frozenset(primed))


@dataclass(frozen=True)
class Edge:
    """One matrix element of a raising/lowering generator before evaluation.

    The coefficient is ``sqrt(prod [nums] / prod [dens])``.
    """

    gen: str
    source: GZPattern
    target: GZPattern
    nums: tuple[int, ...]
    dens: tuple[int, ...]


def _p_factors(slot: int, p: GZPattern) -> tuple[tuple[int, ...], tuple[int, ...]]:
    a, b, c = p.label.top
    p12, p22, p11 = p.key
    if slot == 1:
        return (a - p12 + 1, p12 - b - 1, p12 - c - 1, p12 - p11), (p12 - p22, p12 - p22 - 1)
    return (a - p22 + 1, b - p22 + 1, p22 - c - 1, p11 - p22), (p12 - p22, p12 - p22 + 1)


def edges(gen: str, source: GZPattern) -> list[Edge]:
    """Matrix elements of ``gen`` out of ``source`` landing on valid patterns."""
    p12, p22, p11 = source.key
    out = []
    if gen == "f1":
        cand = [(source.moved(d11=-1), (p12 - p11 + 1, p11 - p22 - 1), ())]
    elif gen == "e1":
        cand = [(source.moved(d11=1), (p12 - p11, p11 - p22), ())]
    elif gen == "f2":
        cand = [
            (source.moved(d12=-1), *_p_factors(1, source)),
            (source.moved(d22=-1), *_p_factors(2, source)),
        ]
    elif gen == "e2":
        up12, up22 = source.moved(d12=1), source.moved(d22=1)
        cand = [(up12, *_p_factors(1, up12)), (up22, *_p_factors(2, up22))]
    else:
        raise ValueError(f"no off-diagonal edges for {gen!r}")
    for target, nums, dens in cand:
        if target.is_valid():
            out.append(Edge(gen, source, target, tuple(nums), tuple(dens)))
    return out


def coefficient_P(which: str, slot: tuple[int, int], pattern: GZPattern, q: QParam) -> Jet:
    """One of the q-integer products P1, P2, P3 entering the e2/f2 coefficients."""
    nums, dens = _p_factors(1 if tuple(slot) == (1, 2) else 2, pattern)
    args = {"P1": nums[:3], "P2": nums[3:], "P3": dens}[which]
    out = Jet(1 + 0j)
    for n in args:
        out = out * q_int(n, q)
    return out


def cartan_eigenvalue(gen: str, p: GZPattern) -> int:
    a, b, c = p.label.top
    p12, p22, p11 = p.key
    if gen == "h1":
        return 2 * p11 - (p12 + p22) - 1
    return 2 * (p12 + p22) - p11 - (a + b + c) - 1


def _generic_coefficient(edge: Edge, sqrt_qint: Callable[[int], complex], qint) -> complex:
    # zero numerator first: covers the classical 0/0 where [0] sits in P3
    if 0 in edge.nums:
        return 0j
    num = 1 + 0j
    for n in edge.nums:
        num *= sqrt_qint(n)
    den = 1 + 0j
    for d in edge.dens:
        if d == 0 or qint(d) == 0:
            raise ArithmeticError(f"vanishing denominator [{d}] on {edge}")
        den *= sqrt_qint(d)
    return num / den


def build_operator(gen: str, label: RepLabel, q: QParam, basis=None) -> SparseOperator:
    """Matrix of ``gen`` on ``V(label)`` at a generic (non-root) q."""
    if q.kind == "root":
        raise ValueError("root-of-unity operators are built by qgz3.rootlimit")
    basis = enumerate_basis(label) if basis is None else basis
    index = {p.key: i for i, p in enumerate(basis)}
    entries: dict[tuple[int, int], complex] = {}
    if gen in ("h1", "h2"):
        for j, p in enumerate(basis):
            entries[j, j] = complex(cartan_eigenvalue(gen, p))
        return SparseOperator(label, basis, entries, gen)

    cache: dict[int, complex] = {}

    def qint(n):
        if n not in cache:
            cache[n] = q_int(n, q).value
        return cache[n]

    def sqrt_qint(n):
        return branch_sqrt(qint(n))

    for j, p in enumerate(basis):
        for e in edges(gen, p):
            v = _generic_coefficient(e, sqrt_qint, qint)
            if v != 0:
                entries[index[e.target.key], j] = v
    return SparseOperator(label, basis, entries, gen)


def build_all(label: RepLabel, q: QParam) -> dict[str, SparseOperator]:
    basis = enumerate_basis(label)
    return {g: build_operator(g, label, q, basis) for g in GENERATORS}


def qbracket_diag(h: np.ndarray, qv: complex) -> np.ndarray:
    """``[h] = (q^h - q^-h)/(q - q^-1)`` for a diagonal integer matrix h."""
    d = np.real(np.diag(h))
    return np.diag((qv**d - qv ** (-d)) / (qv - 1 / qv))


def casimir_from(e1: np.ndarray, f1: np.ndarray, h1: np.ndarray, qv: complex) -> np.ndarray:
    """``(q - 1/q)^2 f1 e1 + q^(h1+1) + q^-(h1+1)``."""
    d = np.real(np.diag(h1))
    return (qv - 1 / qv) ** 2 * (f1 @ e1) + np.diag(qv ** (d + 1) + qv ** (-(d + 1)))


def casimir_sl2(label: RepLabel, q: QParam) -> SparseOperator:
    ops = build_all(label, q)
    c = casimir_from(ops["e1"].toarray(), ops["f1"].toarray(), ops["h1"].toarray(), q.value)
    return SparseOperator.from_dense(label, ops["h1"].basis, c, "C_sl2", atol=1e-13)


def relation_residuals(mats: dict[str, np.ndarray], qv: complex) -> dict[str, float]:
    """Max-norm residual of every defining relation of U_q(sl(3))."""
    e = [mats["e1"], mats["e2"]]
    f = [mats["f1"], mats["f2"]]
    h = [mats["h1"], mats["h2"]]
    q2 = qv + 1 / qv
    res = {}

    def norm(x):
        return float(np.abs(x).max()) if x.size else 0.0

    for i in range(2):
        for j in range(2):
            a = CARTAN[i][j]
            res[f"[h{i+1},e{j+1}]"] = norm(h[i] @ e[j] - e[j] @ h[i] - a * e[j])
            res[f"[h{i+1},f{j+1}]"] = norm(h[i] @ f[j] - f[j] @ h[i] + a * f[j])
    for i in range(2):
        for j in range(2):
            rhs = qbracket_diag(h[i], qv) if i == j else 0
            res[f"[e{i+1},f{j+1}]"] = norm(e[i] @ f[j] - f[j] @ e[i] - rhs)
    for name, x in (("e", e), ("f", f)):
        for i, j in ((0, 1), (1, 0)):
            a, b = x[i], x[j]
            res[f"serre_{name}{i+1}{i+1}{j+1}"] = norm(a @ a @ b - q2 * a @ b @ a + b @ a @ a)
    res["[h1,h2]"] = norm(h[0] @ h[1] - h[1] @ h[0])
    return res


@dataclass
class RelationReport:
    label: RepLabel
    q: QParam
    residuals: dict[str, float]
    tol: float

    @property
    def passed(self) -> bool:
        return all(v < self.tol for v in self.residuals.values())

    @property
    def worst(self) -> float:
        return max(self.residuals.values())

    def to_dict(self) -> dict:
        return {
            "residuals": dict(sorted(self.residuals.items())),
            "tol": self.tol,
            "passed": self.passed,
        }


def verify_generic(label: RepLabel, q: QParam | None = None, tol: float = 1e-9) -> RelationReport:
    q = q or QParam.generic()
    if q.kind != "generic":
        raise ValueError("verify_generic needs a generic q")
    ops = build_all(label, q)
    mats = {g: op.toarray() for g, op in ops.items()}
    return RelationReport(label, q, relation_residuals(mats, q.value), tol)


def weight_shifts(op: SparseOperator) -> Iterable[tuple[tuple[int, int], tuple[int, int]]]:
    """``(source xy, target xy)`` for every nonzero entry of ``op``."""
    for (i, j) in op.entries:
        yield coordinates(op.basis[j])[:2], coordinates(op.basis[i])[:2]
