"""Regularization of GZ representations at q = zeta, a primitive l-th root of 1.

Inside the teepee each S1-pair ``(A, B = S1(A))`` with ``p12 - p22 > l`` on
A is replaced by the mixed states

    A' = sqrt([l]) A,        B' = sqrt([l-1]/[l+1]) [l]^(-1/2) A + [l]^(-1/2) B

and the limit q -> zeta is taken.  Write ``s = sqrt([l])``.  Near the root
every generic coefficient factorizes as ``s**j * R(eps)`` with R regular,
because each q-integer ``[k l]`` is ``([k l]/[l]) * [l]``.  After the change
of basis a matrix element is a finite Laurent sum in s with jet-valued
coefficients, and its limit is read off exactly:

    s**0 * J   ->  J.value
    s**-2 * J  ->  J.deriv / (d[l]/d eps)     (J.value must vanish)

Terms with s**-1 must vanish at the root; anything more singular is an
error.  The numerical path (``limit_oracle``) evaluates the same change of
basis at finite eps and extrapolates; it shares only the GZ phase
convention with the closed forms.

Phase convention.  Square roots are taken per q-integer on the
``branch_sqrt`` branch, anchored at the root value; ``[k l]`` contributes
``sqrt(k) * s``.  The GZ states B of each pair carry an extra sign so that
their coefficient chains agree with those of their partners at the root;
these signs are fixed by ``partner_signs``.
"""

from __future__ import annotations

import cmath
import logging
import math
import os
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .gzbasis import (
    BasisState,
    GZPattern,
    RepLabel,
    enumerate_basis,
    in_teepee,
    s1_transform,
)
from .qarith import Jet, QParam, branch_sqrt, d_limit, jet_sqrt, q_int, q_int_ratio
from .repgeneric import (
    GENERATORS,
    SparseOperator,
    cartan_eigenvalue,
    casimir_from,
    edges,
    relation_residuals,
)

log = logging.getLogger(__name__)

__all__ = [
    "MixedBasis",
    "RegularizedRep",
    "NonFiniteEntry",
    "mixing_matrix",
    "build_mixed_basis",
    "partner_signs",
    "regularized_operator",
    "regularize",
    "sl2_block_operator",
    "near_root_operator",
    "limit_oracle",
    "verify_root",
    "casimir_structure",
    "boundary_audit",
    "is_integrable",
    "DEFAULT_EPS",
]

# eps schedule of the oracle, half-decade steps; the extrapolation variable is sqrt(eps)
DEFAULT_EPS = (1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 3e-6, 1e-6)

_ZERO_TOL = 1e-9


class NonFiniteEntry(ArithmeticError):
    """A matrix element has no finite limit at the root."""


def _max_workers() -> int:
    try:
        return max(1, int(os.environ.get("QGZ3_THREADS", "1")))
    except ValueError:
        return 1


def mixing_matrix(l: int, q: QParam) -> np.ndarray:
    """The 2x2 mixing of an S1-pair at a non-root q (rows: A', B')."""
    if q.kind == "root":
        raise ValueError("the mixing matrix diverges at the root; use the limit formulas")
    ql = q_int(l, q).value
    s = cmath.sqrt(ql)
    g = branch_sqrt(q_int(l - 1, q).value / q_int(l + 1, q).value)
    return np.array([[s, 0], [g / s, 1 / s]], dtype=complex)


@dataclass
class MixedBasis:
    label: RepLabel
    l: int
    states: list[BasisState]
    pairs: list[tuple[int, int]]
    self_paired: list[int]

    @property
    def patterns(self) -> list[GZPattern]:
        return [st.pattern for st in self.states]

    @cached_property
    def partner(self) -> dict[int, int]:
        out = {}
        for a, b in self.pairs:
            out[a], out[b] = b, a
        return out

    @cached_property
    def a_members(self) -> frozenset[int]:
        return frozenset(a for a, _ in self.pairs)

    @cached_property
    def b_members(self) -> frozenset[int]:
        return frozenset(b for _, b in self.pairs)

    @property
    def primed(self) -> frozenset[int]:
        return self.a_members | self.b_members

    @cached_property
    def index(self) -> dict[tuple[int, int, int], int]:
        return {st.pattern.key: i for i, st in enumerate(self.states)}

    @property
    def teepee_size(self) -> int:
        return 2 * len(self.pairs) + len(self.self_paired)

    def census(self) -> dict:
        return {
            "dimension": len(self.states),
            "teepee": self.teepee_size,
            "pairs": len(self.pairs),
            "primed": 2 * len(self.pairs),
            "self_paired": len(self.self_paired),
        }


def build_mixed_basis(label: RepLabel, l: int) -> MixedBasis:
    basis = enumerate_basis(label)
    index = {p.key: i for i, p in enumerate(basis)}
    pairs, selfp = [], []
    for i, p in enumerate(basis):
        if not in_teepee(p, l):
            continue
        if p.sl2_dim == l:
            selfp.append(i)
        elif p.sl2_dim > l:
            pairs.append((i, index[s1_transform(p, l).key]))
    primed = {i for pr in pairs for i in pr}
    states = [BasisState(p, i in primed) for i, p in enumerate(basis)]
    return MixedBasis(label, l, states, pairs, selfp)


def is_integrable(label: RepLabel, l: int) -> bool:
    integrable = not build_mixed_basis(label, l).pairs
    if integrable != (label.theta_pairing < l):
        raise AssertionError(f"pair census disagrees with lambda1+lambda2 < l for {label}")
    return integrable


# --- root factorization of coefficients ------------------------------------


class _RootFactors:
    """``sqrt([n])`` at the root as ``(s power, regular jet)``, cached."""

    def __init__(self, l: int, m: int):
        self.l, self.m = l, m
        self.q = QParam.root(l, m)
        self._cache: dict[int, tuple[int, Jet]] = {}
        self.gamma = jet_sqrt(q_int(l - 1, self.q) / q_int(l + 1, self.q))

    def sqrt_qint(self, n: int) -> tuple[int, Jet]:
        if n not in self._cache:
            if n == 0:
                raise ValueError("[0] has no factorization")
            if n % self.l == 0:
                self._cache[n] = (1, jet_sqrt(q_int_ratio(n // self.l, self.q)))
            else:
                self._cache[n] = (0, jet_sqrt(q_int(n, self.q)))
        return self._cache[n]

    def edge(self, edge) -> tuple[int, Jet] | None:
        """``(j, R)`` with coefficient ``s**j R``; None for a classical zero."""
        if 0 in edge.nums:
            return None
        j, r = 0, Jet(1 + 0j)
        for n in edge.nums:
            a, b = self.sqrt_qint(n)
            j, r = j + a, r * b
        for d in edge.dens:
            if d == 0:
                raise NonFiniteEntry(f"classical [0] denominator without numerator zero: {edge}")
            a, b = self.sqrt_qint(d)
            j, r = j - a, r / b
        return j, r


def partner_signs(label: RepLabel, l: int, m: int = 1, mixed: MixedBasis | None = None) -> dict[int, int]:
    """Sign of each GZ state B of an S1-pair in the phase convention.

    The signs are forced by requiring the leading singular parts of the
    mixed-basis coefficients to cancel; three kinds of constraint arise
    (A and B feeding a common pair, B' and A' feeding a common state
    outside the pairs, an outside state feeding both members of a pair).
    States left unconstrained get +1 on the smallest index of their
    connected component.
    """
    mb = mixed or build_mixed_basis(label, l)
    if not mb.pairs:
        return {}
    rf = _RootFactors(l, m)
    pats = mb.patterns
    idx = mb.index
    partner = mb.partner
    B = mb.b_members
    gamma = rf.gamma.value

    def coeffs(i):
        out = defaultdict(dict)
        for gen in ("e1", "f1", "e2", "f2"):
            for e in edges(gen, pats[i]):
                r = rf.edge(e)
                if r is not None:
                    out[gen][idx[e.target.key]] = r
        return out

    # constraints: sign[x] / sign[y] = ratio, y=None meaning the constant 1
    cons: list[tuple[int, int | None, complex]] = []
    for a, b in mb.pairs:
        ca, cb = coeffs(a), coeffs(b)
        for gen in ca.keys() | cb.keys():
            da, db = ca.get(gen, {}), cb.get(gen, {})
            for t, (j, r) in da.items():
                if t in partner:
                    tb = partner[t]
                    if tb in db and min(j, db[tb][0]) <= 1:
                        cons.append((tb, b, r.value / db[tb][1].value))
                elif t in db and min(j, db[t][0]) <= 0:
                    cons.append((b, None, 1j * db[t][1].value / r.value))
    for u in range(len(pats)):
        if u in partner:
            continue
        cu = coeffs(u)
        for gen, d in cu.items():
            for t, (j, r) in d.items():
                if t in mb.a_members and partner[t] in d:
                    j2, r2 = d[partner[t]]
                    if min(j, j2) <= 0:
                        cons.append((partner[t], None, r.value / (gamma * r2.value)))

    adj = defaultdict(list)
    sign: dict[int, complex] = {}
    for x, y, r in cons:
        if y is None:
            adj[x].append((None, r))
        else:
            adj[x].append((y, r))
            adj[y].append((x, 1 / r))
    order = sorted(B, key=lambda i: (not any(y is None for y, _ in adj[i]), i))
    for start in order:
        if start in sign:
            continue
        fixed = [r for y, r in adj[start] if y is None]
        sign[start] = fixed[0] if fixed else 1.0
        stack = [start]
        while stack:
            x = stack.pop()
            for y, r in adj[x]:
                if y is not None and y not in sign:
                    sign[y] = sign[x] / r
                    stack.append(y)
    for x, y, r in cons:
        ratio = sign[x] / (1.0 if y is None else sign[y])
        if abs(ratio - r) > 1e-8:
            raise NonFiniteEntry(f"no consistent phase for pair state {pats[x]} of {label}")
    out = {}
    for i, v in sign.items():
        if abs(abs(v) - 1) > 1e-8 or abs(v.imag) > 1e-8:
            raise NonFiniteEntry(f"non-real phase {v} for {pats[i]}")
        out[i] = 1 if v.real > 0 else -1
    return out


# --- closed-form limits -------------------------------------------------------


class _LimitEngine:
    def __init__(self, label: RepLabel, l: int, m: int = 1):
        self.label, self.l, self.m = label, l, m
        self.mb = build_mixed_basis(label, l)
        self.rf = _RootFactors(l, m)
        self.signs = partner_signs(label, l, m, self.mb)

    def _phase(self, i: int) -> int:
        return self.signs.get(i, 1)

    def _source_terms(self, i):
        mb, one = self.mb, Jet(1 + 0j)
        if i in mb.a_members:
            return [(i, 1, one)]
        if i in mb.b_members:
            return [(mb.partner[i], -1, self.rf.gamma), (i, -1, one)]
        return [(i, 0, one)]

    def _target_terms(self, t):
        mb, one = self.mb, Jet(1 + 0j)
        if t in mb.a_members:
            return [(t, -1, one)]
        if t in mb.b_members:
            return [(t, 1, one), (mb.partner[t], -1, -self.rf.gamma)]
        return [(t, 0, one)]

    def column(self, gen: str, i: int) -> dict[int, complex]:
        pats, idx = self.mb.patterns, self.mb.index
        acc: dict[int, dict[int, Jet]] = defaultdict(dict)
        for o, k0, c0 in self._source_terms(i):
            for e in edges(gen, pats[o]):
                r = self.rf.edge(e)
                if r is None:
                    continue
                j, R = r
                t = idx[e.target.key]
                R = R * (self._phase(t) / self._phase(o))
                for nt, k1, c1 in self._target_terms(t):
                    k = k0 + j + k1
                    prev = acc[nt].get(k)
                    term = c0 * R * c1
                    acc[nt][k] = term if prev is None else prev + term
        out = {}
        for nt, series in acc.items():
            v = self._limit(series, gen, i, nt)
            if v is not None:
                out[nt] = v
        return out

    def _limit(self, series: dict[int, Jet], gen, i, nt) -> complex | None:
        total, seen = 0j, False
        for k, J in series.items():
            scale = _ZERO_TOL * max(1.0, abs(J.deriv))
            if k < -2:
                if abs(J.value) > scale or abs(J.deriv) > scale:
                    raise NonFiniteEntry(self._where(gen, i, nt, k))
            elif k == -2:
                if abs(J.value) > scale:
                    raise NonFiniteEntry(self._where(gen, i, nt, k))
                total += d_limit(J, Jet(J.value), self.l, self.rf.q.zeta)
                seen = True
            elif k == -1:
                if abs(J.value) > scale:
                    raise NonFiniteEntry(self._where(gen, i, nt, k))
            elif k == 0:
                total += J.value
                seen = True
        if not seen or abs(total) < 1e-13:
            return None
        return total

    def _where(self, gen, i, nt, k):
        p = self.mb.patterns
        return f"{gen}: {p[i]} -> {p[nt]} has an s^{k} singularity in {self.label} at l={self.l}"

    def operator(self, gen: str) -> SparseOperator:
        mb = self.mb
        if gen in ("h1", "h2"):
            ent = {(j, j): complex(cartan_eigenvalue(gen, p)) for j, p in enumerate(mb.patterns)}
        else:
            ent = {}
            for j in range(len(mb.states)):
                for t, v in self.column(gen, j).items():
                    ent[t, j] = v
        return SparseOperator(self.label, mb.states, ent, gen, mb.primed)


def _rho(rf: _RootFactors, n: int) -> complex:
    """Root value of ``sqrt([n])`` (0 for multiples of l)."""
    if n == 0:
        return 0j
    j, r = rf.sqrt_qint(n)
    return 0j if j > 0 else r.value


def sl2_block_operator(gen: str, label: RepLabel, l: int, m: int = 1) -> SparseOperator:
    """e1 or f1 at the root from the explicit indecomposable-block formulas.

    Blocks are the (p12, p22) families of S1-pairs: the A family with
    ``n = p12 - p22 > l`` and its partner family ``(p22 + l, p12 - l)``.
    With ``alpha`` the GZ coefficient of the A family, a B' state is sent to
    ``alpha B'`` plus a cross term ``i [n] / (2 alpha) A'``; at the edges of
    the pair range the unprimed/primed shortcuts carry ``sqrt([n - l])``.
    """
    if gen not in ("e1", "f1"):
        raise ValueError("sl2 block formulas cover e1 and f1 only")
    mb = build_mixed_basis(label, l)
    rf = _RootFactors(l, m)
    gamma = rf.gamma.value
    idx = mb.index
    a_fam = {mb.patterns[a].key[:2] for a in mb.a_members}
    b_fam = {mb.patterns[b].key[:2]: mb.patterns[a].key[:2] for a, b in mb.pairs}
    ent: dict[tuple[int, int], complex] = {}

    def put(target_key, col, v):
        if v != 0 and target_key in idx:
            ent[idx[target_key], col] = v

    def gz1(p12, p22, p11):
        if gen == "f1":
            return _rho(rf, p12 - p11 + 1) * _rho(rf, p11 - p22 - 1)
        return _rho(rf, p12 - p11) * _rho(rf, p11 - p22)

    step = -1 if gen == "f1" else 1
    for col, p in enumerate(mb.patterns):
        p12, p22, p11 = p.key
        tgt = (p12, p22, p11 + step)
        if (p12, p22) in b_fam:
            P12, P22 = b_fam[p12, p22]
            n = P12 - P22
            edge = P12 - l + 1 if gen == "f1" else P22 + l
            if p11 == edge:
                put((P12, P22, p11 + step), col, gamma * _rho(rf, n - l))
            else:
                alpha = gz1(P12, P22, p11)
                put(tgt, col, alpha)
                cross = gamma * q_int(n, rf.q).value / (2 * alpha)
                put((P12, P22, p11 + step), col, cross)
        elif (p12, p22) in a_fam:
            n = p12 - p22
            lo, hi = p12 - l, p22 + l  # pair range lo < p11 <= hi
            if gen == "f1":
                if p11 == hi + 1:
                    put(tgt, col, _rho(rf, n - l))
                elif p11 == lo + 1:
                    pass
                else:
                    put(tgt, col, gz1(p12, p22, p11))
            else:
                if p11 == lo:
                    put(tgt, col, _rho(rf, n - l))
                elif p11 == hi:
                    pass
                else:
                    put(tgt, col, gz1(p12, p22, p11))
        else:
            put(tgt, col, gz1(p12, p22, p11))
    return SparseOperator(label, mb.states, ent, gen, mb.primed)


@dataclass
class RegularizedRep:
    label: RepLabel
    l: int
    m: int
    mixed: MixedBasis
    ops: dict[str, SparseOperator]
    signs: dict[int, int] = field(default_factory=dict)

    @property
    def zeta(self) -> complex:
        return QParam.root(self.l, self.m).zeta

    def dense(self) -> dict[str, np.ndarray]:
        return {g: op.toarray() for g, op in self.ops.items()}

    @property
    def dim(self) -> int:
        return len(self.mixed.states)


def regularized_operator(gen: str, label: RepLabel, l: int, m: int = 1, engine=None) -> SparseOperator:
    """Generator ``gen`` of the regularized representation at q = zeta."""
    if gen in ("e1", "f1"):
        op = sl2_block_operator(gen, label, l, m)
    else:
        op = (engine or _LimitEngine(label, l, m)).operator(gen)
    if not op.is_finite():
        raise NonFiniteEntry(f"{gen} on {label} has non-finite entries")
    return op


def regularize(label: RepLabel, l: int, m: int = 1) -> RegularizedRep:
    eng = _LimitEngine(label, l, m)
    ops = {g: regularized_operator(g, label, l, m, eng) for g in GENERATORS}
    return RegularizedRep(label, l, m, eng.mb, ops, eng.signs)


def limit_engine_operator(gen: str, label: RepLabel, l: int, m: int = 1) -> SparseOperator:
    """Any generator through the general Laurent-series limit (no block formulas)."""
    return _LimitEngine(label, l, m).operator(gen)


# --- numerical oracle ---------------------------------------------------------


def near_root_operator(gen: str, label: RepLabel, l: int, m: int, eps: float, signs=None) -> np.ndarray:
    """Dense GZ matrix of ``gen`` at ``q = zeta exp(eps)`` in the root phase convention."""
    q = QParam.near_root(l, m, eps)
    basis = enumerate_basis(label)
    idx = {p.key: i for i, p in enumerate(basis)}
    d = len(basis)
    mat = np.zeros((d, d), dtype=complex)
    if gen in ("h1", "h2"):
        for j, p in enumerate(basis):
            mat[j, j] = cartan_eigenvalue(gen, p)
        return mat
    signs = partner_signs(label, l, m) if signs is None else signs
    s = cmath.sqrt(q_int(l, q).value)
    cache: dict[int, complex] = {}

    def root(n):
        if n not in cache:
            if n % l == 0:
                cache[n] = branch_sqrt(q_int_ratio(n // l, q).value) * s
            else:
                cache[n] = branch_sqrt(q_int(n, q).value)
        return cache[n]

    for j, p in enumerate(basis):
        for e in edges(gen, p):
            if 0 in e.nums:
                continue
            v = 1 + 0j
            for n in e.nums:
                v *= root(n)
            for n in e.dens:
                if n == 0:
                    raise NonFiniteEntry(f"[0] denominator on {e}")
                v /= root(n)
            t = idx[e.target.key]
            mat[t, j] = v * signs.get(t, 1) / signs.get(j, 1)
    return mat


def _mixed_at(gen, label, l, m, eps, mb, signs):
    q = QParam.near_root(l, m, eps)
    mat = near_root_operator(gen, label, l, m, eps, signs)
    P = np.eye(mat.shape[0], dtype=complex)
    T = mixing_matrix(l, q)
    for a, b in mb.pairs:
        # columns of P are the new basis vectors in old coordinates
        P[a, a] = T[0, 0]
        P[a, b], P[b, b] = T[1, 0], T[1, 1]
    return np.linalg.solve(P, mat @ P)


def limit_oracle(
    gen: str,
    label: RepLabel,
    l: int,
    eps_list=DEFAULT_EPS,
    m: int = 1,
    conv_tol: float = 1e-5,
) -> SparseOperator:
    """Mixed-basis generic matrices extrapolated to the root.

    Matrix elements are power series in sqrt(eps), so the extrapolation runs
    in that variable.  An entry whose estimate moves by more than
    ``conv_tol`` (relative to the largest entry, if that exceeds 1) when the
    smallest step is dropped is reported as non-convergent.
    """
    eps_list = tuple(float(e) for e in eps_list)
    if len(eps_list) < 2 or any(b >= a for a, b in zip(eps_list, eps_list[1:])) or eps_list[-1] <= 0:
        raise ValueError("eps_list must be positive and strictly decreasing, length >= 2")
    mb = build_mixed_basis(label, l)
    signs = partner_signs(label, l, m, mb)
    with ThreadPoolExecutor(max_workers=_max_workers()) as ex:
        samples = list(ex.map(lambda e: _mixed_at(gen, label, l, m, e, mb, signs), eps_list))
    hs = [math.sqrt(e) for e in eps_list]
    full = np.asarray(_richardson(hs, samples))
    coarse = np.asarray(_richardson(hs[:-1], samples[:-1]))
    drift = float(np.abs(full - coarse).max()) if full.size else 0.0
    scale = max(1.0, float(np.abs(full).max())) if full.size else 1.0
    if drift > conv_tol * scale:
        raise NonFiniteEntry(f"oracle for {gen} on {label} does not converge (drift {drift:.2e})")
    full[np.abs(full) < 1e-9] = 0
    return SparseOperator.from_dense(label, mb.states, full, gen, mb.primed)


def _richardson(hs, samples):
    from .qarith import richardson_limit

    return richardson_limit(hs, samples)


# --- verification -----------------------------------------------------------


@dataclass
class RootReport:
    label: RepLabel
    l: int
    m: int
    residuals: dict[str, float]
    nilpotency: dict[str, float]
    tol: float

    @property
    def passed(self) -> bool:
        return all(v < self.tol for v in self.residuals.values()) and all(
            v < self.tol for v in self.nilpotency.values()
        )

    def to_dict(self) -> dict:
        return {
            "l": self.l,
            "m": self.m,
            "residuals": dict(sorted(self.residuals.items())),
            "nilpotency": dict(sorted(self.nilpotency.items())),
            "tol": self.tol,
            "passed": self.passed,
        }


def verify_root(label: RepLabel, l: int, m: int = 1, rep: RegularizedRep | None = None, tol: float = 1e-8) -> RootReport:
    rep = rep or regularize(label, l, m)
    z = rep.zeta
    mats = rep.dense()
    res = relation_residuals(mats, z)
    e1, e2, f1, f2 = mats["e1"], mats["e2"], mats["f1"], mats["f2"]
    e3 = e1 @ e2 - e2 @ e1 / z
    f3 = f2 @ f1 - z * f1 @ f2
    nil = {}
    for name, x in (("e1", e1), ("e2", e2), ("e3", e3), ("f1", f1), ("f2", f2), ("f3", f3)):
        p = np.linalg.matrix_power(x, l)
        nil[f"{name}^{l}"] = float(np.abs(p).max()) if p.size else 0.0
    return RootReport(label, l, m, res, nil, tol)


@dataclass
class CasimirReport:
    label: RepLabel
    l: int
    blocks: list[dict]
    off_block_residual: float
    scalar_residual: float
    tol: float = 1e-10

    @property
    def jordan_blocks(self) -> int:
        return sum(1 for b in self.blocks if b["jordan"])

    @property
    def passed(self) -> bool:
        return (
            all(b["jordan"] and abs(b["phase"] - 1) < 1e-8 for b in self.blocks)
            and self.off_block_residual < self.tol
            and self.scalar_residual < self.tol
        )

    def to_dict(self) -> dict:
        return {
            "blocks": self.blocks,
            "jordan_blocks": self.jordan_blocks,
            "off_block_residual": self.off_block_residual,
            "scalar_residual": self.scalar_residual,
            "passed": self.passed,
        }


def casimir_matrix(rep: RegularizedRep) -> np.ndarray:
    mats = rep.dense()
    return casimir_from(mats["e1"], mats["f1"], mats["h1"], rep.zeta)


def casimir_structure(label: RepLabel, l: int, m: int = 1, rep: RegularizedRep | None = None) -> CasimirReport:
    """The sl(2) Casimir at the root: a Jordan block on every S1-pair, scalar elsewhere.

    Columns are images of basis vectors, so on ``(A', B')`` the block reads
    ``C A' = c A'`` and ``C B' = c B' + x A'`` with
    ``x = i (q - 1/q)^2 [p12 - p22]``.  ``phase`` is the measured x over
    that value.
    """
    rep = rep or regularize(label, l, m)
    z = rep.zeta
    C = casimir_matrix(rep)
    mb = rep.mixed
    pats = mb.patterns
    blocks = []
    mask = np.ones_like(C, dtype=bool)
    for a, b in mb.pairs:
        n = pats[a].sl2_dim
        diag = z**n + z ** (-n)
        expected = 1j * (z - 1 / z) ** 2 * q_int(n, QParam.root(l, m)).value
        off = C[a, b]
        blk = C[np.ix_([a, b], [a, b])]
        jordan = abs(blk[1, 0]) < 1e-10 and abs(off) > 1e-8 and abs(blk[0, 0] - blk[1, 1]) < 1e-10
        blocks.append(
            {
                "A": list(pats[a].key),
                "B": list(pats[b].key),
                "diagonal": [complex(blk[0, 0]), complex(blk[1, 1])],
                "expected_diagonal": complex(diag),
                "off_diagonal": complex(off),
                "lower": complex(blk[1, 0]),
                "expected_off_diagonal": complex(expected),
                "phase": complex(off / expected) if abs(expected) > 0 else complex("nan"),
                "jordan": bool(jordan and abs(blk[0, 0] - diag) < 1e-10),
            }
        )
        mask[a, b] = mask[b, a] = False
    off = C.copy()
    np.fill_diagonal(off, 0)
    off_block = float(np.abs(off[mask]).max()) if off.size else 0.0
    scalar = 0.0
    fam = defaultdict(list)
    for i, p in enumerate(pats):
        fam[p.key[:2]].append(i)
    for members in fam.values():
        d = np.diag(C)[members]
        scalar = max(scalar, float(np.abs(d - d[0]).max()))
        n = pats[members[0]].sl2_dim
        scalar = max(scalar, float(abs(d[0] - (z**n + z ** (-n)))))
    return CasimirReport(label, l, blocks, off_block, scalar)


BOUNDARY_CLASSES = ("left_roof", "right_roof", "front_entrance", "back_entrance", "l_dimensional")


def boundary_classes(p: GZPattern, l: int) -> list[str]:
    a, b, c = p.label.top
    p12, p22, p11 = p.key
    out = []
    if p22 == a - l:
        out.append("left_roof")
    if p12 == c + l + 1:
        out.append("right_roof")
    if p22 == p11 - l:
        out.append("front_entrance")
    if p12 == p11 + l - 1:
        out.append("back_entrance")
    if p12 - p22 == l:
        out.append("l_dimensional")
    return out


def _compensating_arg(cls: str, t: GZPattern) -> int | None:
    a, b, c = t.label.top
    p12, p22, p11 = t.key
    return {
        "left_roof": a - p22,
        "right_roof": p12 - c - 1,
        "front_entrance": p11 - p22,
        "back_entrance": p12 - p11 + 1,
    }.get(cls)


def boundary_audit(label: RepLabel, l: int, m: int = 1, rep: RegularizedRep | None = None) -> dict:
    """Census of teepee boundary states and the finiteness of every crossing entry.

    A crossing is a generic e2/f2 matrix element from a state outside the
    teepee to a boundary state.  For the four roof/entrance classes the
    named factor must vanish at the root on the target; for the
    l-dimensional class the landing entries are counted by source.
    """
    rep = rep or regularize(label, l, m)
    mb = rep.mixed
    pats = mb.patterns
    teepee = {i for i, p in enumerate(pats) if in_teepee(p, l)}
    census = {c: 0 for c in BOUNDARY_CLASSES}
    census["interior"] = 0
    for i in sorted(teepee):
        cl = boundary_classes(pats[i], l)
        for c in cl:
            census[c] += 1
        if not cl:
            census["interior"] += 1
    crossings = {c: {"count": 0, "nonfinite": 0, "factor_violations": 0} for c in BOUNDARY_CLASSES}
    single_source = {"targets": 0, "nonfinite": 0}
    mats = rep.dense()
    landing = defaultdict(set)
    for gen in ("e2", "f2"):
        for j, p in enumerate(pats):
            for e in edges(gen, p):
                t = mb.index[e.target.key]
                if pats[t].sl2_dim == l:
                    landing[t].add((gen, j))
                if j in teepee or t not in teepee:
                    continue
                v = mats[gen][t, j]
                for c in boundary_classes(pats[t], l):
                    rec = crossings[c]
                    rec["count"] += 1
                    if not np.isfinite(v):
                        rec["nonfinite"] += 1
                    arg = _compensating_arg(c, pats[t])
                    if arg is not None and arg % l != 0:
                        rec["factor_violations"] += 1
    for t, srcs in landing.items():
        for gen in ("e2", "f2"):
            if sum(1 for g, _ in srcs if g == gen) == 1:
                single_source["targets"] += 1
                if not all(np.isfinite(mats[gen][t, :])):
                    single_source["nonfinite"] += 1
    nonfinite = sum(int(not op.is_finite()) for op in rep.ops.values())
    return {
        "census": census,
        "crossings": crossings,
        "l_dimensional_single_source": single_source,
        "nonfinite_operators": nonfinite,
        "passed": nonfinite == 0
        and all(r["nonfinite"] == 0 and r["factor_violations"] == 0 for r in crossings.values())
        and single_source["nonfinite"] == 0,
    }
