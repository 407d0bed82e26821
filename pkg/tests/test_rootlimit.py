import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_teepee
from qgz3.gzbasis import RepLabel, coordinates, dimension, s1_transform
from qgz3.qarith import QParam, branch_sqrt, q_int
from qgz3.repgeneric import GENERATORS, ROOT_SHIFT, relation_residuals
from qgz3.rootlimit import (
    NonFiniteEntry,
    _LimitEngine,
    boundary_audit,
    build_mixed_basis,
    casimir_matrix,
    casimir_structure,
    is_integrable,
    limit_engine_operator,
    limit_oracle,
    mixing_matrix,
    near_root_operator,
    partner_signs,
    regularize,
    sl2_block_operator,
    verify_root,
)

# (top, l, m) combinations exercised throughout; each l also with a second m
CASES = [
    ((5, 2, 0), 3, 1),
    ((5, 2, 0), 3, 2),
    ((8, 4, 0), 5, 1),
    ((8, 4, 0), 5, 2),
    ((6, 3, 0), 3, 1),
    ((7, 4, 0), 5, 3),
    ((9, 5, 0), 5, 1),
    ((10, 5, 0), 7, 1),
    ((13, 7, 0), 7, 3),
]


def ids(c):
    return f"{c[0][0]}{c[0][1]}{c[0][2]}-l{c[1]}-m{c[2]}"


@st.composite
def root_labels(draw, ls=(3, 5, 7)):
    l = draw(st.sampled_from(ls))
    a = draw(st.integers(1, l))
    b = draw(st.integers(1, l))
    m = draw(st.sampled_from([k for k in range(1, l) if math.gcd(k, l) == 1]))
    return RepLabel(a + b, b, 0), l, m


_REPS = {}


def rep_for(top, l, m=1):
    key = (top, l, m)
    if key not in _REPS:
        _REPS[key] = regularize(RepLabel(*top), l, m)
    return _REPS[key]


# --- mixing -------------------------------------------------------------------


@pytest.mark.parametrize("l", [3, 5, 7])
def test_mixing_matrix(l):
    q = QParam.generic()
    T = mixing_matrix(l, q)
    assert abs(np.linalg.det(T) - 1) < 1e-12
    assert T[0, 1] == 0
    qi = lambda n: q_int(n, q).value  # noqa: E731
    assert T[1, 0] ** 2 == pytest.approx(qi(l - 1) / (qi(l + 1) * qi(l)))
    with pytest.raises(ValueError):
        mixing_matrix(l, QParam.root(l))


def test_mixing_entry_branch_l3():
    q = QParam.generic()
    qi = lambda n: q_int(n, q).value  # noqa: E731
    T = mixing_matrix(3, q)
    expected = branch_sqrt(qi(2) / qi(4)) / cmath.sqrt(qi(3))
    assert T[1, 0] == pytest.approx(expected)


def test_mixing_gamma_tends_to_i():
    for l, m in [(3, 1), (5, 2), (7, 3)]:
        g = branch_sqrt(q_int(l - 1, QParam.near_root(l, m, 1e-9)).value / q_int(l + 1, QParam.near_root(l, m, 1e-9)).value)
        assert g == pytest.approx(1j, abs=1e-6)


# --- mixed basis ----------------------------------------------------------------


@pytest.mark.parametrize(
    "top,l,census",
    [((5, 2, 0), 3, (10, 2, 6)), ((8, 4, 0), 5, (37, 11, 15)), ((4, 2, 0), 3, (3, 0, 3))],
)
def test_mixed_basis_census(top, l, census):
    mb = build_mixed_basis(RepLabel(*top), l)
    c = mb.census()
    assert (c["teepee"], c["pairs"], c["self_paired"]) == census == brute_teepee(*top, l)
    assert c["primed"] == 2 * census[1]


@given(root_labels())
def test_mixed_basis_invariants(case):
    lab, l, _ = case
    mb = build_mixed_basis(lab, l)
    assert len(mb.states) == dimension(lab)
    seen = set()
    for a, b in mb.pairs:
        pa, pb = mb.patterns[a], mb.patterns[b]
        assert pa.sl2_dim > l and pb == s1_transform(pa, l)
        # the two families of a pair make up one 2l-dimensional block
        assert pa.sl2_dim + pb.sl2_dim == 2 * l
        assert not ({a, b} & seen)
        seen |= {a, b}
    assert {i for i, st_ in enumerate(mb.states) if st_.primed} == seen
    assert all(mb.patterns[i].sl2_dim == l for i in mb.self_paired)


def test_is_integrable_examples():
    assert is_integrable(RepLabel(4, 2, 0), 3)
    assert not is_integrable(RepLabel(5, 2, 0), 3)
    assert is_integrable(RepLabel(6, 3, 0), 5)


# --- gauge ----------------------------------------------------------------------


def test_partner_signs_known_case():
    lab = RepLabel(5, 2, 0)
    mb = build_mixed_basis(lab, 3)
    signs = partner_signs(lab, 3)
    assert set(signs) == mb.b_members
    by_key = {mb.patterns[i].key: s for i, s in signs.items()}
    assert by_key == {(4, 2, 3): -1, (4, 2, 4): 1}


@pytest.mark.parametrize("case", CASES[:4], ids=ids)
def test_flipping_a_partner_sign_breaks_finiteness(case):
    top, l, m = case
    lab = RepLabel(*top)
    eng = _LimitEngine(lab, l, m)
    b = sorted(eng.signs)[0]
    eng.signs = dict(eng.signs)
    eng.signs[b] = -eng.signs[b]
    with pytest.raises(NonFiniteEntry):
        for g in ("e1", "f1", "e2", "f2"):
            eng.operator(g)


# --- closed forms ---------------------------------------------------------------


@pytest.mark.parametrize("case", CASES, ids=ids)
def test_block_formulas_agree_with_general_limit(case):
    top, l, m = case
    lab = RepLabel(*top)
    for g in ("e1", "f1"):
        a = sl2_block_operator(g, lab, l, m).toarray()
        b = limit_engine_operator(g, lab, l, m).toarray()
        assert np.abs(a - b).max() < 1e-12


@pytest.mark.parametrize("case", CASES, ids=ids)
def test_oracle_equivalence(case):
    top, l, m = case
    rep = rep_for(top, l, m)
    for g in GENERATORS:
        o = limit_oracle(g, rep.label, l, m=m).toarray()
        assert np.abs(o - rep.ops[g].toarray()).max() < 1e-6, g


def test_oracle_threads_are_deterministic(monkeypatch):
    lab = RepLabel(8, 4, 0)
    base = limit_oracle("e2", lab, 5).toarray()
    monkeypatch.setenv("QGZ3_THREADS", "4")
    assert np.array_equal(limit_oracle("e2", lab, 5).toarray(), base)


def test_oracle_rejects_bad_schedule():
    with pytest.raises(ValueError):
        limit_oracle("e1", RepLabel(5, 2, 0), 3, eps_list=(1e-4, 1e-3))


def test_oracle_flags_nonconvergence():
    # with too coarse a schedule the sqrt(eps) series has not settled
    with pytest.raises(NonFiniteEntry):
        limit_oracle("f1", RepLabel(13, 7, 0), 7, eps_list=(0.3, 0.2, 0.1), m=3)


def test_near_root_matrix_has_generic_limit_on_unpaired_columns():
    lab = RepLabel(5, 2, 0)
    rep = rep_for((5, 2, 0), 3)
    mat = near_root_operator("f1", lab, 3, 1, 1e-8)
    col = [p.key for p in rep.mixed.patterns].index((3, 1, 3))
    assert np.abs(mat[:, col] - rep.ops["f1"].toarray()[:, col]).max() < 1e-6


def test_regularized_f1_examples():
    l = 3
    rep = rep_for((5, 2, 0), l)
    keys = [p.key for p in rep.mixed.patterns]
    f1 = rep.ops["f1"].toarray()
    e1 = rep.ops["e1"].toarray()
    r = QParam.root(l)
    # unpaired: the GZ coefficient at zeta
    s, t = keys.index((5, 2, 5)), keys.index((5, 2, 4))
    assert f1[t, s] == pytest.approx(branch_sqrt(q_int(1, r).value) * branch_sqrt(q_int(2, r).value))
    # shortcut into the primed range: sqrt([p12 - p22 - l])
    p12, p22 = 5, 1
    s, t = keys.index((p12, p22, p22 + l + 1)), keys.index((p12, p22, p22 + l))
    assert f1[t, s] == pytest.approx(branch_sqrt(q_int(p12 - p22 - l, r).value))
    assert t in rep.mixed.primed and s not in rep.mixed.primed
    # e1 on the top primed state of the range vanishes
    s = keys.index((p12, p22, p22 + l))
    assert np.abs(e1[:, s]).max() == 0
    assert not rep.ops["e1"].entries.keys() & {(i, s) for i in range(len(keys))}


def _cross_terms(rep):
    out = []
    for g in ("e1", "f1"):
        for (i, j), v in rep.ops[g].entries.items():
            if j in rep.mixed.b_members and i in rep.mixed.a_members:
                out.append((g, i, j))
    return out


def test_cross_term_value_and_the_literal_alternative():
    """B' -> A' cross terms equal i [n] / (2 alpha); the literal (-alpha^2)^(-1/2) [n] fails."""
    rep = rep_for((8, 4, 0), 5)
    r = QParam.root(5)
    mats = rep.dense()
    pats = rep.mixed.patterns
    cross = _cross_terms(rep)
    assert cross
    for g, i, j in cross:
        n = pats[i].sl2_dim
        tgt_b = [b for a, b in rep.mixed.pairs if a == i][0]
        alpha = mats[g][tgt_b, j]
        assert mats[g][i, j] == pytest.approx(1j * q_int(n, r).value / (2 * alpha))
    bad = {k: v.copy() for k, v in mats.items()}
    for g, i, j in cross:
        bad[g][i, j] *= -2
    assert relation_residuals(mats, r.zeta)["[e1,f1]"] < 1e-10
    assert relation_residuals(bad, r.zeta)["[e1,f1]"] > 1e-2


@given(st.integers(1, 6), st.integers(1, 6), st.sampled_from([3, 5, 7]))
def test_cross_term_identity(u, v, l):
    """[u][v] - [l-u][l-v] = [l][u+v-l] at generic q."""
    q = QParam.generic()
    qi = lambda n: q_int(n, q).value  # noqa: E731
    assert abs(qi(u) * qi(v) - qi(l - u) * qi(l - v) - qi(l) * qi(u + v - l)) < 1e-12


# --- verification at the root ------------------------------------------------------


@pytest.mark.parametrize("case", CASES, ids=ids)
def test_root_relations_and_nilpotency(case):
    top, l, m = case
    rep = verify_root(RepLabel(*top), l, m, rep_for(top, l, m))
    assert rep.passed, rep.to_dict()
    assert all(v < 1e-8 for v in rep.nilpotency.values())


@settings(max_examples=25)
@given(root_labels())
def test_root_relations_property(case):
    lab, l, m = case
    rep = regularize(lab, l, m)
    assert all(op.is_finite() for op in rep.ops.values())
    rep_v = verify_root(lab, l, m, rep)
    assert rep_v.passed, rep_v.to_dict()


@settings(max_examples=25)
@given(root_labels())
def test_root_weight_selection_rules(case):
    lab, l, m = case
    rep = regularize(lab, l, m)
    pats = rep.mixed.patterns
    for g in ("h1", "h2"):
        assert all(i == j for i, j in rep.ops[g].entries)
    for g, (dx, dy) in ROOT_SHIFT.items():
        for i, j in rep.ops[g].entries:
            x0, y0, _ = coordinates(pats[j])
            x1, y1, _ = coordinates(pats[i])
            assert (x1 - x0, y1 - y0) == (dx, dy)
            if g in ("e1", "f1"):
                assert pats[i].p11 - pats[j].p11 == (1 if g == "e1" else -1)


def test_nilpotency_examples():
    assert verify_root(RepLabel(5, 2, 0), 3).nilpotency["e1^3"] < 1e-8
    assert verify_root(RepLabel(8, 4, 0), 5).nilpotency["f3^5"] < 1e-8
    assert verify_root(RepLabel(5, 2, 0), 3).residuals["[e1,f1]"] < 1e-8


# --- Casimir -------------------------------------------------------------------


def test_casimir_blocks_521():
    rep = rep_for((5, 2, 0), 3)
    cas = casimir_structure(rep.label, 3, rep=rep)
    assert cas.passed and cas.jordan_blocks == 2 and len(cas.blocks) == 2
    for b in cas.blocks:
        assert b["diagonal"][0] == pytest.approx(-1) and b["diagonal"][1] == pytest.approx(-1)
        assert abs(b["off_diagonal"]) == pytest.approx(3)
        assert b["phase"] == pytest.approx(1)
    assert {tuple(b["A"][:2]) for b in cas.blocks} == {(5, 1)}
    assert {tuple(b["B"][:2]) for b in cas.blocks} == {(4, 2)}
    assert cas.off_block_residual < 1e-10 and cas.scalar_residual < 1e-10


def test_casimir_blocks_840():
    rep = rep_for((8, 4, 0), 5)
    cas = casimir_structure(rep.label, 5, rep=rep)
    assert cas.passed and cas.jordan_blocks == 11
    blk = [b for b in cas.blocks if b["A"][:2] == [8, 2]]
    assert blk and all(b["B"][:2] == [7, 3] for b in blk)
    assert blk[0]["diagonal"][0] == pytest.approx(2 * math.cos(2 * math.pi / 5))


def test_casimir_self_paired_scalar():
    rep = rep_for((5, 2, 0), 3)
    C = casimir_matrix(rep)
    for i in rep.mixed.self_paired:
        assert C[i, i] == pytest.approx(2)
        assert np.abs(np.delete(C[:, i], i)).max() < 1e-12


@pytest.mark.parametrize("case", CASES, ids=ids)
def test_casimir_structure_all_cases(case):
    top, l, m = case
    cas = casimir_structure(RepLabel(*top), l, m, rep_for(top, l, m))
    assert cas.passed
    assert cas.jordan_blocks == len(rep_for(top, l, m).mixed.pairs)


# --- boundary ------------------------------------------------------------------


def test_boundary_audit_examples():
    rep = rep_for((8, 4, 0), 5)
    audit = boundary_audit(rep.label, 5, rep=rep)
    assert audit["passed"]
    assert audit["crossings"]["left_roof"]["nonfinite"] == 0
    rep = rep_for((5, 2, 0), 3)
    audit = boundary_audit(rep.label, 3, rep=rep)
    census = audit["census"]
    assert sum(census.values()) >= 10 and audit["l_dimensional_single_source"]["nonfinite"] == 0


@pytest.mark.parametrize("l", [3, 5])
def test_boundary_audit_all_labels(l):
    for a in range(1, l + 1):
        for b in range(1, l + 1):
            lab = RepLabel(a + b, b, 0)
            audit = boundary_audit(lab, l)
            assert audit["passed"], (lab, audit)
            assert audit["nonfinite_operators"] == 0
