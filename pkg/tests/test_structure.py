from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_patterns
from qgz3.gzbasis import RepLabel, coordinates, dimension, enumerate_basis
from qgz3.qarith import QParam
from qgz3.repgeneric import relation_residuals
from qgz3.rootlimit import regularize
from qgz3.structure import (
    CLASSICAL_LIKE,
    IRREDUCIBLE,
    SPLITS_IN_TWO,
    analyze,
    classify,
    decoupling_residual,
    flat_analysis,
    max_characterization_check,
    quotient_rep,
    sl2_slice_check,
    slice_spins,
    subrep_image,
)


def split_labels(ls=(3, 5, 7)):
    for l in ls:
        for a in range(1, l):
            for b in range(1, l):
                lab = RepLabel(a + b, b, 0)
                if classify(lab, l) == SPLITS_IN_TWO:
                    yield lab, l


def test_classify_examples():
    assert classify(RepLabel(5, 2, 0), 3) == IRREDUCIBLE
    assert classify(RepLabel(6, 3, 0), 5) == SPLITS_IN_TWO
    assert classify(RepLabel(3, 2, 0), 3) == CLASSICAL_LIKE
    assert classify(RepLabel(4, 3, 0), 3) == IRREDUCIBLE


@pytest.mark.parametrize("l", [3, 5, 7])
def test_classify_split_iff_max_below_l(l):
    for a in range(1, l + 1):
        for b in range(1, l + 1):
            lab = RepLabel(a + b, b, 0)
            split = classify(lab, l) == SPLITS_IN_TWO
            assert split == (a + b > l and max(a, b) < l)


@pytest.mark.parametrize(
    "top,l,sub,quot",
    [((4, 2, 0), 3, 1, 7), ((6, 3, 0), 5, 8, 19), ((8, 4, 0), 5, 1, 63)],
)
def test_subrep_and_quotient_dimensions(top, l, sub, quot):
    lab = RepLabel(*top)
    image = subrep_image(lab, l)
    assert len(image) == sub
    q = quotient_rep(lab, l)
    assert q.dim == quot == dimension(lab) - sub
    rep = regularize(lab, l)
    assert not set(image) & rep.mixed.primed
    assert rep.mixed.primed <= set(q.indices)


def test_subrep_image_examples():
    lab = RepLabel(4, 2, 0)
    basis = enumerate_basis(lab)
    assert [basis[i].key for i in subrep_image(lab, 3)] == [(3, 2, 3)]
    src = (5, 3, 1)
    keys = [enumerate_basis(RepLabel(6, 3, 0))[i].key for i in subrep_image(RepLabel(6, 3, 0), 5)]
    assert keys == brute_patterns(*src)
    with pytest.raises(ValueError):
        subrep_image(RepLabel(5, 2, 0), 3)


@pytest.mark.parametrize("lab,l", list(split_labels()), ids=str)
def test_decoupling_and_bookkeeping(lab, l):
    rep = regularize(lab, l)
    image = subrep_image(lab, l)
    assert not any(decoupling_residual(rep, image).values())
    q = quotient_rep(lab, l, rep=rep)
    assert len(image) + q.dim == dimension(lab)
    assert not set(image) & rep.mixed.primed


def test_quotient_is_a_representation():
    rep = quotient_rep(RepLabel(6, 3, 0), 5)
    mats = {g: op.toarray() for g, op in rep.ops.items()}
    z = QParam.root(5).zeta
    assert max(relation_residuals(mats, z).values()) < 1e-10


def test_max_characterization():
    out = max_characterization_check(RepLabel(4, 2, 0), 3)
    assert out["direction"] == "<=" and out["image_max"] == 3
    out = max_characterization_check(RepLabel(6, 3, 0), 5)
    assert out["direction"] == "<=" and out["complement_min"] == 6
    lab = RepLabel(6, 3, 0)
    basis = enumerate_basis(lab)
    img = [basis[i].key for i in subrep_image(lab, 5)]
    assert (4, 3, 4) in img and max(4 - 0, 6 - 3 + 1) == 4
    out = max_characterization_check(RepLabel(8, 4, 0), 5)
    assert max(8 - 0, 8 - 4 + 1) == 8 > 5 and out["complement_min"] >= 6


@pytest.mark.parametrize("lab,l", list(split_labels()), ids=str)
def test_max_characterization_all(lab, l):
    assert max_characterization_check(lab, l)["direction"] == "<="


# --- slices ---------------------------------------------------------------------


def test_slice_examples():
    lab = RepLabel(4, 2, 0)
    s = sl2_slice_check(lab, 5)
    assert (s["j1"], s["j2"], s["dims"], s["ok"]) == ("1/2", "0", [2], True)
    s = sl2_slice_check(lab, 2)
    assert (s["j1"], s["j2"], s["dims"], s["ok"]) == ("1/2", "1/2", [3, 1], True)
    with pytest.raises(ValueError):
        sl2_slice_check(lab, 4)


def test_slice_lower_regime_offset():
    """Below the threshold the second spin is (y + 2 p13 - p23 - p33 - 5) / 6."""
    lab = RepLabel(4, 2, 0)
    j1, j2, regime = slice_spins(lab, -1)
    assert regime == "lower" and (j1, j2) == (Fraction(1, 2), 0)
    # the same rule with -1 in place of +5 would give spin 1 and three weights too many
    assert Counter(coordinates(p)[0] for p in enumerate_basis(lab) if coordinates(p)[1] == -1) == Counter({-1: 1, 1: 1})


@pytest.mark.parametrize("top", [(4, 2, 0), (6, 3, 0), (5, 2, 0), (8, 4, 0), (7, 2, 0), (3, 2, 0)])
def test_slices_generic(top):
    lab = RepLabel(*top)
    for y in sorted({coordinates(p)[1] for p in enumerate_basis(lab)}):
        assert sl2_slice_check(lab, y)["ok"], y


@pytest.mark.parametrize("top,l", [((4, 2, 0), 3), ((6, 3, 0), 5), ((5, 2, 0), 3), ((8, 4, 0), 5)])
def test_slices_root(top, l):
    lab = RepLabel(*top)
    rep = regularize(lab, l)
    for y in sorted({coordinates(p)[1] for p in enumerate_basis(lab)}):
        s = sl2_slice_check(lab, y, l, rep=rep)
        assert s["ok"]
        assert sum(size for size, _ in s["casimir_blocks"]) == len(s["weights"])


@settings(max_examples=40)
@given(st.integers(1, 7), st.integers(1, 7))
def test_slices_property(a, b):
    lab = RepLabel(a + b, b, 0)
    for y in {coordinates(p)[1] for p in enumerate_basis(lab)}:
        assert sl2_slice_check(lab, y)["ok"]


def test_slice_jordan_blocks_at_root():
    lab = RepLabel(5, 2, 0)
    s = sl2_slice_check(lab, 3, 3)
    # the (5,1) and (4,2) families merge into one 6-dim generalized eigenspace with 4 eigenvectors
    assert s["casimir_blocks"] == [[6, 4]]


# --- flat case ------------------------------------------------------------------


def test_flat_420():
    f = flat_analysis(RepLabel(4, 2, 0), 3)
    assert f["dimension"] == 7 and f["flat1_ok"]
    states = [tuple(s) for s in f["states"]]
    assert sum(1 for s in states if s[0] == 4) == 5
    assert sum(1 for s in states if s[1] == 1 and s[0] != 4) == 2
    assert (f["d0"], f["d1"], f["hexagon_dimension"]) == (10, 1, 7)
    assert f["bar_label"] == [5, 1, 0]
    assert f["teepee_line"] and f["teepee_size"] == 3
    assert f["max_multiplicity"] == 1 and f["new_s_bijective"]


def test_flat_irreducible_itself():
    f = flat_analysis(RepLabel(4, 3, 0), 3)
    assert f["flat_irreducible_itself"] and f["dimension"] == dimension(RepLabel(4, 3, 0))
    assert f["hexagon_matches"] and f["new_s_bijective"]


@pytest.mark.parametrize("l", [3, 5, 7])
def test_flat_family(l):
    for b in range(1, l + 1):
        lab = RepLabel(l + 1, b, 0)
        f = flat_analysis(lab, l)
        assert f["teepee_line"] and f["flat1_ok"] and f["hexagon_matches"] and f["new_s_bijective"]
        assert f["max_multiplicity"] == 1


def test_flat_precondition():
    with pytest.raises(ValueError):
        flat_analysis(RepLabel(5, 2, 0), 3)


# --- report ---------------------------------------------------------------------


def test_analyze_reports():
    r = analyze(RepLabel(4, 2, 0), 3)
    assert r.passed and r.quotient_dimension == 7 and r.subrep_dimension == 1
    assert r.flat is not None
    r = analyze(RepLabel(2, 1, 0))
    assert r.dimension == 1 and r.passed
    r = analyze(RepLabel(5, 2, 0), 3)
    assert r.classification == IRREDUCIBLE and r.casimir["jordan_blocks"] == 2
    d = r.to_dict()
    assert d["label"] == [5, 2, 0] and d["passed"]
