import json
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from lamina.lamination import (
    FiniteLamination,
    LaminationError,
    ResourceError,
    backward_lift,
    check_forward_invariant,
    clean,
    crossing_pairs,
    good_region,
    leaves_cross,
    make_leaf,
    pairwise_compatible,
)
from lamina.major import MajorError, PrimitiveMajor, random_generic_major

from oracles import crosses, good_area

RABBIT = PrimitiveMajor(2, [[F(1, 7), F(9, 14)]])
DIAMETER = PrimitiveMajor(2, [[F(0), F(1, 2)]])
# three outer leaves cutting off arcs of length 1/4, rotated so that one square wraps past 0
PM4 = PrimitiveMajor(4, [[F(7, 8), F(1, 8)], [F(5, 24), F(11, 24)], [F(13, 24), F(19, 24)]])


def lam(*pairs, d=2):
    return FiniteLamination(d, frozenset(make_leaf(F(a), F(b)) for a, b in pairs))


def test_leaves_cross_examples():
    assert leaves_cross((F(0), F(1, 2)), (F(1, 4), F(3, 4)))
    assert not leaves_cross((F(0), F(1, 2)), (F(0), F(1, 4)))
    assert not leaves_cross((F(1, 10), F(13, 30)), (F(1, 2), F(5, 6)))


def test_degenerate_leaf():
    with pytest.raises(LaminationError):
        make_leaf(F(1, 3), F(4, 3))


def test_good_region_diameter():
    g = good_region(DIAMETER)
    assert len(g) == 2 and g.area == F(1, 2)
    assert all(x[1] == y[1] == F(1, 2) for x, y in g.rectangles)


def test_good_region_pm4():
    g = good_region(PM4)
    assert g.area == F(1, 4)
    squares = [r for r in g.rectangles if r[0] == r[1] and r[0][1] == F(1, 4)]
    assert len(squares) == 3
    small = [r for r in g.rectangles if r not in squares]
    assert len(small) == 9
    assert sum(x[1] * y[1] for x, y in small) == F(1, 16)
    assert any(x[0] + x[1] > 1 for x, _ in squares)  # the wrapped square
    assert g.is_symmetric() and g.interiors_disjoint()


def test_good_region_rejects_crossing():
    with pytest.raises(LaminationError):
        good_region(lam((0, F(1, 2)), (F(1, 4), F(3, 4))))


def test_good_region_contains_compatible_leaves():
    g = good_region(RABBIT)
    assert g.contains(F(1, 14), F(23, 28))
    assert not g.contains(F(1, 14), F(9, 28))


def test_backward_lift_rabbit_depth_one():
    b1 = backward_lift(RABBIT, 1)
    added = set(b1.leaves) - set(RABBIT.leaves())
    assert added == {(F(1, 14), F(23, 28)), (F(9, 28), F(4, 7))}


def test_backward_lift_diameter_depth_one():
    added = set(backward_lift(DIAMETER, 1).leaves) - {(F(0), F(1, 2))}
    assert added == {(F(0), F(1, 4)), (F(0), F(3, 4)), (F(1, 4), F(1, 2)), (F(1, 2), F(3, 4))}
    eps = set(backward_lift(DIAMETER, 1, variant="eps-limit").leaves) - {(F(0), F(1, 2))}
    assert eps == {(F(0), F(1, 4)), (F(1, 2), F(3, 4))}


def test_backward_lift_depth_zero():
    assert backward_lift(RABBIT, 0).leaves == frozenset(RABBIT.leaves())


def test_backward_lift_cap(monkeypatch):
    with pytest.raises(ResourceError):
        backward_lift(RABBIT, 13)
    monkeypatch.setenv("LAMINA_DEPTH_CAP", "2")
    with pytest.raises(ResourceError):
        backward_lift(RABBIT, 3)
    with pytest.raises(ResourceError):
        backward_lift(RABBIT, 5, cap=4)


def test_backward_lift_invalid_major():
    with pytest.raises(MajorError):
        backward_lift(PrimitiveMajor(2, [[F(0), F(1, 3)]]), 1)


def test_rabbit_literal_lift_crosses_at_depth_six():
    # 1/7 is periodic, so leaves through both major endpoints get pulled back;
    # the literal recursion stops being a lamination at depth 6
    assert pairwise_compatible(backward_lift(RABBIT, 5).leaves)
    b6 = backward_lift(RABBIT, 6)
    bad = crossing_pairs(b6.leaves)
    assert len(bad) == 6
    assert ((F(65, 896), F(1, 7)), (F(9, 112), F(9, 14))) in bad


def test_rabbit_eps_limit_counts():
    counts = [len(backward_lift(RABBIT, i, variant="eps-limit")) for i in range(9)]
    assert counts == [2 ** (i + 1) - 1 for i in range(9)]


def test_lift_images_stay_inside():
    # a leaf first added at depth k maps onto a leaf of depth k - 1, so the
    # image condition can only fail at the frontier; in fact it never does
    for m in (RABBIT, DIAMETER, random_generic_major(3, 2)):
        for i in range(5):
            b = backward_lift(m, i)
            assert check_forward_invariant(b) == []
    b3 = backward_lift(RABBIT, 3)
    assert {g for g in b3.generation.values()} == {0, 1, 2, 3}


def test_check_forward_invariant_examples():
    assert check_forward_invariant(lam((0, F(1, 4)))) == [(F(0), F(1, 4))]
    assert check_forward_invariant(FiniteLamination.from_major(RABBIT)) == []


def test_clean_examples():
    hull = {(F(0), F(1, 4)), (F(1, 4), F(1, 2)), (F(0), F(1, 2))}
    assert set(clean(lam((0, F(1, 4)), (F(1, 4), F(1, 2)))).leaves) == hull
    assert set(clean(lam((0, F(1, 2)))).leaves) == {(F(0), F(1, 2))}
    tri = lam(*hull)
    assert clean(tri) == tri
    # the diagonal of a square disappears into the hull boundary
    sq = lam((0, F(1, 4)), (F(1, 4), F(1, 2)), (F(1, 2), F(3, 4)), (0, F(1, 2)))
    assert set(clean(sq).leaves) == {
        (F(0), F(1, 4)), (F(1, 4), F(1, 2)), (F(1, 2), F(3, 4)), (F(0), F(3, 4))
    }


def test_lamination_json():
    b = backward_lift(RABBIT, 2)
    data = json.loads(b.to_json())
    assert data["degree"] == 2 and ["1/14", "23/28"] in data["leaves"]
    assert FiniteLamination.from_dict(data) == b
    with pytest.raises(LaminationError):
        FiniteLamination.from_dict({"degree": 2, "leaves": [["1/2"]]})


# -- oracles -------------------------------------------------------------------


def test_area_oracle_agrees():
    for m in (RABBIT, DIAMETER, PM4, random_generic_major(3, 4), random_generic_major(5, 1)):
        assert good_region(m).area == good_area(m.leaves())
    for i in range(4):
        b = backward_lift(RABBIT, i)
        assert good_region(b).area == good_area(list(b.leaves))


def test_crossing_oracle_agrees():
    b = backward_lift(RABBIT, 7)
    items = sorted(b.leaves)
    slow = {(l1, l2) for i, l1 in enumerate(items) for l2 in items[i + 1:] if crosses(l1, l2)}
    assert set(crossing_pairs(items)) == slow


# -- properties ----------------------------------------------------------------


@given(st.integers(2, 6), st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_major_area(d, seed):
    g = good_region(random_generic_major(d, seed))
    assert g.area == F(1, d)
    assert g.is_symmetric() and g.interiors_disjoint()


@given(st.integers(2, 3), st.integers(0, 10**6))
@settings(max_examples=25, deadline=None)
def test_lift_properties(d, seed):
    m = random_generic_major(d, seed)
    prev = frozenset()
    for i in range(4 if d == 2 else 3):
        b = backward_lift(m, i)
        assert prev <= b.leaves
        assert pairwise_compatible(b.leaves)
        assert good_region(b).area == F(1, d ** (i + 1))
        if d == 2 and i:
            assert len(b.leaves - prev) <= 2 ** i
        prev = b.leaves


fracs = st.builds(F, st.integers(0, 59), st.just(60))


@given(st.lists(st.tuples(fracs, fracs).filter(lambda t: t[0] != t[1]), min_size=1, max_size=8))
@settings(max_examples=100, deadline=None)
def test_cross_symmetric_and_clean_idempotent(pairs):
    leaves = [make_leaf(a, b) for a, b in pairs]
    for l1 in leaves:
        for l2 in leaves:
            assert leaves_cross(l1, l2) == leaves_cross(l2, l1) == crosses(l1, l2)
    if pairwise_compatible(leaves):
        c = clean(FiniteLamination(2, frozenset(leaves)))
        assert clean(c) == c
