import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lamina.angle import AngleError, reduced_fractions
from lamina.entropy import (
    CSV_HEADER,
    SpectralError,
    build_matrix,
    core_entropy,
    hausdorff_dimension,
    pair_basis,
    pair_image,
    post_major,
    scc_blocks,
    spectral_radius,
    sweep,
    sweep_csv,
)

from oracles import charpoly_radius, dense_matrix

# log of the Perron root, from the exact characteristic polynomial (see oracles.py)
FROZEN_ENTROPY = {
    F(1, 5): 0.3331359591939392,
    F(1, 6): 0.41961762499110755,
    F(1, 4): 0.5280489095130115,
    F(3, 7): 0.48121182505959664,
    F(1, 9): 0.3418788680459548,
    F(5, 12): 0.3465735902799727,
    F(2, 9): 0.4256414628397515,
    F(7, 15): 0.6093778634360019,
    F(1, 3): 0.0,
}


def P(a, b):
    return (min(a, b), max(a, b))


def test_post_major_examples():
    assert post_major(F(1, 5)) == [F(3, 5), F(1, 5), F(2, 5), F(4, 5)]
    assert post_major(F(1, 2)) == [F(1, 4), F(1, 2), F(0)]
    assert post_major(F(1, 7)) == [F(4, 7), F(1, 7), F(2, 7)]
    with pytest.raises(AngleError):
        post_major(F(0))


def test_pair_basis_examples():
    fifths = [F(k, 5) for k in range(1, 5)]
    assert list(pair_basis(F(1, 5)).pairs) == [(a, b) for i, a in enumerate(fifths) for b in fifths[i + 1:]]
    assert set(pair_basis(F(1, 2)).pairs) == {P(F(1, 4), F(1, 2)), P(F(1, 4), F(0)), P(F(1, 2), F(0))}
    assert set(pair_basis(F(1, 7)).pairs) == {P(F(4, 7), F(1, 7)), P(F(4, 7), F(2, 7)), P(F(1, 7), F(2, 7))}


def test_worked_example_images():
    f = lambda k: F(k, 5)  # noqa: E731
    want = {
        P(f(1), f(2)): [P(f(2), f(4))],
        P(f(1), f(3)): [P(f(2), f(1))],
        P(f(1), f(4)): [P(f(1), f(2)), P(f(1), f(3))],
        P(f(2), f(3)): [P(f(4), f(1))],
        P(f(2), f(4)): [P(f(4), f(1)), P(f(1), f(3))],
        P(f(3), f(4)): [P(f(1), f(3))],
    }
    basis = pair_basis(F(1, 5))
    idx = basis.index()
    A = build_matrix(F(1, 5)).dense()
    for pair, images in want.items():
        assert sorted(pair_image(pair, F(1, 5))) == sorted(images)
        col = np.zeros(len(basis), dtype=int)
        for img in images:
            col[idx[img]] += 1
        assert (A[:, idx[pair]] == col).all()


def test_half_matrix():
    idx = pair_basis(F(1, 2)).index()
    A = build_matrix(F(1, 2)).dense()
    a, b, c = F(1, 4), F(1, 2), F(0)
    assert A[idx[P(b, c)], idx[P(a, b)]] == 1
    assert A[idx[P(b, c)], idx[P(a, c)]] == 1
    assert A[idx[P(b, c)], idx[P(b, c)]] == 2
    assert A.sum() == 4


def test_rabbit_matrix_is_permutation():
    A = build_matrix(F(1, 7)).dense()
    assert sorted(A.sum(axis=0)) == [1, 1, 1] and sorted(A.sum(axis=1)) == [1, 1, 1]


def test_spectral_radius_examples():
    assert spectral_radius(np.eye(3)) == pytest.approx(1.0, abs=1e-12)
    assert spectral_radius(np.array([[2]])) == pytest.approx(2.0, abs=1e-12)
    assert spectral_radius(np.zeros((2, 2))) == 0.0
    assert spectral_radius(np.array([[0, 1], [1, 0]])) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(SpectralError):
        spectral_radius(np.ones((2, 3)))
    with pytest.raises(SpectralError):
        spectral_radius(np.array([[1, -1], [0, 1]]))


def test_core_entropy_examples():
    assert abs(core_entropy(F(1, 5)) - 0.3331) < 5e-4
    assert abs(core_entropy(F(1, 2)) - math.log(2)) < 1e-9
    assert abs(core_entropy(F(1, 7))) < 1e-9
    assert hausdorff_dimension(F(1, 2)) == pytest.approx(1.0, abs=1e-8)
    assert hausdorff_dimension(F(1, 7)) == pytest.approx(0.0, abs=1e-8)
    assert abs(hausdorff_dimension(F(1, 5)) - 0.4806) < 1e-3


@pytest.mark.parametrize("theta", sorted(FROZEN_ENTROPY))
def test_frozen_entropy(theta):
    assert core_entropy(theta) == pytest.approx(FROZEN_ENTROPY[theta], abs=1e-10)


def test_matrix_matches_direct_construction():
    for theta in reduced_fractions(24):
        pairs, mat = dense_matrix(theta)
        assert list(pair_basis(theta).pairs) == pairs
        assert np.array_equal(build_matrix(theta).dense(), np.array(mat))


def test_charpoly_oracle_small():
    # the invariant stated for matrices of dimension <= 6; the acceptance suite covers all of q <= 16
    for theta in reduced_fractions(16):
        A = build_matrix(theta)
        if A.dimension <= 6:
            assert abs(spectral_radius(A) - charpoly_radius(dense_matrix(theta)[1])) < 1e-9


def test_column_sums():
    for theta in reduced_fractions(30):
        basis = pair_basis(theta)
        sums = build_matrix(theta).column_sums()
        lo = theta / 2
        for pair, s in zip(basis.pairs, sums):
            sides = {((x - lo) % 1 < F(1, 2)) for x in pair if (x - lo) % 1 not in (0, F(1, 2))}
            assert s == (2 if len(sides) == 2 else 1)


def test_sweep_rows():
    rows = sweep(3)
    assert [r.theta for r in rows] == [F(1, 2), F(1, 3), F(2, 3)]
    rows = sweep(15)
    row = next(r for r in rows if r.theta == F(1, 5))
    assert abs(row.entropy - 0.3331) < 5e-4
    with pytest.raises(ValueError):
        sweep(1)


def test_sweep_parallel_matches():
    assert sweep(20, jobs=2) == sweep(20)


def test_sweep_csv():
    text = sweep_csv(sweep(4))
    lines = text.splitlines()
    assert lines[0] == CSV_HEADER
    assert lines[1] == "1,2,2.000000000,0.693147181,1.000000000"
    assert len(lines) == 1 + 5


def test_scc_blocks_drop_transients():
    # a nilpotent chain has no cyclic component
    assert scc_blocks(np.array([[0, 1], [0, 0]])) == []


def test_extra_pairs_do_not_raise_radius():
    # the full pair basis includes pairs never reached from {theta, 2 theta};
    # restricting to the reachable ones leaves the radius unchanged
    from scipy.sparse.csgraph import breadth_first_order

    for theta in reduced_fractions(32):
        A = build_matrix(theta).entries
        idx = pair_basis(theta).index()
        a, b = theta, (2 * theta) % 1
        # edge i -> j whenever pair j occurs in the image of pair i
        reach = breadth_first_order(A.T.tocsr(), idx[(min(a, b), max(a, b))], return_predecessors=False)
        keep = sorted(reach)
        sub = A.tocsr()[keep][:, keep]
        assert abs(spectral_radius(sub) - spectral_radius(A)) < 1e-9


@given(st.integers(1, 10**6), st.integers(2, 70))
@settings(max_examples=200, deadline=None)
def test_entropy_bounds(p, q):
    theta = F(p % q or 1, q)
    rho = spectral_radius(build_matrix(theta))
    assert 1 - 1e-9 <= rho <= 2 + 1e-9
    assert abs(core_entropy(theta) - core_entropy(1 - theta)) < 1e-9


@given(st.integers(2, 8), st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_spectral_radius_random(n, seed):
    rng = np.random.default_rng(seed)
    M = rng.integers(0, 3, size=(n, n)) * (rng.random((n, n)) < 0.4)
    want = max(abs(np.linalg.eigvals(M))) if M.any() else 0.0
    assert spectral_radius(M) == pytest.approx(want, abs=1e-8)
