"""Core entropy of quadratic polynomials from external angles.

For a rational angle theta the forward orbit {2^n theta : n >= -1} spans a
space of unordered pairs; doubling acts on it by a non-negative integer
matrix whose Perron root gives the core entropy.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .angle import Angle, AngleError, preferred_half_preimage, reduced_fractions

Pair = Tuple[Angle, Angle]

LOG2 = math.log(2.0)

log = logging.getLogger(__name__)


class SpectralError(ValueError):
    pass


def _pair(a: Angle, b: Angle) -> Pair:
    return (a, b) if a < b else (b, a)


def post_major(theta: Angle) -> List[Angle]:
    """The forward-invariant set {2^n theta : n >= -1} in orbit order."""
    theta = Fraction(theta) % 1
    if theta == 0:
        raise AngleError("angle 0 is excluded")
    pts = [preferred_half_preimage(theta)]
    seen = set(pts)
    cur = theta
    while cur not in seen:
        pts.append(cur)
        seen.add(cur)
        cur = (2 * cur) % 1
    return pts


@dataclass(frozen=True)
class PairBasis:
    theta: Angle
    pairs: Tuple[Pair, ...]
    division_points: Tuple[Angle, Angle]

    def index(self) -> Dict[Pair, int]:
        return {p: i for i, p in enumerate(self.pairs)}

    def __len__(self) -> int:
        return len(self.pairs)


def pair_basis(theta: Angle) -> PairBasis:
    theta = Fraction(theta) % 1
    pts = sorted(post_major(theta))
    pairs = tuple((pts[i], pts[j]) for i in range(len(pts)) for j in range(i + 1, len(pts)))
    return PairBasis(theta=theta, pairs=pairs, division_points=(theta / 2, (theta + 1) / 2))


def same_closed_half(a: Angle, b: Angle, theta: Angle) -> bool:
    """Whether a and b lie in a common closed half circle cut at theta/2, (theta+1)/2."""
    lo = theta / 2

    def side(x: Angle) -> int:
        t = (x - lo) % 1
        if t == 0 or t == Fraction(1, 2):
            return 0  # division points belong to both halves
        return 1 if t < Fraction(1, 2) else 2

    sa, sb = side(a), side(b)
    return sa == 0 or sb == 0 or sa == sb


def pair_image(pair: Pair, theta: Angle) -> List[Pair]:
    """Image of a basis pair under the pair transition map (a list of one or two pairs)."""
    a, b = pair
    da, db = (2 * a) % 1, (2 * b) % 1
    if same_closed_half(a, b, theta):
        return [_pair(da, db)]
    return [_pair(da, theta), _pair(theta, db)]


@dataclass(frozen=True)
class TransitionMatrix:
    """Non-negative integer matrix; entry (j, i) counts basis j in the image of basis i.

    Stored sparse: every column has at most two non-zeros.
    """

    entries: sparse.csc_matrix

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    def dense(self) -> np.ndarray:
        return self.entries.toarray()

    def column_sums(self) -> np.ndarray:
        return np.asarray(self.entries.sum(axis=0)).ravel()


def build_matrix(theta: Angle) -> TransitionMatrix:
    basis = pair_basis(theta)
    theta = basis.theta
    # work on integer residues mod n; every orbit point has denominator dividing 2q
    n = 2 * theta.denominator
    pts = sorted(post_major(theta))
    res = [int(a * n) for a in pts]
    pos = {r: i for i, r in enumerate(res)}
    k = len(res)

    def pidx(i: int, j: int) -> int:
        # index of (pts[i], pts[j]), i < j, in the lexicographic pair order
        return i * k - i * (i + 1) // 2 + (j - i - 1)

    t = int(theta * n)
    lo, half = t // 2, n // 2  # theta/2 as a residue: t is even since n = 2q

    def side(x: int) -> int:
        u = (x - lo) % n
        if u == 0 or u == half:
            return 0
        return 1 if u < half else 2

    sides = [side(r) for r in res]
    dbl = [pos[(2 * r) % n] for r in res]
    it = pos[t]
    rows: List[int] = []
    cols: List[int] = []
    col = 0
    for i in range(k):
        for j in range(i + 1, k):
            si, sj = sides[i], sides[j]
            a, b = dbl[i], dbl[j]
            if si == 0 or sj == 0 or si == sj:
                rows.append(pidx(min(a, b), max(a, b)))
                cols.append(col)
            else:
                rows.append(pidx(min(a, it), max(a, it)))
                rows.append(pidx(min(b, it), max(b, it)))
                cols.extend((col, col))
            col += 1
    m = len(basis)
    data = np.ones(len(rows), dtype=np.int64)
    entries = sparse.csc_matrix((data, (rows, cols)), shape=(m, m))
    entries.sum_duplicates()
    return TransitionMatrix(entries)


def _as_sparse(matrix) -> sparse.csr_matrix:
    if isinstance(matrix, TransitionMatrix):
        return matrix.entries.tocsr()
    if sparse.issparse(matrix):
        return sparse.csr_matrix(matrix)
    arr = np.asarray(matrix)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise SpectralError(f"expected a square matrix, got shape {arr.shape}")
    return sparse.csr_matrix(arr)


def scc_blocks(matrix) -> List[np.ndarray]:
    """Index sets of the strongly connected components that carry a cycle."""
    m = _as_sparse(matrix)
    ncomp, labels = connected_components(m, directed=True, connection="strong")
    diag = m.diagonal()
    blocks = []
    for c in range(ncomp):
        nodes = np.flatnonzero(labels == c)
        if len(nodes) == 1 and diag[nodes[0]] == 0:
            continue  # transient vertex, contributes eigenvalue 0
        blocks.append(nodes)
    return blocks


def _power_radius(block: np.ndarray, tol: float, max_iter: int) -> float:
    """Perron root of an irreducible block via power iteration on block + I."""
    n = block.shape[0]
    shifted = block.astype(float) + np.eye(n)
    v = np.full(n, 1.0 / n)
    lo = hi = 0.0
    for _ in range(max_iter):
        w = shifted @ v
        # Collatz-Wielandt: min/max of w_i / v_i bracket rho + 1 for positive v
        ratios = w / v
        lo, hi = ratios.min(), ratios.max()
        if hi - lo < tol:
            break
        v = w / w.sum()
    else:
        log.warning("power iteration stopped after %d steps, bracket width %.3g", max_iter, hi - lo)
    return 0.5 * (lo + hi) - 1.0


def spectral_radius(matrix, tol: float = 1e-12, max_iter: int = 1_000_000) -> float:
    """Perron-Frobenius eigenvalue of a square non-negative matrix.

    The matrix is split into strongly connected components; each irreducible
    block is power-iterated after adding the identity, which makes it
    primitive without moving the Perron vector.
    """
    m = _as_sparse(matrix)
    if m.shape[0] != m.shape[1]:
        raise SpectralError(f"expected a square matrix, got shape {m.shape}")
    if m.nnz and m.data.min() < 0:
        raise SpectralError("matrix has negative entries")
    best = 0.0
    for nodes in scc_blocks(m):
        block = m[nodes][:, nodes].toarray()
        if len(nodes) == 1:
            r = float(block[0, 0])
        else:
            r = _power_radius(block, tol, max_iter)
        best = max(best, r)
    return best


def core_entropy(theta: Angle) -> float:
    return math.log(spectral_radius(build_matrix(theta)))


def hausdorff_dimension(theta: Angle) -> float:
    return core_entropy(theta) / LOG2


@dataclass(frozen=True)
class SweepRow:
    theta: Angle
    rho: float
    entropy: float

    @property
    def dimension(self) -> float:
        return self.entropy / LOG2


def _row(theta: Angle) -> SweepRow:
    rho = spectral_radius(build_matrix(theta))
    return SweepRow(theta, rho, math.log(rho))


def sweep(max_denominator: int, jobs: int = 1) -> List[SweepRow]:
    if max_denominator < 2:
        raise ValueError("max_denominator must be at least 2")
    thetas = list(reduced_fractions(max_denominator))
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_row, thetas, chunksize=16))
    else:
        rows = [_row(t) for t in thetas]
    # map() preserves input order, which is already (q, p)
    return rows


CSV_HEADER = "theta_num,theta_den,rho,entropy,dimension"


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(
            f"{r.theta.numerator},{r.theta.denominator},{r.rho:.9f},{r.entropy:.9f},{r.dimension:.9f}"
        )
    return "\n".join(lines) + "\n"
