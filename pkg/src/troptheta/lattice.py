"""Exact minimization of convex quadratics over integer lattice points.

Objectives have the form q(n) = (1/2) n^T B n + ell^T n + c0 with B symmetric
positive-definite over the rationals and n ranging over Z^g.  The pipeline is
LLL reduction of the form (delta = 3/4, exact comparisons), LDL^T
factorization, an upper-bound seed from the 2^g floor/ceil roundings of the
real minimizer, then complete enumeration of the ellipsoid below the seed
value (Fincke-Pohst).  Every comparison is exact; floats never appear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator, Sequence

from .linalg import (
    RatMatrix,
    Row,
    Rows,
    IntRows,
    IntVec,
    ShapeMismatchError,
    identity,
    is_symmetric,
    matmul,
    matvec,
    rows_from,
    solve,
    transpose,
    vecdot,
)

LOVASZ_DELTA = Fraction(3, 4)


class NotSymmetricError(ValueError):
    """The quadratic form matrix is not symmetric."""


class NotPositiveDefiniteError(ValueError):
    """The form has a nonpositive LDL^T pivot.

    pivot_index is 1-based: the first pivot d_k <= 0.
    """

    def __init__(self, pivot_index: int):
        self.pivot_index = pivot_index
        super().__init__(f"form not positive-definite: pivot {pivot_index} nonpositive")


class NegativeRadiusError(ValueError):
    """enumerate_below called with radius < 0."""


@dataclass(frozen=True)
class GramForm:
    """A symmetric rational g x g quadratic form.

    Symmetry is enforced at construction; positive-definiteness is
    established by ldlt_decompose (and cached) so that the failure carries
    the offending pivot index.
    """

    matrix: RatMatrix

    def __post_init__(self):
        m = self.matrix
        if not isinstance(m, RatMatrix):
            m = RatMatrix(rows_from(m))
            object.__setattr__(self, "matrix", m)
        if m.rows != m.cols:
            raise ShapeMismatchError("gram matrix must be square")
        if not m.is_symmetric():
            raise NotSymmetricError("gram matrix must be symmetric")

    @property
    def g(self) -> int:
        return self.matrix.rows

    @property
    def rows(self) -> Rows:
        return self.matrix.entries

    def is_positive_definite(self) -> bool:
        try:
            _ldlt(self.rows)
        except NotPositiveDefiniteError:
            return False
        return True


def _gram_rows(B) -> Rows:
    """Coerce GramForm / RatMatrix / nested sequences to symmetric rows."""
    if isinstance(B, GramForm):
        return B.rows
    if isinstance(B, RatMatrix):
        rows = B.entries
    else:
        rows = rows_from(B)
    if len(rows) == 0 or any(len(r) != len(rows) for r in rows):
        raise ShapeMismatchError("gram matrix must be square and nonempty")
    if not is_symmetric(rows):
        raise NotSymmetricError("gram matrix must be symmetric")
    return rows


def _ldlt(rows: Rows) -> tuple[Rows, Row]:
    """B = L D L^T with L unit lower triangular, D positive diagonal.

    Raises NotPositiveDefiniteError with the 1-based index of the first
    nonpositive pivot.
    """
    g = len(rows)
    L = [[Fraction(0)] * g for _ in range(g)]
    D = [Fraction(0)] * g
    for j in range(g):
        d = rows[j][j] - sum(L[j][k] * L[j][k] * D[k] for k in range(j))
        if d <= 0:
            raise NotPositiveDefiniteError(j + 1)
        D[j] = d
        L[j][j] = Fraction(1)
        for i in range(j + 1, g):
            L[i][j] = (rows[i][j] - sum(L[i][k] * L[j][k] * D[k] for k in range(j))) / d
    return tuple(tuple(r) for r in L), tuple(D)


def ldlt_decompose(B) -> tuple[RatMatrix, tuple[Fraction, ...]]:
    """Exact LDL^T factorization of a symmetric positive-definite form."""
    L, D = _ldlt(_gram_rows(B))
    return RatMatrix(L), D


def lll_reduce(B) -> tuple[IntRows, RatMatrix]:
    """Lattice-reduce a positive-definite form: B_red = U^T B U.

    U is unimodular with integer entries (columns are the new basis in old
    coordinates).  B_red satisfies the size-reduction condition |mu_kj| <= 1/2
    and the Lovasz condition with delta = 3/4, both checked exactly.
    """
    rows = _gram_rows(B)
    g = len(rows)
    _ldlt(rows)  # raises if not positive-definite
    G = [list(r) for r in rows]
    U = [list(r) for r in identity(g)]

    def col_addmul(k: int, j: int, m: int):
        # basis op b_k <- b_k - m * b_j; update U columns and gram
        for i in range(g):
            U[i][k] -= m * U[i][j]
        for i in range(g):
            G[i][k] -= m * G[i][j]
        for i in range(g):
            G[k][i] -= m * G[j][i]

    def col_swap(k: int, j: int):
        for i in range(g):
            U[i][k], U[i][j] = U[i][j], U[i][k]
        for i in range(g):
            G[i][k], G[i][j] = G[i][j], G[i][k]
        G[k], G[j] = G[j], G[k]

    k = 1
    while k < g:
        L, D = _ldlt(tuple(tuple(r) for r in G))
        for j in range(k - 1, -1, -1):
            mu = L[k][j]
            if 2 * abs(mu) > 1:
                col_addmul(k, j, round(mu))
                L, D = _ldlt(tuple(tuple(r) for r in G))
        if D[k] >= (LOVASZ_DELTA - L[k][k - 1] ** 2) * D[k - 1]:
            k += 1
        else:
            col_swap(k, k - 1)
            k = max(k - 1, 1)

    return tuple(tuple(r) for r in U), RatMatrix(tuple(tuple(r) for r in G))


def _floor_plus_sqrt(gamma: Fraction, t: Fraction) -> int:
    """Largest integer n with n <= gamma + sqrt(t), exactly (t >= 0)."""
    n = math.floor(gamma) + math.isqrt(t.numerator // t.denominator) + 2
    # n > gamma + sqrt(t)  <=>  n - gamma > 0 and (n - gamma)^2 > t
    while (n - gamma) > 0 and (n - gamma) ** 2 > t:
        n -= 1
    return n


def _ellipsoid_points(
    L: Rows, D: Row, center: Row, bound: Fraction
) -> Iterator[IntVec]:
    """All integer x with (x-center)^T (L D L^T) (x-center) <= bound.

    Uses the identity x^T B x = sum_i d_i (x_i + sum_{j>i} L[j][i] x_j)^2 and
    recurses from the last coordinate down with exact interval bounds.
    """
    g = len(D)
    x = [0] * g

    def recurse(i: int, remaining: Fraction) -> Iterator[IntVec]:
        if i < 0:
            yield tuple(x)
            return
        t = sum(L[j][i] * (x[j] - center[j]) for j in range(i + 1, g))
        gamma = center[i] - t
        s2 = remaining / D[i]
        hi = _floor_plus_sqrt(gamma, s2)
        lo = -_floor_plus_sqrt(-gamma, s2)
        for xi in range(lo, hi + 1):
            x[i] = xi
            used = D[i] * (xi - gamma) ** 2
            if used <= remaining:
                yield from recurse(i - 1, remaining - used)

    if bound >= 0:
        yield from recurse(g - 1, bound)


def enumerate_below(B, center: Sequence, radius) -> list[IntVec]:
    """All n in Z^g with (1/2) (n-center)^T B (n-center) <= radius, sorted
    lexicographically."""
    rows = _gram_rows(B)
    g = len(rows)
    radius = Fraction(radius) if not isinstance(radius, Fraction) else radius
    if radius < 0:
        raise NegativeRadiusError(f"radius {radius} < 0")
    c = tuple(Fraction(v) for v in center)
    if len(c) != g:
        raise ShapeMismatchError("center length mismatch")
    if g >= 2:
        U, G = lll_reduce(rows)
        Uinv = _int_inverse(U)
        c_red = matvec(Uinv, c)
        L, D = _ldlt(G.entries)
        pts = [
            tuple(matvec(U, m))
            for m in _ellipsoid_points(L, D, c_red, 2 * radius)
        ]
        pts = [tuple(int(v) for v in p) for p in pts]
    else:
        L, D = _ldlt(rows)
        pts = list(_ellipsoid_points(L, D, c, 2 * radius))
    return sorted(pts)


def _int_inverse(U: IntRows) -> IntRows:
    from .linalg import inverse

    inv = inverse(U)
    out = []
    for row in inv:
        r = []
        for v in row:
            assert v.denominator == 1, "unimodular inverse must be integral"
            r.append(v.numerator)
        out.append(tuple(r))
    return tuple(out)


@dataclass(frozen=True)
class CosetLattice:
    """The sublattice Lam * Z^g of Z^g, with coset bookkeeping.

    Representatives are the lexicographically smallest points of each class
    inside the box {0, ..., |det Lam| - 1}^g (which meets every class since
    |det Lam| * Z^g is contained in Lam * Z^g).
    """

    matrix: IntRows

    def __post_init__(self):
        g = len(self.matrix)
        if any(len(r) != g for r in self.matrix):
            raise ShapeMismatchError("coset lattice matrix must be square")
        from .linalg import int_det

        if int_det(self.matrix) == 0:
            raise ShapeMismatchError("coset lattice matrix must be nonsingular")

    @property
    def g(self) -> int:
        return len(self.matrix)

    @property
    def index(self) -> int:
        from .linalg import int_det

        return abs(int_det(self.matrix))

    @property
    def _inverse_rows(self) -> Rows:
        if "_inv" not in self.__dict__:
            from .linalg import inverse

            self.__dict__["_inv"] = inverse(self.matrix)
        return self.__dict__["_inv"]

    def congruent(self, x: Sequence[int], y: Sequence[int]) -> bool:
        diff = tuple(a - b for a, b in zip(x, y))
        return all(c.denominator == 1 for c in matvec(self._inverse_rows, diff))

    def representatives(self) -> tuple[IntVec, ...]:
        if "_reps" not in self.__dict__:
            d = self.index
            reps: list[IntVec] = []
            for cand in product(range(d), repeat=self.g):
                if not any(self.congruent(cand, r) for r in reps):
                    reps.append(cand)
                if len(reps) == d:
                    break
            self.__dict__["_reps"] = tuple(reps)
        return self.__dict__["_reps"]

    def decompose(self, u: Sequence[int]) -> tuple[IntVec, IntVec]:
        """u = rep + Lam * n with rep in representatives(); returns (rep, n)."""
        for rep in self.representatives():
            coeffs = matvec(
                self._inverse_rows, tuple(a - b for a, b in zip(u, rep))
            )
            if all(c.denominator == 1 for c in coeffs):
                return rep, tuple(c.numerator for c in coeffs)
        raise AssertionError("coset representatives incomplete")


@dataclass(frozen=True)
class QuadraticMinimum:
    """Result of minimize_quadratic: the exact minimum and every attaining
    lattice vector (sorted lexicographically)."""

    value: Fraction
    argmin: tuple[IntVec, ...]

    @property
    def canonical(self) -> IntVec:
        return self.argmin[0]


def minimize_quadratic(B, ell: Sequence, c0=Fraction(0)) -> QuadraticMinimum:
    """Minimize (1/2) n^T B n + ell^T n + c0 over n in Z^g, exactly.

    Returns the minimum value and the complete argmin set.  B must be
    symmetric positive-definite (NotSymmetricError / NotPositiveDefiniteError
    otherwise, the latter with its 1-based pivot index).
    """
    rows = _gram_rows(B)
    g = len(rows)
    ell = tuple(Fraction(v) for v in ell)
    if len(ell) != g:
        raise ShapeMismatchError("linear part length mismatch")
    c0 = Fraction(c0)

    if g >= 2:
        U, Gm = lll_reduce(rows)
        G = Gm.entries
        ell_red = matvec(transpose(U), ell)
    else:
        U = identity(1)
        G = rows
        ell_red = ell

    def objective(m) -> Fraction:
        return Fraction(1, 2) * vecdot(m, matvec(G, m)) + vecdot(ell_red, m) + c0

    L, D = _ldlt(G)
    center = solve(G, tuple(-v for v in ell_red))

    best = None
    corners = []
    for corner in product(*[
        sorted({math.floor(ci), math.ceil(ci)}) for ci in center
    ]):
        corners.append(corner)
        val = objective(corner)
        if best is None or val < best:
            best = val
    assert best is not None

    center_value = objective(center)
    bound = 2 * (best - center_value)
    winners = []
    for m in _ellipsoid_points(L, D, center, bound):
        val = objective(m)
        if val < best:
            best = val
            winners = [m]
        elif val == best:
            winners.append(m)

    argmin = sorted(tuple(int(x) for x in matvec(U, m)) for m in winners)
    return QuadraticMinimum(value=best, argmin=tuple(argmin))
