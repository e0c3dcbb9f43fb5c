"""Theta functions on totally degenerate non-Archimedean tori, exactly.

The torus is K^g / (period lattice), K the exact Puiseux field model; periods
are encoded by a matrix T of monomials whose exponent matrix is the tropical
pairing P.  A polarization Lambda plus a cocycle c (monomial values on the
generators, extended through c(u1+u2) = c(u1) c(u2) t(u1, lambda(u2)))
determines theta functions: Fourier coefficient families a_u with

    a_{u + lambda(u')} = t(u', u) * c(u') * a_u.

Taking val of everything recovers the tropical layer: profiles, factors and
the min formula.  Series are never truncated approximately; partial sums
carry every term up to an exact valuation cutoff.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .lattice import CosetLattice, NotPositiveDefiniteError, _ldlt, enumerate_below
from .linalg import (
    IntRows,
    IntVec,
    RatMatrix,
    ShapeMismatchError,
    int_det,
    int_rows_from,
    is_symmetric,
    matmul,
    matvec,
    solve,
    transpose,
    vecdot,
)
from .puiseux import PuiseuxNumber
from .rationals import INF
from .theta import (
    AutomorphyFactor,
    NotPrincipalError,
    TropicalThetaExpression,
    TropicalThetaFunction,
    ValuationProfile,
    difference_to_periodic,
)
from .varieties import InvalidDataError, TropicalPolarizationData


class NotAmpleError(ValueError):
    """The exponent form P * Lambda is not positive-definite."""


class CocycleMismatchError(ValueError):
    """Operands carry different periods or cocycles."""


class ZeroCoordinateError(ValueError):
    """Evaluation point has a zero coordinate."""


class CutoffBelowMinimumError(ValueError):
    """Requested valuation cutoff lies below the minimal term valuation."""


class ZeroDenominatorError(ZeroDivisionError):
    """Rational function with identically zero denominator."""


@dataclass(frozen=True)
class PeriodMatrix:
    """Multiplicative periods: a g x g matrix of monomials c*q^r with c > 0.

    The exponent matrix (r_ij) is the tropical pairing P and must be
    nondegenerate.
    """

    entries: tuple[tuple[PuiseuxNumber, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(e for e in row) for row in self.entries)
        object.__setattr__(self, "entries", rows)
        g = len(rows)
        if any(len(r) != g for r in rows) or g == 0:
            raise ShapeMismatchError("period matrix must be square and nonempty")
        for row in rows:
            for e in row:
                if not isinstance(e, PuiseuxNumber) or not e.is_monomial():
                    raise InvalidDataError(f"period entry must be a monomial: {e}")
                if e.leading_coefficient() <= 0:
                    raise InvalidDataError(
                        f"period entry must have positive coefficient: {e}"
                    )
        from .linalg import det

        if det(self.exponent_rows()) == 0:
            raise InvalidDataError("period exponent matrix is degenerate")

    @property
    def g(self) -> int:
        return len(self.entries)

    def exponent_rows(self):
        return tuple(tuple(e.val() for e in row) for row in self.entries)

    def pairing(self) -> RatMatrix:
        return RatMatrix(self.exponent_rows())

    def t(self, nprime: Sequence[int], u: Sequence[int]) -> PuiseuxNumber:
        """t(u', u) = prod_{i,j} T[i][j]^(n'_i u_j)."""
        out = PuiseuxNumber.one()
        for i, ni in enumerate(nprime):
            for j, uj in enumerate(u):
                k = int(ni) * int(uj)
                if k:
                    out = out * (self.entries[i][j] ** k)
        return out

    def to_json_rows(self) -> list:
        return [[str(e) for e in row] for row in self.entries]

    @classmethod
    def from_json_rows(cls, rows: list) -> "PeriodMatrix":
        return cls(
            entries=tuple(
                tuple(PuiseuxNumber.parse(str(e)) for e in row) for row in rows
            )
        )


@dataclass(frozen=True)
class NACocycle:
    """A cocycle for (lambda, T): monomial generator values c(e'_i), extended
    multiplicatively through the relation with t(., lambda(.))."""

    period: PeriodMatrix
    Lambda: IntRows
    generators: tuple[PuiseuxNumber, ...]

    def __post_init__(self):
        object.__setattr__(self, "Lambda", int_rows_from(self.Lambda))
        g = self.period.g
        if len(self.Lambda) != g or any(len(r) != g for r in self.Lambda):
            raise ShapeMismatchError("Lambda shape mismatch")
        if len(self.generators) != g:
            raise ShapeMismatchError("need one generator value per basis vector")
        for c in self.generators:
            if not isinstance(c, PuiseuxNumber) or not c.is_monomial():
                raise InvalidDataError(f"cocycle generator must be a monomial: {c}")
        # symmetry of t(e'_i, lambda(e'_j)) is what makes the extension a
        # genuine cocycle; check it exactly
        for i in range(g):
            for j in range(i):
                if self._t_pair(i, j) != self._t_pair(j, i):
                    raise InvalidDataError(
                        f"t(e'_{i}, lambda(e'_{j})) != t(e'_{j}, lambda(e'_{i}))"
                    )

    @property
    def g(self) -> int:
        return self.period.g

    def lambda_column(self, j: int) -> IntVec:
        return tuple(self.Lambda[k][j] for k in range(self.g))

    def _t_pair(self, i: int, j: int) -> PuiseuxNumber:
        basis = tuple(1 if k == i else 0 for k in range(self.g))
        return self.period.t(basis, self.lambda_column(j))

    def lambda_is_zero(self) -> bool:
        return all(x == 0 for r in self.Lambda for x in r)

    def value(self, n: Sequence[int]) -> PuiseuxNumber:
        """c(n) from the generator values and the cocycle relation."""
        n = tuple(int(x) for x in n)
        out = PuiseuxNumber.one()
        for i, ni in enumerate(n):
            if ni:
                out = out * (self.generators[i] ** ni)
            binom = ni * (ni - 1) // 2
            if binom:
                out = out * (self._t_pair(i, i) ** binom)
        for i in range(self.g):
            for j in range(i + 1, self.g):
                k = n[i] * n[j]
                if k:
                    out = out * (self._t_pair(i, j) ** k)
        return out

    def t_lambda(self, n1: Sequence[int], n2: Sequence[int]) -> PuiseuxNumber:
        """t(u1', lambda(u2'))."""
        lam_n2 = tuple(matvec(self.Lambda, tuple(int(x) for x in n2)))
        return self.period.t(tuple(int(x) for x in n1), lam_n2)

    def to_json_list(self) -> list:
        return [str(c) for c in self.generators]


@dataclass(frozen=True)
class NAReport:
    checked: int
    failures: tuple[tuple, ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_cocycle(cocycle: NACocycle, samples: int = 20, seed: int = 0) -> NAReport:
    """Exact spot-check of c(u1+u2) = c(u1) c(u2) t(u1, lambda(u2)) on all
    generator pairs plus `samples` seeded random pairs with |n_i| <= 4."""
    g = cocycle.g
    pairs = []
    for i in range(g):
        for j in range(g):
            e_i = tuple(1 if k == i else 0 for k in range(g))
            e_j = tuple(1 if k == j else 0 for k in range(g))
            pairs.append((e_i, e_j))
    rng = random.Random(seed)
    for _ in range(samples):
        pairs.append(
            (
                tuple(rng.randint(-4, 4) for _ in range(g)),
                tuple(rng.randint(-4, 4) for _ in range(g)),
            )
        )
    failures = []
    for n1, n2 in pairs:
        total = tuple(a + b for a, b in zip(n1, n2))
        lhs = cocycle.value(total)
        rhs = cocycle.value(n1) * cocycle.value(n2) * cocycle.t_lambda(n1, n2)
        if lhs != rhs:
            failures.append((n1, n2))
    return NAReport(checked=len(pairs), failures=tuple(failures))


@dataclass(frozen=True)
class NAThetaFunction:
    """Fourier data of a theta function: one coefficient per coset of
    M / lambda(M'), everything else generated by the extension rule."""

    cocycle: NACocycle
    coeffs: tuple[tuple[IntVec, PuiseuxNumber], ...]

    def __post_init__(self):
        g = self.cocycle.g
        entries = []
        for rep, a in self.coeffs:
            rep = tuple(int(x) for x in rep)
            if len(rep) != g:
                raise ShapeMismatchError("coefficient index rank mismatch")
            if not isinstance(a, PuiseuxNumber):
                raise InvalidDataError("coefficients must be Puiseux numbers")
            entries.append((rep, a))
        if self.cocycle.lambda_is_zero():
            seen = set()
            for rep, _ in entries:
                if rep in seen:
                    raise InvalidDataError(f"duplicate support point {rep}")
                seen.add(rep)
            norm = sorted(entries)
        else:
            cosets = CosetLattice(self.cocycle.Lambda)
            canonical: dict[IntVec, PuiseuxNumber] = {}
            for rep, a in entries:
                canon, n = cosets.decompose(rep)
                if canon in canonical:
                    raise InvalidDataError(
                        f"two coefficients in the coset of {canon}"
                    )
                if rep != canon:
                    # a_rep = t(n, canon) c(n) a_canon, all monomial factors
                    scale = self.cocycle.period.t(n, canon) * self.cocycle.value(n)
                    a = a.divide_by_monomial(scale)
                canonical[canon] = a
            for rep in cosets.representatives():
                canonical.setdefault(rep, PuiseuxNumber.zero())
            norm = sorted(canonical.items())
        object.__setattr__(self, "coeffs", tuple(norm))
        if all(a.is_zero() for _, a in self.coeffs):
            raise InvalidDataError("theta function needs a nonzero coefficient")

    @property
    def g(self) -> int:
        return self.cocycle.g

    @cached_property
    def _cosets(self) -> CosetLattice | None:
        if self.cocycle.lambda_is_zero():
            return None
        return CosetLattice(self.cocycle.Lambda)

    @property
    def _table(self) -> dict[IntVec, PuiseuxNumber]:
        if "_cache" not in self.__dict__:
            self.__dict__["_cache"] = dict(self.coeffs)
        return self.__dict__["_cache"]

    def coefficient(self, u: Sequence[int]) -> PuiseuxNumber:
        """a_u, from the stored coset data via the extension rule."""
        u = tuple(int(x) for x in u)
        table = self._table
        if u in table:
            return table[u]
        if self._cosets is None:
            return PuiseuxNumber.zero()
        rep, n = self._cosets.decompose(u)
        a = table[rep]
        if not a.is_zero():
            a = self.cocycle.period.t(n, rep) * self.cocycle.value(n) * a
        table[u] = a
        return a

    def support_reps(self) -> tuple[IntVec, ...]:
        return tuple(r for r, a in self.coeffs if not a.is_zero())

    def verify_invariance(self, samples: int = 20, seed: int = 0) -> NAReport:
        """Exact check of a_{u + lambda(u')} = t(u', u) c(u') a_u on the
        stored (and cached) indices plus seeded random ones."""
        rng = random.Random(seed)
        g = self.g
        indices = sorted(self._table.keys())
        for _ in range(samples):
            indices.append(tuple(rng.randint(-4, 4) for _ in range(g)))
        shifts = [tuple(rng.randint(-2, 2) for _ in range(g)) for _ in range(5)]
        shifts = [s for s in shifts if any(s)] or [tuple(1 for _ in range(g))]
        failures = []
        checked = 0
        for u in indices:
            for nprime in shifts:
                lam_shift = tuple(matvec(self.cocycle.Lambda, nprime))
                target = tuple(a + b for a, b in zip(u, lam_shift))
                lhs = self.coefficient(target)
                rhs = (
                    self.cocycle.period.t(nprime, u)
                    * self.cocycle.value(nprime)
                    * self.coefficient(u)
                )
                checked += 1
                if lhs != rhs:
                    failures.append((nprime, u))
        return NAReport(checked=checked, failures=tuple(failures))

    # ---------- serialization ----------

    def to_json_dict(self) -> dict:
        return {
            "T": self.cocycle.period.to_json_rows(),
            "Lambda": [list(r) for r in self.cocycle.Lambda],
            "c": self.cocycle.to_json_list(),
            "coeffs": [
                {"rep": list(r), "a": str(a)} for r, a in self.coeffs
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "NAThetaFunction":
        period = PeriodMatrix.from_json_rows(data["T"])
        cocycle = NACocycle(
            period=period,
            Lambda=int_rows_from(data["Lambda"]),
            generators=tuple(PuiseuxNumber.parse(str(c)) for c in data["c"]),
        )
        return cls(
            cocycle=cocycle,
            coeffs=tuple(
                (tuple(int(x) for x in e["rep"]), PuiseuxNumber.parse(str(e["a"])))
                for e in data["coeffs"]
            ),
        )


def _require_ample(cocycle: NACocycle):
    B = matmul(cocycle.period.exponent_rows(), cocycle.Lambda)
    if not is_symmetric(B):
        raise NotAmpleError("exponent form P * Lambda is not symmetric")
    try:
        _ldlt(B)
    except NotPositiveDefiniteError as exc:
        raise NotAmpleError(
            f"exponent form P * Lambda is not positive-definite (pivot {exc.pivot_index})"
        ) from exc
    return B


def build_riemann_theta(period: PeriodMatrix, Lambda) -> NAThetaFunction:
    """The symmetric-normalized Riemann theta for a principal polarization:
    c(e'_i) = sqrt(t(e'_i, lambda(e'_i))) (square roots chosen on generator
    pairs, extended bilinearly), coefficients generated from a_0 = 1."""
    Lambda = int_rows_from(Lambda)
    if abs(int_det(Lambda)) != 1:
        raise NotPrincipalError("build_riemann_theta needs |det Lambda| = 1")
    g = period.g
    gens = []
    for i in range(g):
        basis = tuple(1 if k == i else 0 for k in range(g))
        lam_col = tuple(Lambda[k][i] for k in range(g))
        t_ii = period.t(basis, lam_col)
        gens.append(t_ii.sqrt_monomial())  # CoefficientNotASquareError if not
    cocycle = NACocycle(period=period, Lambda=Lambda, generators=tuple(gens))
    _require_ample(cocycle)
    zero = tuple(0 for _ in range(g))
    return NAThetaFunction(
        cocycle=cocycle, coeffs=((zero, PuiseuxNumber.one()),)
    )


def canonical_cocycle(period: PeriodMatrix, Lambda) -> NACocycle:
    """Square-root-normalized cocycle when the diagonal pair values are
    squares, otherwise generator values 1."""
    Lambda = int_rows_from(Lambda)
    g = period.g
    gens = []
    for i in range(g):
        basis = tuple(1 if k == i else 0 for k in range(g))
        lam_col = tuple(Lambda[k][i] for k in range(g))
        t_ii = period.t(basis, lam_col)
        try:
            gens.append(t_ii.sqrt_monomial())
        except ValueError:
            gens.append(PuiseuxNumber.one())
    return NACocycle(period=period, Lambda=Lambda, generators=tuple(gens))


def theta_basis(period: PeriodMatrix, cocycle: NACocycle) -> tuple[NAThetaFunction, ...]:
    """The standard basis of theta functions for (lambda, c): the k-th has
    a = 1 on the k-th coset representative and 0 on the others; there are
    exactly [M : lambda(M')] = |det Lambda| of them."""
    if cocycle.period != period:
        raise CocycleMismatchError("cocycle belongs to a different period matrix")
    if cocycle.lambda_is_zero() or int_det(cocycle.Lambda) == 0:
        raise NotAmpleError("theta_basis needs an invertible polarization")
    _require_ample(cocycle)
    reps = CosetLattice(cocycle.Lambda).representatives()
    out = []
    for rep in reps:
        out.append(
            NAThetaFunction(
                cocycle=cocycle, coeffs=((rep, PuiseuxNumber.one()),)
            )
        )
    return tuple(out)


def tropicalize(f: NAThetaFunction) -> TropicalThetaFunction:
    """val of everything: profile w(u0) = val(a_u0) on the coset reps; the
    factor's linear part is how val(c) differs from the quadratic
    (1/2) n^T (P Lambda) n."""
    g = f.g
    P = f.cocycle.period.exponent_rows()
    base_lambda = f.cocycle.Lambda
    if int_det(base_lambda) == 0:
        from .linalg import identity

        base_lambda = identity(g)
    base = TropicalPolarizationData(
        g=g, P=RatMatrix(P), Lambda=base_lambda
    )
    if f.cocycle.lambda_is_zero():
        if any(c.val() != 0 for c in f.cocycle.generators):
            raise InvalidDataError(
                "lambda = 0 tropicalization needs a valuation-trivial cocycle"
            )
        entries = tuple(
            (rep, a.val()) for rep, a in f.coeffs if not a.is_zero()
        )
        factor = AutomorphyFactor(
            Lambda=tuple(tuple(0 for _ in range(g)) for _ in range(g)),
            ell=tuple(Fraction(0) for _ in range(g)),
        )
        return TropicalThetaFunction(
            base=base, factor=factor, profile=ValuationProfile(entries=entries)
        )
    B = matmul(P, f.cocycle.Lambda)
    ell = tuple(
        f.cocycle.generators[i].val() - Fraction(1, 2) * B[i][i] for i in range(g)
    )
    factor = AutomorphyFactor(Lambda=f.cocycle.Lambda, ell=ell)
    entries = tuple((rep, a.val()) for rep, a in f.coeffs)
    return TropicalThetaFunction(
        base=base, factor=factor, profile=ValuationProfile(entries=entries)
    )


@dataclass(frozen=True)
class PartialSum:
    """All Fourier terms with val <= cutoff, summed exactly."""

    value: PuiseuxNumber
    terms: int
    trop_value: Fraction
    dominant_unique: bool


def evaluate_at_point(
    f: NAThetaFunction, x: Sequence[PuiseuxNumber], cutoff
) -> PartialSum:
    """Sum a_u x^u over every u with val(a_u x^u) <= cutoff, exactly.

    x must have monomial nonzero coordinates; cutoff must be at least the
    minimal term valuation f_trop(trop(x)).  When the minimal-valuation term
    is unique, val(value) equals that minimum.
    """
    g = f.g
    if len(x) != g:
        raise ShapeMismatchError("point rank mismatch")
    for xj in x:
        if not isinstance(xj, PuiseuxNumber) or xj.is_zero():
            raise ZeroCoordinateError("point coordinates must be nonzero")
        if not xj.is_monomial():
            raise InvalidDataError("point coordinates must be monomials")
    cutoff = Fraction(cutoff)
    v = tuple(xj.val() for xj in x)
    trop = tropicalize(f)
    result = trop.evaluate(v)
    if cutoff < result.value:
        raise CutoffBelowMinimumError(
            f"cutoff {cutoff} below minimal valuation {result.value}"
        )

    def x_power(u: IntVec) -> PuiseuxNumber:
        out = PuiseuxNumber.one()
        for xj, uj in zip(x, u):
            if uj:
                out = out * (xj ** int(uj))
        return out

    terms: list[IntVec] = []
    if f.cocycle.lambda_is_zero():
        for rep, a in f.coeffs:
            if a.is_zero():
                continue
            if a.val() + vecdot(rep, v) <= cutoff:
                terms.append(rep)
    else:
        B = trop._B_rows
        lam_t = transpose(f.cocycle.Lambda)
        P_rows = trop.base.P.entries
        lam_t_v = matvec(lam_t, v)
        for rep, w in trop.profile.entries:
            if w == INF:
                continue
            lin = tuple(
                e + pr + lv
                for e, pr, lv in zip(trop.factor.ell, matvec(P_rows, rep), lam_t_v)
            )
            const = w + vecdot(rep, v)
            center = solve(B, tuple(-c for c in lin))
            center_val = (
                Fraction(1, 2) * vecdot(center, matvec(B, center))
                + vecdot(lin, center)
                + const
            )
            radius = cutoff - center_val
            if radius < 0:
                continue
            for n in enumerate_below(B, center, radius):
                shift = matvec(f.cocycle.Lambda, n)
                terms.append(tuple(int(r + s) for r, s in zip(rep, shift)))

    total = PuiseuxNumber.zero()
    for u in sorted(terms):
        total = total + f.coefficient(u) * x_power(u)
    return PartialSum(
        value=total,
        terms=len(terms),
        trop_value=result.value,
        dominant_unique=result.unique,
    )


@dataclass(frozen=True)
class NARationalFunction:
    """h = f1 / f2 for two thetas with the same period and cocycle; its
    tropicalization h_trop = f1_trop - f2_trop descends to the torus."""

    numerator: NAThetaFunction
    denominator: NAThetaFunction

    @cached_property
    def h_trop(self):
        expr = TropicalThetaExpression(
            terms=(
                (1, tuple(Fraction(0) for _ in range(self.numerator.g)), tropicalize(self.numerator)),
                (-1, tuple(Fraction(0) for _ in range(self.numerator.g)), tropicalize(self.denominator)),
            )
        )
        return difference_to_periodic(expr)

    def val_at(self, x: Sequence[PuiseuxNumber]) -> tuple[Fraction, bool]:
        """val f1(x) - val f2(x) from exact partial sums at the minimal
        cutoff; the bool reports whether both dominant terms were unique
        (only then is the value certified equal to h_trop(trop x))."""
        s1 = evaluate_at_point(self.numerator, x, _trop_min(self.numerator, x))
        s2 = evaluate_at_point(self.denominator, x, _trop_min(self.denominator, x))
        ok = s1.dominant_unique and s2.dominant_unique
        return s1.value.val() - s2.value.val(), ok


def _trop_min(f: NAThetaFunction, x: Sequence[PuiseuxNumber]) -> Fraction:
    v = tuple(xj.val() for xj in x)
    return tropicalize(f).evaluate(v).value


def construct_rational_function(
    f1: NAThetaFunction, f2: NAThetaFunction
) -> NARationalFunction:
    """Pair two thetas of the same (period, lambda, c) into a rational
    function on the torus; exact cocycle equality is a precondition."""
    if f1.cocycle.period != f2.cocycle.period:
        raise CocycleMismatchError("period matrices differ")
    if f1.cocycle != f2.cocycle:
        raise CocycleMismatchError("cocycles differ")
    if all(a.is_zero() for _, a in f2.coeffs):
        raise ZeroDenominatorError("denominator theta is identically zero")
    h = NARationalFunction(numerator=f1, denominator=f2)
    h.h_trop  # force the descent check now: NonzeroAutomorphyError if broken
    return h
