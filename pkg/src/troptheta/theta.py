"""Tropical theta functions on polarized tropical tori, exactly.

A tropical theta function is determined by an automorphy factor
c_trop(n) = (1/2) n^T (P Lam) n + ell^T n and a valuation profile w on coset
representatives of M / lambda(M'); it extends to all of M by

    w(u0 + Lam n) = w(u0) + c_trop(n) + [n, u0]

and evaluates as f(v) = min_{u in M} w(u) + <u, v>.  With P Lam positive
definite the minimum over each coset is a convex integer quadratic, handled
by lattice.minimize_quadratic; the lambda = 0 case carries a finite support
and a trivial factor, and the min is a finite scan.

Products and translates never collapse into convolved profiles here: they
stay formal expressions (TropicalThetaExpression) whose aggregate automorphy
factor is tracked term by term.  An expression with exactly cancelling factor
descends to the quotient torus (PeriodicPLFunction).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Sequence

from .lattice import (
    CosetLattice,
    NotPositiveDefiniteError,
    NotSymmetricError,
    _ldlt,
    minimize_quadratic,
)
from .linalg import (
    IntRows,
    IntVec,
    ShapeMismatchError,
    int_det,
    int_rows_from,
    is_symmetric,
    matmul,
    matvec,
    transpose,
    vecdot,
)
from .rationals import INF, format_fraction, format_value, parse_fraction, parse_value
from .varieties import TropicalPolarizationData, TropPoint, as_point, embed_Mprime


class NotPrincipalError(ValueError):
    """Construction requires |det Lambda| = 1."""


class EmptyProfileError(ValueError):
    """A valuation profile needs at least one finite value."""


class IncompatibleError(ValueError):
    """Expression terms live on different tori."""


class NonzeroAutomorphyError(ValueError):
    """The expression's aggregate factor does not cancel."""

    def __init__(self, factor: "AutomorphyFactor"):
        self.factor = factor
        super().__init__(f"aggregate automorphy factor is nonzero: {factor}")


class ShiftsDoNotSumToZeroError(ValueError):
    """level_n_function requires shifts summing to zero exactly."""


@dataclass(frozen=True)
class AutomorphyFactor:
    """The (lambda, ell) datum of the transformation law.

    c_trop(n) = (1/2) n^T (P Lam) n + ell^T n once a pairing P is fixed;
    c_trop(n1+n2) - c_trop(n1) - c_trop(n2) = n1^T (P Lam) n2.
    """

    Lambda: IntRows
    ell: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "Lambda", int_rows_from(self.Lambda))
        object.__setattr__(self, "ell", tuple(Fraction(x) for x in self.ell))
        g = len(self.Lambda)
        if any(len(r) != g for r in self.Lambda) or len(self.ell) != g:
            raise ShapeMismatchError("factor shape mismatch")

    @property
    def g(self) -> int:
        return len(self.Lambda)

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.Lambda for x in r) and all(
            x == 0 for x in self.ell
        )

    def lambda_is_zero(self) -> bool:
        return all(x == 0 for r in self.Lambda for x in r)

    def to_json_dict(self) -> dict:
        return {
            "Lambda": [list(r) for r in self.Lambda],
            "ell": [format_fraction(x) for x in self.ell],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "AutomorphyFactor":
        return cls(
            Lambda=int_rows_from(data["Lambda"]),
            ell=tuple(parse_fraction(str(x)) for x in data["ell"]),
        )


@dataclass(frozen=True)
class ValuationProfile:
    """w-values on coset representatives; +infinity allowed (math.inf)."""

    entries: tuple[tuple[IntVec, Fraction | float], ...]

    def __post_init__(self):
        seen = set()
        norm = []
        for rep, w in self.entries:
            rep = tuple(int(x) for x in rep)
            if rep in seen:
                raise ShapeMismatchError(f"duplicate profile rep {rep}")
            seen.add(rep)
            norm.append((rep, w if w == INF else Fraction(w)))
        norm.sort(key=lambda e: e[0])
        object.__setattr__(self, "entries", tuple(norm))
        if not any(w != INF for _, w in self.entries):
            raise EmptyProfileError("profile has no finite value")

    @property
    def reps(self) -> tuple[IntVec, ...]:
        return tuple(r for r, _ in self.entries)

    def w(self, rep: IntVec) -> Fraction | float:
        for r, value in self.entries:
            if r == rep:
                return value
        raise KeyError(f"{rep} is not a profile representative")

    def finite_entries(self) -> tuple[tuple[IntVec, Fraction], ...]:
        return tuple((r, w) for r, w in self.entries if w != INF)

    def to_json_list(self) -> list:
        return [
            {"rep": list(r), "w": format_value(w)} for r, w in self.entries
        ]

    @classmethod
    def from_json_list(cls, data: list) -> "ValuationProfile":
        return cls(
            entries=tuple(
                (tuple(int(x) for x in e["rep"]), parse_value(str(e["w"])))
                for e in data
            )
        )


@dataclass(frozen=True)
class EvalResult:
    value: Fraction
    witnesses: tuple[IntVec, ...]

    @property
    def canonical(self) -> IntVec:
        return self.witnesses[0]

    @property
    def unique(self) -> bool:
        return len(self.witnesses) == 1


@dataclass(frozen=True)
class TropicalThetaFunction:
    """A tropical theta function f(v) = min_u w(u) + <u, v> on a torus."""

    base: TropicalPolarizationData
    factor: AutomorphyFactor
    profile: ValuationProfile

    def __post_init__(self):
        g = self.base.g
        if self.factor.g != g:
            raise ShapeMismatchError("factor rank != base rank")
        if any(len(r) != g for r in self.profile.reps):
            raise ShapeMismatchError("profile rep rank != base rank")
        if self.factor.lambda_is_zero():
            if not self.factor.is_zero():
                raise ShapeMismatchError(
                    "lambda = 0 requires a fully trivial factor"
                )
        else:
            if int_det(self.factor.Lambda) == 0:
                raise ShapeMismatchError(
                    "factor Lambda must be invertible or identically zero"
                )
            B = self._B_rows
            if not is_symmetric(B):
                raise NotSymmetricError("P * Lambda must be symmetric")
            _ldlt(B)  # raises NotPositiveDefiniteError with the bad pivot
            cosets = CosetLattice(self.factor.Lambda)
            reps = self.profile.reps
            if len(reps) != cosets.index:
                raise ShapeMismatchError(
                    f"profile needs {cosets.index} coset representatives, got {len(reps)}"
                )
            for i, a in enumerate(reps):
                for b in reps[:i]:
                    if cosets.congruent(a, b):
                        raise ShapeMismatchError(
                            f"profile reps {a} and {b} are congruent"
                        )

    @property
    def g(self) -> int:
        return self.base.g

    @cached_property
    def _B_rows(self):
        return matmul(self.base.P.entries, self.factor.Lambda)

    @cached_property
    def _cosets(self) -> CosetLattice:
        return CosetLattice(self.factor.Lambda)

    @property
    def is_ample(self) -> bool:
        return not self.factor.lambda_is_zero()

    # ---------- the automorphy data ----------

    def c_trop(self, n: Sequence[int]) -> Fraction:
        n = tuple(int(x) for x in n)
        quad = Fraction(1, 2) * vecdot(n, matvec(self._B_rows, n))
        return quad + vecdot(self.factor.ell, n)

    def pairing(self, n: Sequence[int], u: Sequence[int]) -> Fraction:
        """[u', u] for u' = sum n_i e'_i and u = sum u_j e_j: n^T P u."""
        return vecdot(matvec(self.base.P.entries, tuple(u)), tuple(n))

    def extended_w(self, u: Sequence[int]) -> Fraction | float:
        """w on all of M via w(u0 + Lam n) = w(u0) + c_trop(n) + [n, u0]."""
        u = tuple(int(x) for x in u)
        if not self.is_ample:
            for rep, w in self.profile.entries:
                if rep == u:
                    return w
            return INF
        rep, n = self._cosets.decompose(u)
        w = self.profile.w(rep)
        if w == INF:
            return INF
        return w + self.c_trop(n) + self.pairing(n, rep)

    # ---------- evaluation ----------

    def evaluate(self, v: Sequence) -> EvalResult:
        point = as_point(v)
        if len(point) != self.g:
            raise ShapeMismatchError("point length mismatch")
        finite = self.profile.finite_entries()
        if not finite:
            raise EmptyProfileError("profile has no finite value")
        if not self.is_ample:
            best = None
            witnesses = []
            for rep, w in finite:
                val = w + vecdot(rep, point)
                if best is None or val < best:
                    best, witnesses = val, [rep]
                elif val == best:
                    witnesses.append(rep)
            return EvalResult(value=best, witnesses=tuple(sorted(witnesses)))

        B = self._B_rows
        lam_t = transpose(self.factor.Lambda)
        best = None
        witnesses: list[IntVec] = []
        for rep, w in finite:
            lin = tuple(
                e + pr + lv
                for e, pr, lv in zip(
                    self.factor.ell,
                    matvec(self.base.P.entries, rep),
                    matvec(lam_t, point),
                )
            )
            const = w + vecdot(rep, point)
            res = minimize_quadratic(B, lin, const)
            if best is None or res.value < best:
                best = res.value
                witnesses = [self._witness(rep, n) for n in res.argmin]
            elif res.value == best:
                witnesses.extend(self._witness(rep, n) for n in res.argmin)
        return EvalResult(value=best, witnesses=tuple(sorted(witnesses)))

    def _witness(self, rep: IntVec, n: IntVec) -> IntVec:
        shift = matvec(self.factor.Lambda, n)
        return tuple(int(r + s) for r, s in zip(rep, shift))

    def __call__(self, v: Sequence) -> Fraction:
        return self.evaluate(v).value

    # ---------- translation ----------

    def translate(self, v0: Sequence) -> "TropicalThetaFunction":
        """The translate T_{v0} f(v) = f(v + v0) as a theta function:
        ell gains Lam^T v0, each profile value gains <rep, v0>."""
        shift = as_point(v0)
        if len(shift) != self.g:
            raise ShapeMismatchError("shift length mismatch")
        new_ell = tuple(
            e + s
            for e, s in zip(
                self.factor.ell, matvec(transpose(self.factor.Lambda), shift)
            )
        )
        new_entries = tuple(
            (rep, w if w == INF else w + vecdot(rep, shift))
            for rep, w in self.profile.entries
        )
        return TropicalThetaFunction(
            base=self.base,
            factor=AutomorphyFactor(Lambda=self.factor.Lambda, ell=new_ell),
            profile=ValuationProfile(entries=new_entries),
        )

    # ---------- serialization ----------

    def to_json_dict(self) -> dict:
        out = self.base.to_json_dict()
        out["factor"] = self.factor.to_json_dict()
        out["profile"] = self.profile.to_json_list()
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "TropicalThetaFunction":
        base = TropicalPolarizationData.from_json_dict(
            {
                "g": data["g"],
                "P": data["P"],
                "Lambda": data.get("Lambda", data["factor"]["Lambda"]),
            }
        )
        return cls(
            base=base,
            factor=AutomorphyFactor.from_json_dict(data["factor"]),
            profile=ValuationProfile.from_json_list(data["profile"]),
        )


def riemann_theta(data: TropicalPolarizationData) -> TropicalThetaFunction:
    """The principal tropical Riemann theta
    f(v) = min_{n} (1/2)[n, lambda(n)] + <lambda(n), v>:
    factor (Lambda, 0), profile {0 -> 0}."""
    if abs(int_det(data.Lambda)) != 1:
        raise NotPrincipalError(
            f"riemann_theta needs |det Lambda| = 1, got index {abs(int_det(data.Lambda))}"
        )
    zero = tuple(0 for _ in range(data.g))
    return TropicalThetaFunction(
        base=data,
        factor=AutomorphyFactor(Lambda=data.Lambda, ell=tuple(Fraction(0) for _ in range(data.g))),
        profile=ValuationProfile(entries=((zero, Fraction(0)),)),
    )


# ---------- transformation-law checking ----------

@dataclass(frozen=True)
class CheckFailure:
    point: TropPoint
    shift: IntVec
    lhs: Fraction
    rhs: Fraction


@dataclass(frozen=True)
class CheckReport:
    checked: int
    failures: tuple[CheckFailure, ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def default_shifts(g: int) -> tuple[IntVec, ...]:
    return tuple(n for n in product((-1, 0, 1), repeat=g) if any(n))


def verify_transformation(
    theta: TropicalThetaFunction,
    samples: Sequence[Sequence],
    shifts: Sequence[Sequence[int]] | None = None,
) -> CheckReport:
    """Exact check of f(v) = f(v + u') + c_trop(u') + <lambda(u'), v> for
    every sample point v and period u' = embed(n), n in shifts."""
    if shifts is None:
        shifts = default_shifts(theta.g)
    failures = []
    checked = 0
    for raw in samples:
        v = as_point(raw)
        lhs = theta.evaluate(v).value
        for n in shifts:
            n = tuple(int(x) for x in n)
            u = embed_Mprime(theta.base, n)
            shifted = theta.evaluate(tuple(a + b for a, b in zip(v, u))).value
            lam_n = matvec(theta.factor.Lambda, n)
            rhs = shifted + theta.c_trop(n) + vecdot(lam_n, v)
            checked += 1
            if lhs != rhs:
                failures.append(CheckFailure(point=v, shift=n, lhs=lhs, rhs=rhs))
    return CheckReport(checked=checked, failures=tuple(failures))


def is_even(theta: TropicalThetaFunction) -> bool:
    """f(v) = f(-v) exactly: ell = 0 and w(-rep) = w(rep) for every rep."""
    if any(x != 0 for x in theta.factor.ell):
        return False
    for rep, w in theta.profile.entries:
        neg = tuple(-x for x in rep)
        if theta.extended_w(neg) != w:
            return False
    return True


# ---------- formal expressions ----------

@dataclass(frozen=True)
class TropicalThetaExpression:
    """A formal integer combination sum_i mult_i * f_i(v + shift_i)."""

    terms: tuple[tuple[int, TropPoint, TropicalThetaFunction], ...]

    def __post_init__(self):
        if not self.terms:
            raise IncompatibleError("expression needs at least one term")
        norm = tuple(
            (int(m), as_point(s), t) for m, s, t in self.terms
        )
        object.__setattr__(self, "terms", norm)
        base = norm[0][2].base
        for _, shift, theta in norm:
            if theta.base != base:
                raise IncompatibleError("expression terms live on different tori")
            if len(shift) != theta.g:
                raise ShapeMismatchError("shift length mismatch")

    @property
    def base(self) -> TropicalPolarizationData:
        return self.terms[0][2].base

    def evaluate(self, v: Sequence) -> Fraction:
        point = as_point(v)
        return sum(
            m * theta.evaluate(tuple(a + b for a, b in zip(point, shift))).value
            for m, shift, theta in self.terms
        )


def expression_automorphy(expr: TropicalThetaExpression) -> AutomorphyFactor:
    """Aggregate factor: translates contribute (Lam, ell + Lam^T shift),
    multiplicities add."""
    g = expr.base.g
    lam = [[0] * g for _ in range(g)]
    ell = [Fraction(0)] * g
    for mult, shift, theta in expr.terms:
        for i in range(g):
            for j in range(g):
                lam[i][j] += mult * theta.factor.Lambda[i][j]
        corr = matvec(transpose(theta.factor.Lambda), shift)
        for i in range(g):
            ell[i] += mult * (theta.factor.ell[i] + corr[i])
    return AutomorphyFactor(
        Lambda=tuple(tuple(r) for r in lam), ell=tuple(ell)
    )


@dataclass(frozen=True)
class PeriodicPLFunction:
    """An expression whose automorphy factor cancels exactly: a genuine
    piecewise-linear function on the quotient torus."""

    expression: TropicalThetaExpression

    def evaluate(self, v: Sequence) -> Fraction:
        return self.expression.evaluate(v)

    def __call__(self, v: Sequence) -> Fraction:
        return self.evaluate(v)

    @property
    def base(self) -> TropicalPolarizationData:
        return self.expression.base

    def check_periodicity(
        self,
        samples: Sequence[Sequence],
        shifts: Sequence[Sequence[int]] | None = None,
    ) -> CheckReport:
        if shifts is None:
            shifts = default_shifts(self.base.g)
        failures = []
        checked = 0
        for raw in samples:
            v = as_point(raw)
            here = self.evaluate(v)
            for n in shifts:
                u = embed_Mprime(self.base, tuple(int(x) for x in n))
                there = self.evaluate(tuple(a + b for a, b in zip(v, u)))
                checked += 1
                if here != there:
                    failures.append(
                        CheckFailure(point=v, shift=tuple(int(x) for x in n), lhs=here, rhs=there)
                    )
        return CheckReport(checked=checked, failures=tuple(failures))


def difference_to_periodic(expr: TropicalThetaExpression) -> PeriodicPLFunction:
    """Descend an expression to the torus; the aggregate factor must vanish
    exactly (NonzeroAutomorphyError carries the residual otherwise)."""
    residual = expression_automorphy(expr)
    if not residual.is_zero():
        raise NonzeroAutomorphyError(residual)
    return PeriodicPLFunction(expression=expr)


def level_n_function(
    theta: TropicalThetaFunction, shifts: Sequence[Sequence]
) -> PeriodicPLFunction:
    """h(v) = sum_i f(v + v_i) - n f(v) for shifts v_1..v_n summing to zero.

    The base theta must be the principal Riemann theta (factor (Lambda, 0),
    profile {0 -> 0}); the aggregate factor then cancels identically.
    """
    points = [as_point(s) for s in shifts]
    if not points:
        raise ShiftsDoNotSumToZeroError("need at least one shift")
    g = theta.g
    total = tuple(sum(p[i] for p in points) for i in range(g))
    if any(x != 0 for x in total):
        raise ShiftsDoNotSumToZeroError(f"shifts sum to {total}, not zero")
    zero = tuple(0 for _ in range(g))
    if (
        abs(int_det(theta.factor.Lambda)) != 1
        or any(x != 0 for x in theta.factor.ell)
        or theta.profile.entries != ((zero, Fraction(0)),)
        or theta.factor.Lambda != theta.base.Lambda
    ):
        raise NotPrincipalError("level_n_function needs the principal Riemann theta")
    terms = [(1, p, theta) for p in points]
    terms.append((-len(points), zero, theta))
    return difference_to_periodic(TropicalThetaExpression(terms=tuple(terms)))


def kummer_check(
    h: PeriodicPLFunction, samples: Sequence[Sequence]
) -> CheckReport:
    """h(v) = h(-v) exactly at the samples; requires every distinct theta in
    the expression to be even (ell = 0, symmetric profile)."""
    seen = []
    for _, _, theta in h.expression.terms:
        if theta not in seen:
            seen.append(theta)
            if not is_even(theta):
                raise IncompatibleError(
                    "kummer_check needs an even base theta (ell = 0, w(u) = w(-u))"
                )
    failures = []
    checked = 0
    for raw in samples:
        v = as_point(raw)
        lhs = h.evaluate(v)
        rhs = h.evaluate(tuple(-x for x in v))
        checked += 1
        if lhs != rhs:
            failures.append(
                CheckFailure(point=v, shift=tuple(0 for _ in v), lhs=lhs, rhs=rhs)
            )
    return CheckReport(checked=checked, failures=tuple(failures))
