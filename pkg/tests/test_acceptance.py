"""Acceptance gate: nine numbered criteria, one printed verdict line each.

Each test prints "ACCEPTANCE <n> PASS|FAIL <label>" to the real stderr so
the lines survive pytest capture, then asserts.  Oracles are independent of
the code under test: numpy integer arithmetic for the lattice minimizer and
a dense rational grid scan for the divisor topology.
"""

import itertools
import random
import sys
import time
from contextlib import contextmanager
from fractions import Fraction as F
from math import lcm
from pathlib import Path

import numpy as np
from click.testing import CliRunner

from troptheta.cli import main as cli_main
from troptheta.crosschecks import (
    sample_points,
    seeded_period,
    suite_a,
    suite_b,
    suite_c,
)
from troptheta.geometry import corner_locus
from troptheta.lattice import minimize_quadratic
from troptheta.nonarch import (
    PeriodMatrix,
    build_riemann_theta,
    canonical_cocycle,
    theta_basis,
    tropicalize,
)
from troptheta.puiseux import PuiseuxNumber
from troptheta.theta import (
    AutomorphyFactor,
    TropicalThetaFunction,
    ValuationProfile,
    kummer_check,
    level_n_function,
    riemann_theta,
)
from troptheta.varieties import TropicalPolarizationData

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@contextmanager
def criterion(num, label, capfd):
    state = {"detail": ""}
    ok = False
    started = time.perf_counter()
    try:
        yield state
        ok = True
    finally:
        verdict = "PASS" if ok else "FAIL"
        elapsed = time.perf_counter() - started
        # capture must be suspended or the verdict line only shows on failure
        with capfd.disabled():
            print(
                f"ACCEPTANCE {num} {verdict} {label}: {state['detail']} [{elapsed:.2f}s]",
                file=sys.stderr,
                flush=True,
            )


def ident(g):
    return tuple(tuple(int(i == j) for j in range(g)) for i in range(g))


def mono(e):
    return PuiseuxNumber.monomial(1, F(e))


def principal_data(g, P):
    return TropicalPolarizationData(g, P, ident(g))


P_G1 = ((F(2),),)
P_G2 = ((F(2), F(1)), (F(1), F(2)))
P_G3 = ((F(2), F(0), F(0)), (F(0), F(2), F(0)), (F(0), F(0), F(2)))
PM_G1 = PeriodMatrix(((mono(2),),))
PM_G2 = PeriodMatrix(((mono(2), mono(1)), (mono(1), mono(2))))


def level_two_pair():
    cocycle = canonical_cocycle(PM_G1, ((2,),))
    return theta_basis(PM_G1, cocycle)


# 1. the exact minimizer against naive integer minimization over a box


def test_criterion_1_minimizer_box_oracle(capfd):
    with criterion(1, "minimizer-box-oracle", capfd) as c:
        rng = random.Random(20260814)
        grids = {}

        def grid(g):
            if g not in grids:
                grids[g] = np.array(
                    list(itertools.product(range(-40, 41), repeat=g)), dtype=np.int64
                )
            return grids[g]

        def sample_case(g):
            # symmetric, entries in [-5,5], denominators in {1,2,3}; keep
            # positive-definite forms whose continuous minimum is well
            # inside the oracle box (float filter, exactness unaffected)
            while True:
                B = [[F(0)] * g for _ in range(g)]
                for i in range(g):
                    den = rng.choice((1, 2, 3))
                    B[i][i] = F(rng.randint(1, 5 * den), den)
                    for j in range(i):
                        den = rng.choice((1, 2, 3))
                        B[i][j] = B[j][i] = F(rng.randint(-5 * den, 5 * den), den)
                ell = [
                    F(rng.randint(-5 * d, 5 * d), d)
                    for d in (rng.choice((1, 2, 3)) for _ in range(g))
                ]
                Bf = np.array([[float(x) for x in row] for row in B])
                try:
                    centre = np.linalg.solve(Bf, -np.array([float(x) for x in ell]))
                except np.linalg.LinAlgError:
                    continue
                if np.linalg.eigvalsh(Bf)[0] <= 1e-9 or np.abs(centre).max() > 30:
                    continue
                return B, ell

        started = time.perf_counter()
        for k in range(200):
            g = k % 3 + 1
            B, ell = sample_case(g)
            # 2D*f(n) = n^T (D B) n + n . (2D ell) is integer-valued: the
            # whole box scan runs in exact int64 arithmetic
            D = lcm(
                *[x.denominator for row in B for x in row],
                *[x.denominator for x in ell],
            )
            DB = np.array([[int(x * D) for x in row] for row in B], dtype=np.int64)
            Dl = np.array([int(2 * D * x) for x in ell], dtype=np.int64)
            N = grid(g)
            q = np.einsum("ni,ij,nj->n", N, DB, N) + N @ Dl
            qmin = q.min()
            box_argmin = sorted(tuple(int(v) for v in row) for row in N[q == qmin])
            res = minimize_quadratic(B, ell)
            assert res.value == F(int(qmin), 2 * D), (k, B, ell)
            assert list(res.argmin) == box_argmin, (k, B, ell)
        elapsed = time.perf_counter() - started
        assert elapsed < 10
        c["detail"] = f"200/200 exact box agreements, {elapsed:.2f}s"


# 2. transformation law of tropicalized series on five fixtures


def test_criterion_2_transformation_law_suite(capfd):
    with criterion(2, "transformation-law", capfd) as c:
        f_level2 = level_two_pair()
        fixtures = [
            ("principal g=1", build_riemann_theta(PM_G1, ident(1))),
            ("principal g=2", build_riemann_theta(PM_G2, ident(2))),
            ("principal g=3", build_riemann_theta(seeded_period(3, 11), ident(3))),
            ("level-2 g=1 first", f_level2[0]),
            ("level-2 g=1 second", f_level2[1]),
        ]
        for name, f in fixtures:
            started = time.perf_counter()
            outcomes = suite_a(f, samples=50, shifts=7, seed=0)
            elapsed = time.perf_counter() - started
            assert all(o.passed for o in outcomes), (name, outcomes)
            assert outcomes[0].detail == "350 exact identities", name
            assert elapsed < 5, (name, elapsed)
        c["detail"] = "5 fixtures x 350 identities each"


# 3. tropicalized Riemann series equals the intrinsic tropical theta


def test_criterion_3_riemann_match(capfd):
    with criterion(3, "riemann-match", capfd) as c:
        started = time.perf_counter()
        for pm in (PM_G1, PM_G2):
            outcomes = suite_b(pm, None, samples=100, seed=0)
            assert all(o.passed for o in outcomes), outcomes
            match = next(o for o in outcomes if o.name == "riemann-match")
            assert match.detail.startswith("100/100")
            assert "additive constant 0" in match.detail
        elapsed = time.perf_counter() - started
        assert elapsed < 5
        c["detail"] = f"g=1 and g=2, 100/100 points each, {elapsed:.2f}s"


# 4. valuations of theta ratios descend to the quotient


def test_criterion_4_rational_function_suite(capfd):
    with criterion(4, "theta-ratio-valuations", capfd) as c:
        f1, f2 = level_two_pair()
        started = time.perf_counter()
        outcomes = suite_c(f1, f2, pairs=50, points=20, seed=0)
        elapsed = time.perf_counter() - started
        assert [o.name for o in outcomes] == ["difference-periodic", "valuation-identity"]
        assert all(o.passed for o in outcomes), outcomes
        assert elapsed < 5
        c["detail"] = f"50 periodicity pairs + 20 monomial points, {elapsed:.2f}s"


# 5. shifted-sum constructions: periodic level-n functions and Kummer symmetry


def test_criterion_5_level_constructions(capfd):
    with criterion(5, "level-constructions", capfd) as c:
        started = time.perf_counter()
        for g, P in ((1, P_G1), (2, P_G2)):
            th = riemann_theta(principal_data(g, P))
            w = tuple(F(2 + i, 7 + 4 * i) for i in range(g))
            shifts = [w, tuple(2 * x for x in w), tuple(-3 * x for x in w)]
            h = level_n_function(th, shifts)
            rep = h.check_periodicity(sample_points(g, 50, seed=3))
            assert rep.ok and rep.checked >= 50, rep.failures[:2]
            h2 = level_n_function(th, [w, tuple(-x for x in w)])
            krep = kummer_check(h2, sample_points(g, 50, seed=4))
            assert krep.ok and krep.checked == 50, krep.failures[:2]
        elapsed = time.perf_counter() - started
        assert elapsed < 5
        c["detail"] = f"periodicity + 50 symmetric pairs for g=1,2, {elapsed:.2f}s"


# 6. basis size equals the polarization index


def test_criterion_6_degree_identity(capfd):
    with criterion(6, "degree-identity", capfd) as c:
        cases = []
        for d in range(1, 7):
            cases.append((PeriodMatrix(((mono(2 * (d % 3 + 1)),),)), ((d,),), d))
        one = mono(0)
        for d in (2, 3, 5):
            pm = PeriodMatrix(((mono(2), one), (one, mono(4))))
            cases.append((pm, ((1, 0), (0, d)), d))
        cases.append((seeded_period(2, 5), ((2, 0), (0, 2)), 4))
        assert len(cases) == 10
        assert {d for _, _, d in cases} == {1, 2, 3, 4, 5, 6}
        for pm, lam, det in cases:
            basis = theta_basis(pm, canonical_cocycle(pm, lam))
            assert len(basis) == det, (lam, len(basis))
            for f in basis:
                rep = f.verify_invariance()
                assert rep.ok, (lam, rep.failures[:2])
        c["detail"] = "10 seeded fixtures, |basis| = |det L| for dets 1..6"


# 7. divisor topology against a dense rational grid scan


def _on_segment(p, a, b):
    d = tuple(x - y for x, y in zip(b, a))
    e = tuple(x - y for x, y in zip(p, a))
    dd = sum(x * x for x in d)
    if dd == 0:
        return all(x == 0 for x in e)
    t = sum(x * y for x, y in zip(e, d)) / dd
    return 0 <= t <= 1 and all(x == t * y for x, y in zip(e, d))


def test_criterion_7_divisor_topology(capfd):
    with criterion(7, "divisor-topology", capfd) as c:
        started = time.perf_counter()
        th1 = riemann_theta(principal_data(1, P_G1))
        cx1 = corner_locus(th1)
        assert cx1.quotient.zero_cells == ((F(1),),)

        th2 = riemann_theta(principal_data(2, P_G2))
        cx2 = corner_locus(th2)
        # oracle: exact tie scan over the fundamental domain at step 1/50;
        # every grid tie must lie on a reported piece and every reported
        # piece must be a genuine tie at its midpoint
        ties = []
        for si in range(50):
            for ti in range(50):
                v = (F(2 * si + ti, 50), F(si + 2 * ti, 50))
                if len(th2.evaluate(v).witnesses) >= 2:
                    ties.append(v)
        assert len(ties) > 0
        hit = set()
        for v in ties:
            owners = [
                i
                for i, piece in enumerate(cx2.skeleton)
                if len(piece.vertices) == 2 and _on_segment(v, *piece.vertices)
            ]
            assert owners, f"grid tie {v} misses every reported piece"
            hit.update(owners)
        assert hit == set(range(len(cx2.skeleton)))
        for piece in cx2.skeleton:
            mid = tuple((a + b) / 2 for a, b in zip(*piece.vertices))
            assert len(th2.evaluate(mid).witnesses) >= 2
        assert cx2.quotient.betti0 == 1
        assert cx2.quotient.betti1 == 2
        elapsed = time.perf_counter() - started
        assert elapsed < 60
        c["detail"] = (
            f"g=1 single point at x=1; g=2 b1=2 certified by {len(ties)} grid ties, {elapsed:.2f}s"
        )


# 8. piecewise integral affinity along random segments


def test_criterion_8_piecewise_affinity(capfd):
    with criterion(8, "piecewise-affinity", capfd) as c:
        f_level2 = level_two_pair()
        fixtures = [
            riemann_theta(principal_data(1, P_G1)),
            riemann_theta(principal_data(2, P_G2)),
            riemann_theta(principal_data(3, P_G3)),
            TropicalThetaFunction(
                base=TropicalPolarizationData(1, P_G1, ((2,),)),
                factor=AutomorphyFactor(Lambda=((2,),), ell=(F(0),)),
                profile=ValuationProfile(entries=(((0,), F(0)), ((1,), F(1, 2)))),
            ),
            tropicalize(f_level2[1]),
        ]
        rng = random.Random(88)
        pieces = 0
        for th in fixtures:
            g = th.g
            for _ in range(20):
                a = tuple(F(rng.randint(-28, 28), 7) for _ in range(g))
                b = tuple(F(rng.randint(-33, 33), 11) for _ in range(g))
                if a == b:
                    continue
                samples = [
                    tuple(x + F(k, 12) * (y - x) for x, y in zip(a, b))
                    for k in range(13)
                ]
                evals = [th.evaluate(p) for p in samples]
                # maximal runs sharing one unique witness are the interiors
                # of linear pieces crossed by the segment
                run = []
                runs = []
                for p, res in zip(samples, evals):
                    if len(res.witnesses) == 1 and (
                        not run or run[-1][1].witnesses == res.witnesses
                    ):
                        run.append((p, res))
                    else:
                        if len(run) >= 3:
                            runs.append(run)
                        run = [(p, res)] if len(res.witnesses) == 1 else []
                if len(run) >= 3:
                    runs.append(run)
                for run in runs:
                    (p, rp), (q, rq) = run[0], run[-1]
                    u = rp.witnesses[0]
                    assert all(x == int(x) for x in u)
                    mid = tuple((x + y) / 2 for x, y in zip(p, q))
                    assert th.evaluate(mid).value == (rp.value + rq.value) / 2
                    assert rq.value - rp.value == sum(
                        ui * (y - x) for ui, x, y in zip(u, p, q)
                    )
                    pieces += 1
        assert pieces >= 100
        c["detail"] = f"{pieces} linear pieces on 20 segments x 5 fixtures"


# 9. byte-determinism of CLI reports and meshes


def test_criterion_9_cli_determinism(tmp_path, capfd):
    with criterion(9, "cli-determinism", capfd) as c:
        runner = CliRunner()
        report_argv = [
            ["validate", str(FIXTURES / "variety_g2.json")],
            ["eval", str(FIXTURES / "theta_g1.json"), "4/7", "-9/11"],
            ["crosscheck", "A", str(FIXTURES / "series_g1.json"), "--seed", "7"],
            ["crosscheck", "B", str(FIXTURES / "period_g1.json")],
            ["crosscheck", "C", str(FIXTURES / "level2_g1.json"), "--seed", "3"],
        ]
        for argv in report_argv:
            first = runner.invoke(cli_main, argv)
            second = runner.invoke(cli_main, argv)
            assert first.exit_code == 0 and second.exit_code == 0, argv
            assert first.stdout == second.stdout, argv
        meshes = []
        reports = []
        for name in ("a", "b"):
            out = tmp_path / f"{name}.json"
            res = runner.invoke(
                cli_main, ["divisor", str(FIXTURES / "variety_g2.json"), "--out", str(out)]
            )
            assert res.exit_code == 0
            meshes.append(out.read_bytes())
            reports.append(res.stdout)
        assert meshes[0] == meshes[1]
        assert reports[0] == reports[1]
        c["detail"] = "5 report commands + divisor mesh byte-identical across reruns"
