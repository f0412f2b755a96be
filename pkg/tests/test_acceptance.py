"""Acceptance criteria, one test each, with a pass/fail line per criterion."""

import contextlib
import math
import time

import mpmath
import numpy as np
import pytest
from scipy.linalg import null_space
from scipy.stats import spearmanr

import advisor_oracle as oracle
from conftest import ACCEPTANCE
from mqshape.advisor import AdvisorInputs, advise
from mqshape.bandlimited import make_sinc, spectral_density
from mqshape.bounds import (
    ProblemSetting,
    bandlimited_error_bound,
    special_error_bound,
    special_norm_terms,
)
from mqshape.constants import gamma_seq, rho_delta0, theorem_constants
from mqshape.exceptions import IllConditionedError
from mqshape.experiments import verify_bound
from mqshape.interpolator import (
    CenterSet,
    assemble_system,
    condition_estimate,
    evaluate,
    poly_basis,
    solve_interpolant,
)
from mqshape.kernel import kernel_eval, validate_spec
from mqshape.numerics import PrecisionPolicy

from test_advisor import OPTIMAL_MATRIX


@contextlib.contextmanager
def criterion(k, title, budget_s):
    ACCEPTANCE[k] = (title, False)
    t0 = time.perf_counter()
    yield
    elapsed = time.perf_counter() - t0
    assert elapsed < budget_s, f"took {elapsed:.1f}s, budget {budget_s}s"
    ACCEPTANCE[k] = (f"{title} ({elapsed:.2f}s)", True)
    print(f"criterion {k} PASS: {title} ({elapsed:.2f}s)")


def test_criterion_01_constant_tables():
    with criterion(1, "gamma_n and rho/Delta0 tables", 1.0):
        assert [gamma_seq(n) for n in range(1, 5)] == [2, 12, 78, 632]
        for (n, beta), (rho, d0) in {(4, 1.5): (1.0, 1.0), (5, -1.0): (5 / 3, 4.32),
                                     (1, 1.0): (1.0, 0.25)}.items():
            r, D0, _ = rho_delta0(n, beta)
            assert r == pytest.approx(rho, abs=1e-12)
            assert D0.to_value() == pytest.approx(d0, abs=1e-12)


def test_criterion_02_lambda_identity():
    rng = np.random.default_rng(2)
    with criterion(2, "lambda^(1/delta0) = (2/3)^(m+1) over 1000 draws", 1.0):
        for _ in range(1000):
            n = int(rng.integers(1, 5))
            beta = float(rng.uniform(-6, 8))
            if beta >= 0 and abs(beta / 2 - round(beta / 2)) < 1e-9:
                beta += 0.1
            b0 = 10 ** rng.uniform(-3, 2)
            c = 10 ** rng.uniform(-3, 30)
            tc = theorem_constants(n, beta, b0, c)
            got = tc.lambda_power(tc.delta0).ln_mag
            want = (tc.m + 1) * math.log(2 / 3)
            assert abs(got - want) <= 1e-12 * max(1.0, abs(want))


def _well_conditioned_model(rng, n, beta, N):
    spec = None
    for _ in range(50):
        pts = rng.uniform(0, 1, size=(N, n))
        c = 10 ** rng.uniform(-2, -1)
        spec = validate_spec(beta, c)
        centers = CenterSet(pts, np.zeros(n), 1.0)
        values = np.sin(3 * pts.sum(axis=1)) + pts[:, 0] ** 2
        try:
            return solve_interpolant(spec, centers, values, condition_limit=1e12), values
        except IllConditionedError:
            continue
    raise AssertionError("no well-conditioned draw")


def test_criterion_03_exactness_and_moments():
    rng = np.random.default_rng(3)
    with criterion(3, "exact at centers and moment conditions, 50 configurations", 30.0):
        for k in range(50):
            n = [1, 2][k % 2]
            beta = [-1.0, 1.0, 3.0][k % 3]
            N = int(rng.integers(6, 41))
            model, values = _well_conditioned_model(rng, n, beta, N)
            pts = model.centers.points
            scale = max(1.0, float(np.abs(values).max()))
            assert np.max(np.abs(evaluate(model, pts) - values)) <= 1e-8 * scale
            P = model.basis(pts)
            if P.size:
                a = model.kernel_coeffs
                mscale = float(np.abs(a) @ np.abs(P).max(axis=1)) or 1.0
                assert np.max(np.abs(P.T @ a)) <= 1e-8 * max(1.0, mscale)


def test_criterion_04_polynomial_reproduction():
    with criterion(4, "polynomials of degree < m reproduced", 5.0):
        x1 = np.linspace(0, 1, 8).reshape(-1, 1)
        lin = lambda x: 2.0 - 3.5 * x[:, 0]  # noqa: E731
        m1 = solve_interpolant(validate_spec(3, 0.8), CenterSet(x1, np.zeros(1), 1.0), lin(x1))
        g1 = np.linspace(0, 1, 100).reshape(-1, 1)
        assert np.max(np.abs(evaluate(m1, g1) - lin(g1))) <= 1e-8
        rng = np.random.default_rng(4)
        x2 = rng.uniform(0, 1, size=(20, 2))
        m2 = solve_interpolant(validate_spec(1, 0.8), CenterSet(x2, np.zeros(2), 1.0),
                               np.full(20, 1.7))
        ax = np.linspace(0, 1, 10)
        g2 = np.stack([a.ravel() for a in np.meshgrid(ax, ax)], axis=-1)
        assert np.max(np.abs(evaluate(m2, g2) - 1.7)) <= 1e-8


def test_criterion_05_cpd_quadratic_form():
    rng = np.random.default_rng(5)
    with criterion(5, "CPD quadratic form nonnegative, 200 vectors per case", 10.0):
        for beta in (-1.0, 1.0):
            for n in (1, 2):
                spec = validate_spec(beta, 0.9)
                basis = poly_basis(n, spec.m)
                for _ in range(200):
                    pts = rng.uniform(0, 1, size=(12, n))
                    A = kernel_eval(spec, pts[:, None, :] - pts[None, :, :])
                    if basis.Q:
                        ns = null_space(basis(pts).T)
                        w = ns @ rng.normal(size=ns.shape[1])
                    else:
                        w = rng.normal(size=12)
                    assert w @ A @ w >= -1e-10 * np.abs(A).max() * (w @ w)


def test_criterion_06_advisor_vs_grid_oracle():
    with criterion(6, "advised c within 1% of a 10^4-point grid optimum", 60.0):
        labels = set()
        for mode, args, label in OPTIMAL_MATRIX:
            n, beta, sigma, delta, b0 = args
            adv = advise(mode, AdvisorInputs(n, beta, sigma, delta, b0))
            assert adv.case_label == label and adv.advice_kind == "optimal"
            f = oracle.objective(mode, label, n, beta, sigma, delta, b0)
            c = mpmath.exp(adv.c.ln_mag)
            lo = mpmath.exp(adv.c_min.ln_mag)
            best = oracle.grid_search(f, lo, 1000 * max(c, lo), points=10_000)
            assert best >= f(c) + mpmath.log(0.99), label
            labels.add(label)
        assert len(labels) >= 12


def test_criterion_07_advisor_examples():
    with criterion(7, "derived advisor examples", 1.0):
        def c_of(mode, *args):
            return advise(mode, AdvisorInputs(*args)).c
        assert c_of("practical", 1, 3, 1, 0.001, 8).to_value() == pytest.approx(
            72 * math.exp(4) * 0.001, rel=1e-12)
        assert c_of("practical", 1, 3, 1, 0.001, 8).to_value() == pytest.approx(3.9311, rel=2e-5)
        assert c_of("practical", 2, 0.5, 0.25, 1e-25, 1).to_value() == pytest.approx(1.0, rel=1e-6)
        assert c_of("practical", 1, -1, 2, 1e-4, 1).to_value() == pytest.approx(0.5, rel=1e-6)
        got = c_of("unfixed-b0", 2, 0.5, 0.25, 1e-22).to_value()
        # the stationary point lies below the floor K (m + 1) delta, so the floor wins
        K = 12 * math.sqrt(2) * mpmath.exp(48) * 12
        ln_h = 0.125 + math.log(2 / 3) / float(K * mpmath.mpf("1e-22"))
        assert 0.5 / (4 * ln_h) < got
        assert got == pytest.approx(float(K * 2 * mpmath.mpf("1e-22")), rel=1e-6)
        assert got == pytest.approx(28.580, rel=1e-4)


def test_criterion_08_bound_verification():
    with criterion(8, "empirical error below the bound at 256 bits", 300.0):
        r1 = verify_bound(1, 1.0, 8.0, 1.0, 9, bits=256, eval_points=1000)
        assert r1.verdict == "PASS", r1.reasons
        assert r1.delta <= r1.delta0.to_value()
        assert r1.empirical <= r1.bound.value
        r2 = verify_bound(1, -1.0, 0.01, 1.0, 9, bits=256, eval_points=1000)
        assert r2.verdict == "PASS", r2.reasons
        assert r2.c == 1.0
        assert r2.empirical <= r2.bound.value


def test_criterion_09_divergence_shape():
    with criterion(9, "bounds grow on both sides of the minimizer", 5.0):
        # b0 small enough that c >= c0 on the window, so lambda^(1/delta)
        # does not depend on c and the bound is c^(p/4) e^(c sigma/2) times a constant
        b0 = 3e-24
        adv = advise("practical", AdvisorInputs(2, 0.5, 0.25, b0 / 100, b0))
        assert adv.case_label == "S2.Case2"
        cstar = adv.c_value
        assert cstar == pytest.approx(1.0)
        s = ProblemSetting(2, b0, 0.25, b0 / 100)

        def bandlimited(c):
            return bandlimited_error_bound(s, validate_spec(0.5, c), 1.0).total.ln_mag
        at = bandlimited(cstar)
        for c in (cstar / 100, 100 * cstar, 1e-6, 1e6):
            assert bandlimited(c) > at

        dens = spectral_density(make_sinc(1, 1.0))
        s12 = ProblemSetting(1, 1.0, 1.0, 1e-4)

        def imq_1d(c):
            t = special_norm_terms(c, 1.0, dens)
            return special_error_bound(s12, c, t.A, t.B).total.ln_mag
        small = [imq_1d(c) for c in (1e-2, 1e-4, 1e-6)]
        large = [imq_1d(c) for c in (1e3, 3e3, 1e4)]
        assert small[0] < small[1] < small[2]
        assert large[0] < large[1] < large[2]
        assert large[2] > small[2]


def test_criterion_10_condition_trend():
    with criterion(10, "condition estimate rises with c (Spearman >= 0.9)", 10.0):
        pts = np.linspace(0, 1, 10).reshape(-1, 1)
        centers = CenterSet(pts, np.zeros(1), 1.0)
        cs = np.geomspace(0.01, 2.0, 10)
        for beta in (1.0, -1.0):
            conds = []
            for c in cs:
                M, _ = assemble_system(validate_spec(beta, c), centers, np.zeros(10),
                                       PrecisionPolicy.machine())
                conds.append(condition_estimate(M))
            rho = spearmanr(cs, conds).correlation
            assert rho >= 0.9, (beta, rho)
