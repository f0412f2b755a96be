import math

import mpmath
import numpy as np
import pytest
from scipy.linalg import null_space

from mqshape.exceptions import DomainError
from mqshape.interpolator import poly_basis
from mqshape.kernel import kernel_eval, validate_spec
from mqshape.numerics import PrecisionPolicy

SQRT_PI = math.sqrt(math.pi)


def test_validate_spec():
    s = validate_spec(1, 1)
    assert s.m == 1 and s.gamma_factor == pytest.approx(-2 * SQRT_PI)
    s = validate_spec(-1, 2)
    assert s.m == 0 and s.gamma_factor == pytest.approx(SQRT_PI)
    with pytest.raises(DomainError, match="excluded exponent"):
        validate_spec(2, 1)
    for bad in (0.0, -1.0, math.inf):
        with pytest.raises(DomainError, match="invalid shape parameter"):
            validate_spec(1, bad)


def test_kernel_values():
    assert kernel_eval(validate_spec(-1, 1), 0.0) == pytest.approx(SQRT_PI)
    assert kernel_eval(validate_spec(1, 1), 0.0) == pytest.approx(-2 * SQRT_PI)
    assert kernel_eval(validate_spec(1, 3), [0.0, 4.0]) == pytest.approx(-10 * SQRT_PI)


def test_kernel_extended_matches_machine():
    spec = validate_spec(1.5, 0.7)
    v = kernel_eval(spec, [0.3, -0.2], PrecisionPolicy.extended(200))
    assert float(v) == pytest.approx(kernel_eval(spec, [0.3, -0.2]), rel=1e-14)


def test_kernel_large_c_against_mpmath():
    spec = validate_spec(-2.5, 1e6)
    ref = mpmath.gamma(1.25) * (mpmath.mpf(10) ** 12 + mpmath.mpf("0.09")) ** -1.25
    assert kernel_eval(spec, 0.3) == pytest.approx(float(ref), rel=1e-14)


@pytest.mark.parametrize("n", [2, 3])
def test_radial_symmetry(n):
    rng = np.random.default_rng(n)
    spec = validate_spec(-1.3, 0.8)
    x = rng.normal(size=(50, n))
    q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    assert np.array_equal(kernel_eval(spec, x), kernel_eval(spec, -x))
    np.testing.assert_allclose(kernel_eval(spec, x @ q.T), kernel_eval(spec, x), rtol=1e-12)


@pytest.mark.parametrize("beta", [-3.0, -1.0, 0.5, 1.0, 3.0, 5.5])
def test_monotone_in_radius(beta):
    spec = validate_spec(beta, 1.3)
    vals = kernel_eval(spec, np.linspace(0, 5, 200).reshape(-1, 1))
    d = np.diff(vals)
    if spec.increasing:
        assert np.all(d > 0)
    else:
        assert np.all(d < 0)


def _moment_free(rng, pts, m):
    basis = poly_basis(pts.shape[1], m)
    w = rng.normal(size=len(pts))
    if basis.Q:
        ns = null_space(basis(pts).T)
        w = ns @ rng.normal(size=ns.shape[1])
    return w


@pytest.mark.parametrize("beta", [-1.0, 1.0, 3.0])
@pytest.mark.parametrize("n", [1, 2])
def test_cpd_quadratic_form(beta, n):
    rng = np.random.default_rng(7)
    spec = validate_spec(beta, 0.9)
    for _ in range(40):
        pts = rng.uniform(0, 1, size=(12, n))
        A = kernel_eval(spec, pts[:, None, :] - pts[None, :, :])
        w = _moment_free(rng, pts, spec.m)
        scale = np.abs(A).max() * (w @ w)
        assert w @ A @ w >= -1e-10 * scale
