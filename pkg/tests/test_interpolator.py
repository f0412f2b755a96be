import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mqshape.exceptions import DomainError, IllConditionedError, RankDeficiencyError
from mqshape.interpolator import (
    CenterSet,
    assemble_system,
    condition_estimate,
    evaluate,
    fill_distance,
    grid_centers,
    poly_basis,
    solve_interpolant,
)
from mqshape.kernel import validate_spec
from mqshape.numerics import PrecisionPolicy

SQRT_PI = math.sqrt(math.pi)


def centers(pts, b0=1.0, corner=0.0):
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    return CenterSet(pts, np.full(pts.shape[1], corner), b0)


def test_poly_basis():
    assert poly_basis(2, 0).Q == 0
    assert poly_basis(2, 1).exponents == ((0, 0),)
    assert poly_basis(2, 2).exponents == ((0, 0), (1, 0), (0, 1))
    assert poly_basis(1, 3).exponents == ((0,), (1,), (2,))


def test_centerset_validation():
    with pytest.raises(DomainError):
        centers([[0.2], [0.2]])
    with pytest.raises(DomainError):
        centers([[1.5]])


def test_assemble_single_imq():
    M, rhs = assemble_system(validate_spec(-1, 1), centers([[0.5]]), [SQRT_PI])
    np.testing.assert_allclose(M, [[SQRT_PI]])


def test_assemble_block_shape():
    M, _ = assemble_system(validate_spec(1, 1), centers([[0.0], [1.0]]), [0.0, 1.0])
    assert M.shape == (3, 3)
    assert M[2, 2] == 0.0
    np.testing.assert_array_equal(M, M.T)


def test_single_center_model():
    model = solve_interpolant(validate_spec(-1, 1), centers([[0.0]]), [SQRT_PI])
    np.testing.assert_allclose(model.kernel_coeffs, [1.0])
    assert evaluate(model, 1.0) == pytest.approx(math.sqrt(math.pi / 2))


def test_constant_reproduction():
    rng = np.random.default_rng(3)
    X = centers(rng.uniform(0, 1, (15, 2)))
    model = solve_interpolant(validate_spec(1, 0.5), X, np.full(15, 5.0))
    assert np.abs(model.kernel_coeffs).max() < 1e-8
    assert model.poly_coeffs[0] == pytest.approx(5.0)


@pytest.mark.parametrize("policy", [PrecisionPolicy.machine(), PrecisionPolicy.extended(200)])
def test_linear_reproduction_beta3(policy):
    X = centers(np.linspace(0, 1, 7).reshape(-1, 1))
    model = solve_interpolant(validate_spec(3, 0.5), X, X.points[:, 0], policy)
    assert evaluate(model, 0.37) == pytest.approx(0.37, abs=1e-8)


def test_interpolation_and_moments():
    rng = np.random.default_rng(11)
    X = centers(rng.uniform(0, 1, (25, 2)))
    f = np.sin(3 * X.points[:, 0]) * X.points[:, 1]
    model = solve_interpolant(validate_spec(3, 0.4), X, f)
    np.testing.assert_allclose(evaluate(model, X.points), f, atol=1e-8)
    P = model.basis(X.points)
    assert np.abs(P.T @ model.kernel_coeffs).max() <= 1e-8 * np.abs(model.kernel_coeffs).max()


def test_rank_deficient():
    # three collinear points cannot determine a linear polynomial in 2-D
    X = centers([[0.1, 0.1], [0.5, 0.5], [0.9, 0.9]])
    with pytest.raises(RankDeficiencyError):
        solve_interpolant(validate_spec(3, 1), X, [0, 1, 2])


def test_ill_conditioned():
    X = centers(np.linspace(0, 1, 30).reshape(-1, 1))
    with pytest.raises(IllConditionedError) as info:
        solve_interpolant(validate_spec(1, 50), X, np.zeros(30))
    assert info.value.condition > 1e16
    assert "ill-conditioned: condition" in str(info.value)


def test_extended_rescues_flat_kernel():
    X = centers(np.linspace(0, 1, 12).reshape(-1, 1))
    f = np.cos(2 * X.points[:, 0])
    model = solve_interpolant(validate_spec(1, 3), X, f, PrecisionPolicy.extended(256))
    assert model.condition_estimate > 1e16
    assert model.residual_norm < 1e-40
    np.testing.assert_allclose(evaluate(model, X.points), f, atol=1e-14)


def test_condition_estimate():
    assert condition_estimate(np.eye(5)) == pytest.approx(1.0)
    assert condition_estimate(np.diag([1, 1e-6])) == pytest.approx(1e6)
    assert condition_estimate(np.zeros((2, 2))) == math.inf


def test_permutation_invariance():
    rng = np.random.default_rng(5)
    pts = rng.uniform(0, 1, (20, 2))
    f = np.exp(pts[:, 0] - pts[:, 1])
    perm = rng.permutation(20)
    spec = validate_spec(1, 0.3)
    a = solve_interpolant(spec, centers(pts), f)
    b = solve_interpolant(spec, centers(pts[perm]), f[perm])
    y = rng.uniform(0, 1, (50, 2))
    np.testing.assert_allclose(evaluate(a, y), evaluate(b, y), atol=1e-10)


def test_fill_distance_examples():
    assert fill_distance(centers([[0.0], [0.5], [1.0]])).estimate == pytest.approx(0.25)
    fd = fill_distance(centers([[0.5, 0.5]]))
    assert fd.estimate == pytest.approx(math.sqrt(0.5))
    with pytest.raises(DomainError):
        fill_distance(np.empty((0, 1)), cube=(0.0, 1.0))


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=2, max_size=6, unique=True), st.floats(0, 1))
def test_fill_distance_antitone(xs, extra):
    pts = np.array(xs).reshape(-1, 1)
    before = fill_distance(pts, cube=(0.0, 1.0), resolution=101).estimate
    after = fill_distance(np.vstack([pts, [[extra]]]), cube=(0.0, 1.0), resolution=101).estimate
    assert after <= before + 1e-15


def test_fill_distance_slack_brackets_truth():
    X = grid_centers(2, 4, 3.0)
    fd = fill_distance(X, resolution=50)
    truth = 0.5 * math.sqrt(2) * 1.0
    assert fd.estimate <= truth + 1e-12 <= fd.upper + 1e-12


def test_model_to_dict():
    model = solve_interpolant(validate_spec(-1, 2), centers([[0.0], [0.5], [1.0]]), [1.0, 2.0, 0.0])
    d = model.to_dict()
    assert d["kernel"] == {"beta": -1.0, "c": 2.0, "m": 0}
    assert set(d["diagnostics"]) == {"condition_estimate", "residual_norm", "moment_residual"}
