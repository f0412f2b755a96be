import io
import math

import numpy as np
import pytest

from mqshape.exceptions import DomainError
from mqshape.experiments import (
    CSV_HEADER,
    SweepConfig,
    TargetSpec,
    applicable_bound,
    c_grid,
    eval_grid,
    grid_fill_distance,
    run_sweep,
    verify_bound,
    write_sweep_csv,
)
from mqshape.interpolator import fill_distance, grid_centers


def _csv(rows):
    buf = io.StringIO()
    write_sweep_csv(rows, buf)
    return buf.getvalue()


def test_c_grid_and_eval_grid():
    g = c_grid(0.1, 10, 11)
    assert g[0] == pytest.approx(0.1) and g[-1] == pytest.approx(10)
    assert np.allclose(np.diff(np.log(g)), math.log(10) / 5)
    pts = eval_grid(2, -0.5, 1.0, 4)
    assert pts.shape == (16, 2)
    assert np.all(pts > -0.5) and np.all(pts < 0.5)


@pytest.mark.parametrize("n,k", [(1, 9), (2, 5)])
def test_grid_fill_distance_matches_estimator(n, k):
    exact = grid_fill_distance(n, k, 1.0)
    est = fill_distance(grid_centers(n, k, 1.0, 0.0))
    assert est.estimate <= exact * (1 + 1e-9)
    assert exact <= est.upper * (1 + 1e-9)


def test_sweep_example_rows_and_determinism():
    cfg = SweepConfig(n=1, beta=1.0, b0=1.0, c_min=0.1, c_max=10.0, count=11)
    rows = run_sweep(cfg)
    assert len(rows) == 11
    assert all(math.isfinite(r.max_err) for r in rows)
    text = _csv(rows)
    assert text.splitlines()[0] == ",".join(CSV_HEADER)
    assert _csv(run_sweep(cfg)) == text
    assert _csv(run_sweep(cfg, workers=4)) == text


def test_sweep_rows_carry_bound_and_flags():
    rows = run_sweep(SweepConfig(n=1, beta=1.0, b0=1.0, c_min=1.0, c_max=2.0, count=2))
    for r in rows:
        assert r.bound is not None and r.bound.sign > 0
        # 9 centers on [-1/2, 1/2]: delta = 1/16 is far above delta0
        assert r.delta == pytest.approx(1 / 16)
        assert not r.preconditions_ok
        assert r.csv_fields()[-1] == "false"


def test_sweep_mixture_target_and_validation():
    cfg = SweepConfig(n=1, beta=-1.0, b0=2.0, c_min=0.5, c_max=1.0, count=2,
                      target=TargetSpec("mixture", 1.0, 3, 2))
    rows = run_sweep(cfg)
    assert all(r.bound is not None for r in rows)
    with pytest.raises(DomainError):
        SweepConfig(n=1, beta=1.0, b0=1.0, c_min=2.0, c_max=1.0, count=3)
    with pytest.raises(DomainError):
        TargetSpec("mixture").build(2)


def test_sweep_flags_ill_conditioning(caplog):
    cfg = SweepConfig(n=1, beta=1.0, b0=1.0, c_min=1e3, c_max=1e4, count=2,
                      points_per_axis=20)
    with caplog.at_level("WARNING"):
        rows = run_sweep(cfg)
    assert any(r.ill_conditioned for r in rows)
    assert "ill-conditioned" in caplog.text


def test_applicable_bound_coverage():
    fn = TargetSpec().build(1)
    assert applicable_bound(1, -1.5, 1.0, 0.01, 1.0, fn) is None
    assert applicable_bound(1, -1.0, 1.0, 0.01, 1.0, fn) is not None


def test_verify_bound_precondition_violated():
    rep = verify_bound(1, 1.0, 8.0, 1.0, 9, c=1.0)
    assert rep.verdict == "PRECONDITION_VIOLATED"
    assert rep.reasons and "delta0" in rep.reasons[0]
    assert rep.to_dict()["empirical_max_err"] is None


def test_verify_bound_imq_passes():
    rep = verify_bound(1, -1.0, 0.01, 1.0, 9, eval_points=200)
    assert rep.verdict == "PASS", rep.reasons
    assert rep.empirical <= rep.bound.value
