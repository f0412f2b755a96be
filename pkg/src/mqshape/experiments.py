"""Shape-parameter sweeps and one-sided bound verification runs.

Both drive the full pipeline: build centers and a band-limited target, solve
the interpolation problem, measure the error on an evaluation grid strictly
inside the cube and compare with the applicable error bound (the
band-limited bound, or the ``n = 1, beta = -1`` bound).
"""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .bandlimited import BandLimitedFn, l2_norm, make_sinc, random_mixture, spectral_density
from .bounds import (
    BoundBreakdown,
    ProblemSetting,
    bandlimited_error_bound,
    covered,
    special_error_bound,
    special_norm_terms,
)
from .constants import feasibility_floor, theorem_constants
from .exceptions import DomainError, IllConditionedError, NumericalError
from .interpolator import (
    MACHINE_CONDITION_LIMIT,
    CenterSet,
    evaluate,
    evaluate_mp,
    fill_distance,
    grid_centers,
    solve_interpolant,
)
from .kernel import validate_spec
from .numerics import LogScalar, PrecisionPolicy

__all__ = [
    "TargetSpec",
    "SweepConfig",
    "SweepRow",
    "CSV_HEADER",
    "c_grid",
    "eval_grid",
    "grid_fill_distance",
    "run_sweep",
    "write_sweep_csv",
    "VerifyReport",
    "verify_bound",
    "applicable_bound",
]

logger = logging.getLogger(__name__)

CSV_HEADER = ("c", "max_err", "rms_err", "cond_estimate", "bound",
              "delta", "delta0", "preconditions_ok")


@dataclass(frozen=True)
class TargetSpec:
    """Named band-limited target: ``sinc`` or a seeded ``mixture`` (n = 1)."""

    kind: str = "sinc"
    sigma: float = 1.0
    seed: int = 0
    k: int = 3

    def build(self, n: int) -> BandLimitedFn:
        if self.kind == "sinc":
            return make_sinc(n, self.sigma)
        if self.kind == "mixture":
            if n != 1:
                raise DomainError("mixture targets are one-dimensional")
            return random_mixture(self.sigma, self.k, self.seed)
        raise DomainError(f"unknown target {self.kind!r}")


@dataclass(frozen=True)
class SweepConfig:
    n: int
    beta: float
    b0: float
    c_min: float
    c_max: float
    count: int
    target: TargetSpec = field(default_factory=TargetSpec)
    points_per_axis: Optional[int] = 9
    centers: Optional[np.ndarray] = None  # explicit centers override the grid
    eval_points: int = 200
    precision: PrecisionPolicy = field(default_factory=PrecisionPolicy.machine)
    corner: Optional[float] = None  # default centers the cube at the origin

    def __post_init__(self):
        if self.count < 2:
            raise DomainError("c grid needs count >= 2")
        if not 0 < self.c_min <= self.c_max:
            raise DomainError("need 0 < c_min <= c_max")
        if self.eval_points < 1:
            raise DomainError("eval_points must be >= 1")

    @property
    def cube_corner(self) -> float:
        return -self.b0 / 2 if self.corner is None else self.corner

    def center_set(self) -> CenterSet:
        if self.centers is not None:
            pts = np.atleast_2d(np.asarray(self.centers, dtype=float))
            return CenterSet(pts, np.full(self.n, self.cube_corner), self.b0)
        return grid_centers(self.n, self.points_per_axis, self.b0, self.cube_corner)


@dataclass(frozen=True)
class SweepRow:
    c: float
    max_err: float
    rms_err: float
    cond_estimate: float
    bound: Optional[LogScalar]
    delta: float
    delta0: LogScalar
    preconditions_ok: bool
    ill_conditioned: bool = False

    def csv_fields(self) -> List[str]:
        bound = "nan" if self.bound is None else self.bound.format(17)
        return [_g17(self.c), _g17(self.max_err), _g17(self.rms_err),
                _g17(self.cond_estimate), bound, _g17(self.delta),
                self.delta0.format(17), "true" if self.preconditions_ok else "false"]


def _g17(x: float) -> str:
    return f"{x:.17g}"


def c_grid(c_min: float, c_max: float, count: int) -> np.ndarray:
    """``count`` log-spaced shape parameters."""
    return np.geomspace(c_min, c_max, count)


def eval_grid(n: int, corner: float, b0: float, per_axis: int) -> np.ndarray:
    """Cell-midpoint grid, strictly inside the cube, shape ``(per_axis**n, n)``."""
    axis = corner + b0 * (np.arange(per_axis) + 0.5) / per_axis
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=-1)


def grid_fill_distance(n: int, points_per_axis: int, b0: float) -> float:
    """Exact fill distance of an equispaced grid covering the cube: half a cell diagonal."""
    return 0.5 * math.sqrt(n) * b0 / (points_per_axis - 1)


def _delta_of(cfg: SweepConfig, centers: CenterSet) -> float:
    if cfg.centers is None:
        return grid_fill_distance(cfg.n, cfg.points_per_axis, cfg.b0)
    return fill_distance(centers).upper


def applicable_bound(n: int, beta: float, b0: float, delta: float, c: float,
                     fn: BandLimitedFn) -> Optional[BoundBreakdown]:
    """The band-limited bound for ``fn``, or ``None`` outside coverage."""
    setting = ProblemSetting(n, b0, fn.band_limit, delta)
    if n == 1 and beta == -1.0:
        terms = special_norm_terms(c, fn.sigma, spectral_density(fn))
        return special_error_bound(setting, c, terms.A, terms.B)
    if not covered(n, beta):
        return None
    return bandlimited_error_bound(setting, validate_spec(beta, c), l2_norm(fn))


def _sweep_row(cfg: SweepConfig, c: float, centers: CenterSet, values: np.ndarray,
               fn: BandLimitedFn, pts: np.ndarray, truth: np.ndarray,
               delta: float) -> SweepRow:
    spec = validate_spec(cfg.beta, c)
    consts = theorem_constants(cfg.n, cfg.beta, cfg.b0, c)
    bd = applicable_bound(cfg.n, cfg.beta, cfg.b0, delta, c, fn)
    ok = consts.delta_ok(delta)
    # keep ill-conditioned solves; the flag and cond column carry the warning
    model = solve_interpolant(spec, centers, values, cfg.precision, condition_limit=math.inf)
    limit = (MACHINE_CONDITION_LIMIT if not cfg.precision.is_extended
             else 2.0 ** (cfg.precision.bits - 20))
    ill = not model.condition_estimate < limit
    if ill:
        logger.warning("c=%.6g: ill-conditioned system (condition %.3e)", c,
                       model.condition_estimate)
    err = np.abs(evaluate(model, pts) - truth)
    return SweepRow(
        c=float(c),
        max_err=float(err.max()),
        rms_err=float(math.sqrt(np.mean(err ** 2))),
        cond_estimate=float(model.condition_estimate),
        bound=None if bd is None else bd.total,
        delta=delta,
        delta0=consts.delta0,
        preconditions_ok=ok,
        ill_conditioned=ill,
    )


def run_sweep(cfg: SweepConfig, workers: Optional[int] = None) -> List[SweepRow]:
    """One row per grid value of ``c``, in grid order.

    Rows are independent; with ``workers > 1`` they are computed in a
    thread pool and merged back in grid order.
    """
    fn = cfg.target.build(cfg.n)
    centers = cfg.center_set()
    values = np.asarray(fn(centers.points), dtype=float).reshape(-1)
    pts = eval_grid(cfg.n, cfg.cube_corner, cfg.b0, cfg.eval_points)
    truth = np.asarray(fn(pts), dtype=float).reshape(-1)
    delta = _delta_of(cfg, centers)
    cs = c_grid(cfg.c_min, cfg.c_max, cfg.count)

    def row(c):
        return _sweep_row(cfg, float(c), centers, values, fn, pts, truth, delta)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(row, cs))
    return [row(c) for c in cs]


def write_sweep_csv(rows: Sequence[SweepRow], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.csv_fields())


# --- bound verification ----------------------------------------------------------

@dataclass
class VerifyReport:
    verdict: str  # PASS, FAIL or PRECONDITION_VIOLATED
    n: int
    beta: float
    b0: float
    sigma: float
    c: float
    delta: float
    delta0: LogScalar
    bits: int
    eval_points: int
    empirical: Optional[float] = None
    bound: Optional[BoundBreakdown] = None
    reasons: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "n": self.n, "beta": self.beta, "b0": self.b0, "sigma": self.sigma,
            "c": self.c, "delta": self.delta, "delta0": self.delta0.format(17),
            "precision_bits": self.bits, "eval_points": self.eval_points,
            "empirical_max_err": self.empirical,
            "bound": None if self.bound is None else self.bound.to_dict(),
            "reasons": self.reasons,
        }


def verify_bound(n: int, beta: float, b0: float, sigma: float, points_per_axis: int,
                 c: Optional[float] = None, bits: Optional[int] = None,
                 eval_points: int = 1000, corner: Optional[float] = None) -> VerifyReport:
    """Check ``max |f - s| <= bound`` for the sinc target in extended precision.

    Centers are the equispaced grid with ``points_per_axis`` points per axis
    on the cube ``corner + [0, b0]^n`` (centered at the origin by default).
    ``c`` defaults to the smallest value for which the grid's fill distance
    satisfies ``delta <= delta0``; for ``n = 1, beta = -1`` it defaults to
    ``1/sigma``. For ``n >= 2`` the dense grid has ``eval_points`` points
    per axis.
    """
    policy = PrecisionPolicy.extended(bits)
    fn = make_sinc(n, sigma)
    corner = -b0 / 2 if corner is None else corner
    centers = grid_centers(n, points_per_axis, b0, corner)
    delta = grid_fill_distance(n, points_per_axis, b0)
    if c is None:
        if n == 1 and beta == -1.0:
            c = 1.0 / sigma
        else:
            # nudge above the floor so rounding cannot push delta past delta0
            c = feasibility_floor(n, beta, delta).to_value() * (1 + 1e-9)
    consts = theorem_constants(n, beta, b0, c)
    report = VerifyReport("PRECONDITION_VIOLATED", n, beta, b0, sigma, float(c),
                          delta, consts.delta0, policy.bits, eval_points)
    if not consts.delta_ok(delta):
        report.reasons.append(
            f"precondition violated: delta={delta:.6g} > delta0={consts.delta0.format(6)}"
        )
        return report
    bd = applicable_bound(n, beta, b0, delta, c, fn)
    if bd is None:
        raise DomainError("outside theory coverage")
    report.bound = bd

    model = solve_interpolant(validate_spec(beta, c), centers, fn(centers.points), policy)
    ctx = policy.mp_context()
    pts = eval_grid(n, corner, b0, eval_points) if n > 1 else \
        np.linspace(corner, corner + b0, eval_points).reshape(-1, 1)
    approx = evaluate_mp(model, pts, ctx)
    worst = ctx.mpf(0)
    for p, s in zip(pts, approx):
        worst = max(worst, abs(fn.eval_mp(ctx, p) - s))
    report.empirical = float(worst)
    bound_ln = bd.total.ln_mag
    ok = bd.total.sign > 0 and (worst == 0 or float(ctx.log(worst)) <= bound_ln)
    report.verdict = "PASS" if ok else "FAIL"
    return report
