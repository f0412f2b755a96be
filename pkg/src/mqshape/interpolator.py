"""Kernel interpolation with polynomial augmentation.

The interpolant is

    s(x) = sum_i a_i h(x - x_i) + sum_j b_j p_j(x),

with ``p_j`` a basis of polynomials of total degree ``<= m - 1`` (empty for
``m = 0``). The coefficients solve the symmetric saddle-point system::

    [ A   P ] [a]   [f]
    [ P^T 0 ] [b] = [0]

with ``A[j, i] = h(x_j - x_i)`` and ``P[j, i] = p_i(x_j)``.

Machine mode solves with LAPACK's symmetric indefinite factorization
(Bunch-Kaufman pivoting). Extended mode solves with mpmath LU at the
policy's bit count, which is what makes very flat kernels (large ``c``) or
tiny fill distances tractable.
"""

from __future__ import annotations

import itertools
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from scipy.spatial import cKDTree

from .exceptions import DomainError, IllConditionedError, RankDeficiencyError
from .kernel import KernelSpec
from .numerics import PrecisionPolicy

__all__ = [
    "CenterSet",
    "PolynomialBasis",
    "InterpolationModel",
    "poly_basis",
    "assemble_system",
    "solve_interpolant",
    "evaluate",
    "FillDistance",
    "fill_distance",
    "condition_estimate",
    "grid_centers",
]

logger = logging.getLogger(__name__)

# machine-mode solves are refused beyond this 2-norm condition number
MACHINE_CONDITION_LIMIT = 1e16


@dataclass(frozen=True)
class CenterSet:
    """Distinct centers inside the axis-aligned cube ``corner + [0, b0]^n``."""

    points: np.ndarray
    corner: np.ndarray
    b0: float

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        corner = np.broadcast_to(np.asarray(self.corner, dtype=float), (pts.shape[1],)).copy()
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "corner", corner)
        if self.b0 <= 0:
            raise DomainError("cube side b0 must be positive")
        if len(pts) == 0:
            raise DomainError("empty center set")
        tol = 1e-12 * max(1.0, self.b0)
        if np.any(pts < corner - tol) or np.any(pts > corner + self.b0 + tol):
            raise DomainError("centers must lie inside the cube")
        if len(pts) > 1:
            d, _ = cKDTree(pts).query(pts, k=2)
            if np.any(d[:, 1] == 0.0):
                raise DomainError("duplicate centers")

    @property
    def n(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return len(self.points)


def grid_centers(n: int, points_per_axis: int, b0: float, corner=0.0) -> CenterSet:
    """Tensor grid of ``points_per_axis**n`` equispaced centers filling the cube."""
    if points_per_axis < 2:
        raise DomainError("need at least 2 points per axis")
    corner = np.broadcast_to(np.asarray(corner, dtype=float), (n,))
    axes = [np.linspace(corner[k], corner[k] + b0, points_per_axis) for k in range(n)]
    pts = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=-1)
    return CenterSet(pts, corner, b0)


@dataclass(frozen=True)
class PolynomialBasis:
    n: int
    degree_bound: int
    exponents: Tuple[Tuple[int, ...], ...]

    @property
    def Q(self) -> int:
        return len(self.exponents)

    def __call__(self, x) -> np.ndarray:
        """Monomial values, shape ``(k, Q)`` for points of shape ``(k, n)``."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.Q == 0:
            return np.zeros((len(x), 0))
        e = np.asarray(self.exponents)
        return np.prod(x[:, None, :] ** e[None, :, :], axis=-1)

    def eval_mp(self, ctx, point) -> list:
        out = []
        for alpha in self.exponents:
            v = ctx.mpf(1)
            for xk, ak in zip(point, alpha):
                if ak:
                    v *= xk ** ak
            out.append(v)
        return out


def poly_basis(n: int, m: int) -> PolynomialBasis:
    """Graded-lexicographic monomials of total degree ``<= m - 1``."""
    if m < 0:
        raise DomainError("m must be nonnegative")
    exps: List[Tuple[int, ...]] = []
    for deg in range(m):
        # lexicographically descending within a degree: x1 before x2
        level = [a for a in itertools.product(range(deg + 1), repeat=n) if sum(a) == deg]
        exps.extend(sorted(level, reverse=True))
    return PolynomialBasis(n, m - 1, tuple(exps))


@dataclass
class InterpolationModel:
    spec: KernelSpec
    centers: CenterSet
    kernel_coeffs: np.ndarray
    poly_coeffs: np.ndarray
    basis: PolynomialBasis
    policy: PrecisionPolicy = field(default_factory=PrecisionPolicy.machine)
    condition_estimate: float = math.nan
    residual_norm: float = math.nan
    moment_residual: float = math.nan
    # full-precision coefficients in extended mode
    mp_coeffs: Optional[list] = None

    @property
    def diagnostics(self) -> dict:
        return {
            "condition_estimate": self.condition_estimate,
            "residual_norm": self.residual_norm,
            "moment_residual": self.moment_residual,
        }

    def __call__(self, x):
        return evaluate(self, x)

    def to_dict(self) -> dict:
        return {
            "kernel": {"beta": self.spec.beta, "c": self.spec.c, "m": self.spec.m},
            "precision": {"mode": self.policy.mode, "bits": self.policy.bits},
            "centers": self.centers.points.tolist(),
            "cube": {"corner": self.centers.corner.tolist(), "b0": self.centers.b0},
            "kernel_coeffs": self.kernel_coeffs.tolist(),
            "poly_coeffs": self.poly_coeffs.tolist(),
            "basis_exponents": [list(a) for a in self.basis.exponents],
            "diagnostics": self.diagnostics,
        }


def _pairwise_sq(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = a[:, None, :] - b[None, :, :]
    return np.einsum("ijk,ijk->ij", d, d)


def assemble_system(spec: KernelSpec, centers: CenterSet, values,
                    policy: PrecisionPolicy | None = None):
    """Saddle-point matrix and right-hand side.

    Returns numpy arrays in machine mode, mpmath matrices in extended mode
    (built in a fresh context at ``policy.bits``).
    """
    policy = policy or PrecisionPolicy.machine()
    N = len(centers)
    if len(values) != N:
        raise DomainError(f"expected {N} values, got {len(values)}")
    basis = poly_basis(centers.n, spec.m)
    Q = basis.Q
    if not policy.is_extended:
        values = np.asarray(values, dtype=float).ravel()
        M = np.zeros((N + Q, N + Q))
        M[:N, :N] = spec.radial(_pairwise_sq(centers.points, centers.points))
        P = basis(centers.points)
        M[:N, N:] = P
        M[N:, :N] = P.T
        rhs = np.concatenate([values, np.zeros(Q)])
        return M, rhs
    ctx = policy.mp_context()
    return _assemble_mp(ctx, spec, centers, values, basis)


def _assemble_mp(ctx, spec, centers, values, basis):
    N, Q = len(centers), basis.Q
    pts = [[ctx.mpf(float(v)) for v in p] for p in centers.points]
    M = ctx.matrix(N + Q, N + Q)
    gam = ctx.gamma(-ctx.mpf(spec.beta) / 2)
    c2 = ctx.mpf(spec.c) ** 2
    half_beta = ctx.mpf(spec.beta) / 2
    for j in range(N):
        for i in range(j, N):
            r2 = sum(((a - b) ** 2 for a, b in zip(pts[j], pts[i])), ctx.mpf(0))
            M[j, i] = M[i, j] = gam * (c2 + r2) ** half_beta
        for k, v in enumerate(basis.eval_mp(ctx, pts[j])):
            M[j, N + k] = M[N + k, j] = v
    # mpf data values keep their full precision
    rhs = ctx.matrix([ctx.mpf(v) for v in values] + [ctx.mpf(0)] * Q)
    return M, rhs


def condition_estimate(matrix) -> float:
    """2-norm condition number (ratio of extreme singular values).

    Accepts numpy arrays or mpmath matrices. Singular input gives ``inf``.
    """
    if isinstance(matrix, np.ndarray):
        s = np.linalg.svd(matrix, compute_uv=False)
        if s[-1] == 0.0 or not np.all(np.isfinite(s)):
            return math.inf
        return float(s[0] / s[-1])
    ctx = matrix.ctx
    s = ctx.svd_r(matrix, compute_uv=False)
    smax = max(abs(v) for v in s)
    smin = min(abs(v) for v in s)
    if smin == 0:
        return math.inf
    return float(smax / smin)


def _check_unisolvent(centers: CenterSet, basis: PolynomialBasis) -> None:
    if basis.Q == 0:
        return
    P = basis(centers.points)
    if len(centers) < basis.Q or np.linalg.matrix_rank(P) < basis.Q:
        raise RankDeficiencyError(
            f"centers are not unisolvent for polynomials of degree <= {basis.degree_bound}"
        )


def solve_interpolant(spec: KernelSpec, centers: CenterSet, values,
                      policy: PrecisionPolicy | None = None,
                      condition_limit: float | None = None) -> InterpolationModel:
    """Solve the augmented system and return the interpolation model.

    Raises :class:`IllConditionedError` when the condition estimate
    exceeds ``condition_limit`` (default ``1e16`` in machine mode and
    ``2**(bits - 20)`` in extended mode) and :class:`RankDeficiencyError`
    for centers that are not unisolvent.
    """
    policy = policy or PrecisionPolicy.machine()
    basis = poly_basis(centers.n, spec.m)
    _check_unisolvent(centers, basis)
    N = len(centers)
    if len(values) != N:
        raise DomainError(f"expected {N} values, got {len(values)}")
    if not policy.is_extended:
        values = np.asarray(values, dtype=float).ravel()
        M, rhs = assemble_system(spec, centers, values, policy)
        cond = condition_estimate(M)
        limit = MACHINE_CONDITION_LIMIT if condition_limit is None else condition_limit
        if not cond < limit:
            raise IllConditionedError(cond)
        with warnings.catch_warnings():
            # conditioning is already checked and reported above
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            sol = scipy.linalg.solve(M, rhs, assume_a="sym")
        resid = M @ sol - rhs
        model = InterpolationModel(
            spec, centers, sol[:N].copy(), sol[N:].copy(), basis, policy,
            condition_estimate=cond,
            residual_norm=float(np.linalg.norm(resid[:N])),
            moment_residual=float(np.max(np.abs(resid[N:]), initial=0.0)),
        )
        return model

    ctx = policy.mp_context()
    M, rhs = _assemble_mp(ctx, spec, centers, values, basis)
    cond = condition_estimate(M)
    limit = 2.0 ** (policy.bits - 20) if condition_limit is None else condition_limit
    if not cond < limit:
        raise IllConditionedError(cond)
    sol = ctx.lu_solve(M, rhs)
    resid = M * sol - rhs
    coeffs = [sol[k] for k in range(N + basis.Q)]
    return InterpolationModel(
        spec, centers,
        np.array([float(v) for v in coeffs[:N]]),
        np.array([float(v) for v in coeffs[N:]]),
        basis, policy,
        condition_estimate=cond,
        residual_norm=float(ctx.sqrt(sum(resid[k] ** 2 for k in range(N)))),
        moment_residual=float(max((abs(resid[N + k]) for k in range(basis.Q)), default=0)),
        mp_coeffs=coeffs,
    )


def _as_points(x, n: int):
    """Normalize evaluation input to shape ``(k, n)``; flag single points."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        return x.reshape(1, 1), True
    if x.ndim == 1:
        if n == 1:
            return x.reshape(-1, 1), False
        return x.reshape(1, n), True
    return x, False


def evaluate(model: InterpolationModel, x):
    """Evaluate the interpolant.

    ``x`` is a scalar (n = 1), a single point of length ``n``, a 1-D array
    of abscissae (n = 1), or an array of points of shape ``(k, n)``.
    Extended-precision models are evaluated in mpmath and rounded once.
    """
    pts, single = _as_points(x, model.centers.n)
    if model.mp_coeffs is not None:
        out = np.array([float(v) for v in evaluate_mp(model, pts)])
    else:
        K = model.spec.radial(_pairwise_sq(pts, model.centers.points))
        out = K @ model.kernel_coeffs + model.basis(pts) @ model.poly_coeffs
    return float(out[0]) if single else out


def evaluate_mp(model: InterpolationModel, pts, ctx=None) -> list:
    """Evaluate an extended-precision model, returning ``mpf`` values."""
    if model.mp_coeffs is None:
        raise DomainError("model was not solved in extended precision")
    ctx = ctx or model.policy.mp_context()
    N = len(model.centers)
    spec = model.spec
    gam = ctx.gamma(-ctx.mpf(spec.beta) / 2)
    c2 = ctx.mpf(spec.c) ** 2
    half_beta = ctx.mpf(spec.beta) / 2
    a = [ctx.mpf(v) for v in model.mp_coeffs[:N]]
    b = [ctx.mpf(v) for v in model.mp_coeffs[N:]]
    cpts = [[ctx.mpf(float(v)) for v in p] for p in model.centers.points]
    out = []
    for p in np.atleast_2d(pts):
        xp = [ctx.mpf(float(v)) for v in p]
        acc = ctx.mpf(0)
        for ai, ci in zip(a, cpts):
            r2 = sum(((u - w) ** 2 for u, w in zip(xp, ci)), ctx.mpf(0))
            acc += ai * gam * (c2 + r2) ** half_beta
        for bj, pj in zip(b, model.basis.eval_mp(ctx, xp)):
            acc += bj * pj
        out.append(acc)
    return out


@dataclass(frozen=True)
class FillDistance:
    """Grid estimate of the fill distance with its worst-case slack.

    The true value lies in ``[estimate, estimate + slack]``.
    """

    estimate: float
    slack: float

    @property
    def upper(self) -> float:
        return self.estimate + self.slack


def fill_distance(centers, cube: Tuple[Sequence[float], float] | None = None,
                  resolution: int = 201) -> FillDistance:
    """``sup_{y in E} min_{x in X} |y - x|`` by a dense grid scan of the cube.

    ``centers`` is a :class:`CenterSet` (its cube is used unless ``cube``
    is given as ``(corner, b0)``) or an array of points with ``cube``.
    """
    if resolution < 2:
        raise DomainError("resolution must be >= 2")
    if isinstance(centers, CenterSet):
        pts = centers.points
        corner, b0 = (centers.corner, centers.b0) if cube is None else cube
    else:
        pts = np.atleast_2d(np.asarray(centers, dtype=float))
        if cube is None:
            raise DomainError("cube required for raw point arrays")
        corner, b0 = cube
    if pts.size == 0:
        raise DomainError("empty center set")
    n = pts.shape[1]
    corner = np.broadcast_to(np.asarray(corner, dtype=float), (n,))
    tree = cKDTree(pts)
    axis = np.linspace(0.0, b0, resolution)
    best = 0.0
    # scan the grid in slabs along the first axis to bound memory
    rest = [axis] * (n - 1)
    tail = (np.stack([g.ravel() for g in np.meshgrid(*rest, indexing="ij")], axis=-1)
            if n > 1 else np.zeros((1, 0)))
    for t in axis:
        slab = np.column_stack([np.full(len(tail), t), tail]) + corner
        d, _ = tree.query(slab)
        best = max(best, float(d.max()))
    slack = 0.5 * math.sqrt(n) * b0 / (resolution - 1)
    return FillDistance(best, slack)
