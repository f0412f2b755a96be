"""Explicit error and native-norm bounds for generalized multiquadric interpolation.

All bounds are returned factor by factor so that every literal term of a
formula can be inspected. Each factor is a :class:`LogScalar`, so a bound
like ``exp(c * sigma / 2)`` with ``c = 1e6`` stays representable.

Bounds are always evaluated. When the fill-distance requirement
``delta <= delta0`` fails, the result carries ``preconditions_ok=False``
and a reason, so parameter sweeps can still plot the curve outside the
proven region.

Fourier convention: ``fhat(xi) = integral f(x) exp(-i <x, xi>) dx``; see
:mod:`mqshape.bandlimited`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Tuple

from .bandlimited import SpectralDensity
from .constants import (
    gamma_seq,
    lambda_power,
    log_unit_ball_volume,
    rho_delta0,
    smn,
    theorem_constants,
)
from .exceptions import CoverageError, DomainError
from .kernel import KernelSpec
from .numerics import LogScalar, bessel_k0, gamma_fn, integrate_adaptive, log_combine

__all__ = [
    "ProblemSetting",
    "BoundBreakdown",
    "covered",
    "native_error_bound",
    "norm_bound_pos_beta",
    "norm_bound_neg_beta",
    "native_norm_bound",
    "bandlimited_error_bound",
    "chained_ratio",
    "SpecialNormTerms",
    "special_norm_terms",
    "special_error_bound",
]

LN2 = math.log(2.0)
LNPI = math.log(math.pi)


@dataclass(frozen=True)
class ProblemSetting:
    """Dimension, cube side, band limit and fill distance."""

    n: int
    b0: float
    sigma: float
    delta: float

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("dimension must be >= 1")
        for name in ("b0", "sigma", "delta"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.delta > self.b0 * math.sqrt(self.n) * (1 + 1e-12):
            raise DomainError("fill distance cannot exceed the cube diameter")


@dataclass
class BoundBreakdown:
    factors: List[Tuple[str, LogScalar]]
    preconditions_ok: bool = True
    reasons: List[str] = field(default_factory=list)

    @property
    def total(self) -> LogScalar:
        acc = LogScalar.one()
        for _, f in self.factors:
            acc = acc * f
        return acc

    @property
    def value(self) -> float:
        return self.total.to_value()

    def factor(self, label: str) -> LogScalar:
        for name, f in self.factors:
            if name == label:
                return f
        raise KeyError(label)

    def to_dict(self) -> dict:
        return {
            "factors": [{"label": k, "ln": _ln_or_none(v), "value": v.format()}
                        for k, v in self.factors],
            "total": {"ln": _ln_or_none(self.total), "value": self.total.format()},
            "preconditions_ok": self.preconditions_ok,
            "reasons": list(self.reasons),
        }


def _ln_or_none(v: LogScalar):
    return None if v.sign == 0 else v.ln_mag


def _exp(x: float) -> LogScalar:
    return LogScalar.from_log(x)


def covered(n: int, beta: float) -> bool:
    """Whether the band-limited theory applies: ``n + beta >= 1`` or ``n + beta = -1``."""
    return n + beta >= 1 or abs(n + beta + 1) < 1e-12


def _delta_check(setting: ProblemSetting, spec: KernelSpec, bd: BoundBreakdown):
    consts = theorem_constants(setting.n, spec.beta, setting.b0, spec.c)
    if not consts.delta_ok(setting.delta):
        bd.preconditions_ok = False
        bd.reasons.append(
            f"delta={setting.delta:.6g} exceeds delta0={consts.delta0.format(6)}"
        )
    return consts


def native_error_bound(setting: ProblemSetting, spec: KernelSpec, f_h_norm) -> BoundBreakdown:
    """Pointwise error bound for ``f`` in the native space with norm ``||f||_h``.

    ``2^((n+beta+1)/4) pi^((n+1)/4) sqrt(n alpha_n) c^(beta/2) sqrt(Delta0)
    lambda^(1/delta) ||f||_h``.
    """
    n, beta, c = setting.n, spec.beta, spec.c
    _, d0const, _ = rho_delta0(n, beta)
    bd = BoundBreakdown([])
    consts = _delta_check(setting, spec, bd)
    bd.factors = [
        ("prefactor", _exp((n + beta + 1) / 4 * LN2 + (n + 1) / 4 * LNPI
                           + 0.5 * (math.log(n) + log_unit_ball_volume(n)))),
        ("c_power", LogScalar.from_value(c) ** (beta / 2)),
        ("delta0_sqrt", d0const ** 0.5),
        ("lambda_pow_inv_delta", lambda_power(consts, setting.delta)),
        ("norm_term", LogScalar.from_value(f_h_norm)),
    ]
    return bd


def _norm_core(setting: ProblemSetting, spec: KernelSpec, l2_norm) -> LogScalar:
    n, beta, c, s = setting.n, spec.beta, spec.c, setting.sigma
    return log_combine([
        (2.0, -n - (1 + beta) / 4),
        (math.pi, -n - 0.25),
        (s, (1 + beta + n) / 4),
        (_exp(c * s / 2), 1),
        (c, (1 - beta - n) / 4),
        (LogScalar.from_value(l2_norm), 1),
    ])


def norm_bound_pos_beta(setting: ProblemSetting, spec: KernelSpec, l2_norm) -> LogScalar:
    """Native-norm bound for ``f`` in ``B_sigma`` when ``beta > 0``."""
    if spec.beta <= 0:
        raise DomainError("wrong branch: norm_bound_pos_beta needs beta > 0")
    m = spec.m
    pre = LogScalar.from_value(math.factorial(m) * smn(m, setting.n)) ** 0.5
    return pre * _norm_core(setting, spec, l2_norm)


def norm_bound_neg_beta(setting: ProblemSetting, spec: KernelSpec, l2_norm) -> LogScalar:
    """Native-norm bound for ``f`` in ``B_sigma`` when ``beta < 0``.

    Valid for ``n + beta >= 1`` or ``n + beta = -1``; the gap (for example
    ``n = 1, beta = -1``) raises :class:`CoverageError`.
    """
    if spec.beta >= 0:
        raise DomainError("wrong branch: norm_bound_neg_beta needs beta < 0")
    if not covered(setting.n, spec.beta):
        raise CoverageError()
    return _norm_core(setting, spec, l2_norm)


def native_norm_bound(setting: ProblemSetting, spec: KernelSpec, l2_norm) -> LogScalar:
    """Dispatch to the positive or negative ``beta`` norm bound."""
    if spec.beta > 0:
        return norm_bound_pos_beta(setting, spec, l2_norm)
    return norm_bound_neg_beta(setting, spec, l2_norm)


def bandlimited_error_bound(setting: ProblemSetting, spec: KernelSpec, l2_norm) -> BoundBreakdown:
    """Pointwise error bound for ``f`` in ``B_sigma`` in terms of ``||f||_2``."""
    n, beta, c, s = setting.n, spec.beta, spec.c, setting.sigma
    if not covered(n, beta):
        raise CoverageError()
    m = spec.m
    _, d0const, _ = rho_delta0(n, beta)
    bd = BoundBreakdown([])
    consts = _delta_check(setting, spec, bd)
    bd.factors = [
        ("moment_factor", LogScalar.from_value(math.factorial(m) * smn(m, n)) ** 0.5),
        ("prefactor", _exp(-0.75 * n * (LN2 + LNPI)
                           + 0.5 * (math.log(n) + log_unit_ball_volume(n)))),
        ("sigma_power", LogScalar.from_value(s) ** ((1 + beta + n) / 4)),
        ("delta0_sqrt", d0const ** 0.5),
        ("c_power", LogScalar.from_value(c) ** ((1 + beta - n) / 4)),
        ("exp_c_sigma", _exp(c * s / 2)),
        ("lambda_pow_inv_delta", lambda_power(consts, setting.delta)),
        ("norm_term", LogScalar.from_value(l2_norm)),
    ]
    return bd


def chained_ratio(setting: ProblemSetting, spec: KernelSpec, l2_norm=1.0) -> float:
    """Ratio of (native bound fed with the band-limited norm bound) to the direct bound.

    The two routes agree, so this is 1 up to rounding.
    """
    via_native = native_error_bound(setting, spec, native_norm_bound(setting, spec, l2_norm))
    direct = bandlimited_error_bound(setting, spec, l2_norm)
    return math.exp(via_native.total.ln_mag - direct.total.ln_mag)


# --- the uncovered case n = 1, beta = -1 --------------------------------------

# 1 / a0 = 2 sqrt(3) Gamma(1/2) / sqrt(pi)
_B_CONST = 2 * math.sqrt(3) * gamma_fn(0.5) / math.sqrt(math.pi)


@dataclass(frozen=True)
class SpecialNormTerms:
    """The two spectral integrals of the ``n = 1, beta = -1`` bound, log domain."""

    A: LogScalar
    B: LogScalar

    @property
    def a(self) -> float:
        return self.A.to_value()

    @property
    def b(self) -> float:
        return self.B.to_value()


def special_norm_terms(c: float, sigma: float, spectrum: SpectralDensity,
                       rel_tol: float = 1e-10) -> SpecialNormTerms:
    """``A`` and ``B`` for the inverse multiquadric in one dimension.

    ``A = (1/K0(1)) integral_{|xi| <= 1/c} |fhat|^2``;
    ``B = (1/a0) integral_{1/c < |xi| <= sigma} |fhat|^2 sqrt(c|xi|) exp(c|xi|)``
    when ``1/c < sigma`` and 0 otherwise.

    ``B`` is integrated with ``exp(c * top)`` factored out and the variable
    ``u = c (top - |xi|)``, so the integrand is ``O(1)`` whatever ``c``.
    """
    if c <= 0 or sigma <= 0:
        raise DomainError("c and sigma must be positive")
    top = min(sigma, spectrum.support)
    inner = min(1.0 / c, top)

    def both_sides(xi):
        return spectrum(xi) + spectrum(-xi)

    if inner <= 0:
        a_int = 0.0
    elif spectrum.exact_indicator:
        a_int = 2.0 * inner
    else:
        a_int = integrate_adaptive(both_sides, 0.0, inner, rel_tol)
    A = LogScalar.from_value(a_int) / bessel_k0(1.0)

    if 1.0 / c >= top:
        return SpecialNormTerms(A, LogScalar.zero())
    u_max = c * top - 1.0
    # exp(-u) below 1e-30 of the peak is dropped; sqrt growth cannot undo that
    u_cut = min(u_max, 80.0)

    def integrand(u):
        xi = top - u / c
        return both_sides(xi) * math.sqrt(c * xi) * math.exp(-u)

    scaled = integrate_adaptive(integrand, 0.0, u_cut, rel_tol) / c
    if scaled <= 0:
        return SpecialNormTerms(A, LogScalar.zero())
    B = LogScalar.from_log(math.log(_B_CONST) + c * top + math.log(scaled))
    return SpecialNormTerms(A, B)


def special_error_bound(setting: ProblemSetting, c: float, A, B,
                        prefactor: str = "printed") -> BoundBreakdown:
    """Error bound for ``n = 1, beta = -1``:
    ``sqrt(2 pi) sqrt(Delta0) lambda^(1/delta) ((A + B)/c)^(1/2)``.

    ``prefactor="recombined"`` uses ``1/sqrt(2 pi)`` instead, the constant
    obtained by substituting the norm bound into the native-space bound
    directly. The printed constant is the larger, hence weaker, of the two.
    """
    if setting.n != 1:
        raise DomainError("special_error_bound is for n = 1")
    if prefactor not in ("printed", "recombined"):
        raise ValueError("prefactor must be 'printed' or 'recombined'")
    A = LogScalar.from_value(A)
    B = LogScalar.from_value(B)
    bd = BoundBreakdown([])
    consts = theorem_constants(1, -1.0, setting.b0, c)
    if not consts.delta_ok(setting.delta):
        bd.preconditions_ok = False
        bd.reasons.append(
            f"delta={setting.delta:.6g} exceeds delta0={consts.delta0.format(6)}"
        )
    _, d0const, _ = rho_delta0(1, -1.0)
    sign = 1 if prefactor == "printed" else -1
    bd.factors = [
        ("prefactor", _exp(sign * 0.5 * math.log(2 * math.pi))),
        ("delta0_sqrt", d0const ** 0.5),
        ("lambda_pow_inv_delta", lambda_power(consts, setting.delta)),
        ("spectral_term", ((A + B) / c) ** 0.5),
    ]
    return bd
