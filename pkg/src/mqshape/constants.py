"""Constants of the exponential-type error bound for generalized multiquadrics.

Every quantity here is a closed form in ``n`` (dimension), ``beta``
(kernel exponent), ``b0`` (cube side) and ``c`` (shape parameter):

* ``gamma_n``: ``gamma_1 = 2``, ``gamma_n = 2 n (1 + gamma_{n-1})``
* ``m = max(0, ceil(beta / 2))``
* ``rho`` and ``Delta0`` from a three-way case split on ``beta`` against
  ``n - 3`` and ``n - 1``
* ``C = max(2 (rho / c) sqrt(n) exp(2 n gamma_n), 2 / (3 b0))``
* ``lambda = (2/3) ** (1 / (6 C gamma_n))``, ``delta0 = 1 / (6 C gamma_n (m + 1))``

Products are accumulated as :class:`~mqshape.numerics.LogScalar`.

Empty products evaluate to 1. In the ``beta >= n - 1`` branch the
auxiliary ``s = -ceil((n - beta - 3) / 2)`` is always at least 1, so the
empty-product convention for ``s = 0`` there is never exercised by a valid
``(n, beta)``; :func:`descending_product` still implements it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

from .exceptions import DomainError
from .numerics import LogScalar

__all__ = [
    "gamma_seq",
    "cpd_order",
    "descending_product",
    "rho_delta0",
    "SmoothnessConstants",
    "smoothness_constants",
    "unit_ball_volume",
    "log_unit_ball_volume",
    "smn",
    "TheoremConstants",
    "theorem_constants",
    "log_scale_constant",
    "crossover_c",
    "feasibility_floor",
    "lambda_power",
]

LN_THREE_HALVES = math.log(1.5)


@lru_cache(maxsize=None)
def gamma_seq(n: int) -> int:
    """``gamma_n`` as an exact integer."""
    if n < 1:
        raise DomainError("gamma_seq requires n >= 1")
    g = 2
    for k in range(2, n + 1):
        g = 2 * k * (1 + g)
    return g


def _is_excluded_beta(beta: float) -> bool:
    return beta >= 0 and float(beta).is_integer() and int(beta) % 2 == 0


def cpd_order(beta: float) -> int:
    """Order ``m = max(0, ceil(beta/2))`` of conditional positive definiteness."""
    if _is_excluded_beta(beta):
        raise DomainError(f"excluded exponent beta={beta:g}")
    return max(0, math.ceil(beta / 2))


def descending_product(top: int, bottom: int) -> LogScalar:
    """``top * (top - 1) * ... * bottom``; 1 when ``bottom > top``."""
    acc = LogScalar.one()
    for k in range(top, bottom - 1, -1):
        acc = acc * k
    return acc


def rho_delta0(n: int, beta: float) -> Tuple[float, LogScalar, Optional[int]]:
    """``(rho, Delta0, s)`` for dimension ``n`` and exponent ``beta``.

    ``s`` is ``None`` in the middle case ``n - 3 <= beta < n - 1``.
    """
    if n < 1:
        raise DomainError("dimension must be >= 1")
    m = cpd_order(beta)
    if beta < n - 3:
        s = math.ceil(((n - 3) - beta) / 2)
        if beta < 0:
            rho = (3 + s) / 3
            delta0 = descending_product(2 + s, 3) / LogScalar.from_value(rho) ** 2
        else:
            rho = 1 + s / (2 * m + 3)
            delta0 = (descending_product(2 * m + 2 + s, 2 * m + 3)
                      / LogScalar.from_value(rho) ** (2 * m + 2))
        return rho, delta0, s
    if beta < n - 1:
        return 1.0, LogScalar.one(), None
    s = -math.ceil(((n - 3) - beta) / 2)
    return 1.0, 1 / descending_product(2 * m + 2, 2 * m - s + 3), s


@dataclass(frozen=True)
class SmoothnessConstants:
    n: int
    beta: float
    m: int
    rho: float
    delta0_const: LogScalar
    s: Optional[int]

    @property
    def delta0_value(self) -> float:
        return self.delta0_const.to_value()


def smoothness_constants(n: int, beta: float) -> SmoothnessConstants:
    rho, d0, s = rho_delta0(n, beta)
    return SmoothnessConstants(n, float(beta), cpd_order(beta), rho, d0, s)


def log_unit_ball_volume(n: int) -> float:
    return 0.5 * n * math.log(math.pi) - math.lgamma(n / 2 + 1)


def unit_ball_volume(n: int) -> float:
    """Volume ``pi^(n/2) / Gamma(n/2 + 1)`` of the unit ball in R^n."""
    if n < 1:
        raise DomainError("dimension must be >= 1")
    return math.exp(log_unit_ball_volume(n))


def smn(m: int, n: int) -> int:
    """Number of multi-indices ``alpha`` in ``n`` variables with ``|alpha| = m``."""
    if m < 0 or n < 1:
        raise DomainError("smn requires m >= 0 and n >= 1")
    return math.comb(m + n - 1, n - 1)


def log_scale_constant(n: int, rho: float) -> float:
    """``ln(rho * sqrt(n) * exp(2 n gamma_n))``."""
    return math.log(rho) + 0.5 * math.log(n) + 2 * n * gamma_seq(n)


def crossover_c(n: int, beta: float, b0: float) -> LogScalar:
    """``c0 = 3 b0 rho sqrt(n) exp(2 n gamma_n)``, where the two branches of C meet."""
    rho, _, _ = rho_delta0(n, beta)
    return LogScalar.from_log(math.log(3 * b0) + log_scale_constant(n, rho))


def feasibility_floor(n: int, beta: float, delta: float) -> LogScalar:
    """Smallest ``c`` keeping ``delta <= delta0`` on the c-dependent branch of C.

    ``12 rho sqrt(n) exp(2 n gamma_n) gamma_n (m + 1) delta``.
    """
    rho, _, _ = rho_delta0(n, beta)
    m = cpd_order(beta)
    return LogScalar.from_log(
        math.log(12) + log_scale_constant(n, rho) + math.log(gamma_seq(n))
        + math.log(m + 1) + math.log(delta)
    )


@dataclass(frozen=True)
class TheoremConstants:
    """``C``, ``lambda`` and ``delta0`` for one choice of ``(n, beta, b0, c)``.

    ``lambda`` is kept through ``ln_lambda`` because for large ``C`` it is
    too close to 1 to survive as a float.
    """

    n: int
    beta: float
    b0: float
    c: LogScalar
    m: int
    rho: float
    gamma_n: int
    C: LogScalar
    ln_lambda: float
    delta0: LogScalar
    rho_prime: LogScalar
    regime: str  # "c_small" or "c_large"

    @property
    def lam(self) -> float:
        return math.exp(self.ln_lambda)

    def lambda_power(self, delta: float) -> LogScalar:
        """``lambda ** (1 / delta)``."""
        return lambda_power(self, delta)

    def delta_ok(self, delta: float) -> bool:
        """Whether ``0 < delta <= delta0``."""
        return 0 < delta and math.log(delta) <= self.delta0.ln_mag


def theorem_constants(n: int, beta: float, b0: float, c) -> TheoremConstants:
    """Constants for shape parameter ``c`` (a float or a :class:`LogScalar`)."""
    if b0 <= 0:
        raise DomainError("cube side b0 must be positive")
    c_log = LogScalar.from_value(c)
    if c_log.sign <= 0:
        raise DomainError("invalid shape parameter")
    rho, _, _ = rho_delta0(n, beta)
    m = cpd_order(beta)
    g = gamma_seq(n)
    rho_prime = LogScalar.from_value(rho) / c_log
    ln_c_small = math.log(2) + math.log(rho) - c_log.ln_mag + 0.5 * math.log(n) + 2 * n * g
    ln_c_large = math.log(2 / (3 * b0))
    # c < c0 exactly when the c-dependent branch is strictly larger
    if ln_c_small > ln_c_large:
        regime, ln_C = "c_small", ln_c_small
    else:
        regime, ln_C = "c_large", ln_c_large
    ln_6Cg = math.log(6) + ln_C + math.log(g)
    ln_lambda = -math.exp(math.log(LN_THREE_HALVES) - ln_6Cg)
    delta0 = LogScalar.from_log(-(ln_6Cg + math.log(m + 1)))
    return TheoremConstants(
        n=n, beta=float(beta), b0=float(b0), c=c_log, m=m, rho=rho,
        gamma_n=g, C=LogScalar.from_log(ln_C), ln_lambda=ln_lambda,
        delta0=delta0, rho_prime=rho_prime, regime=regime,
    )


def lambda_power(consts: TheoremConstants, delta) -> LogScalar:
    """``lambda ** (1/delta) = (2/3) ** (1 / (6 C gamma_n delta))`` in log domain.

    ``delta`` may be a float or a :class:`LogScalar` (so that ``delta0``
    itself can be passed without underflow).
    """
    delta = LogScalar.from_value(delta)
    if delta.sign <= 0:
        raise DomainError("fill distance must be positive")
    ln_6Cg = math.log(6) + consts.C.ln_mag + math.log(consts.gamma_n)
    return LogScalar.from_log(-math.exp(math.log(LN_THREE_HALVES) - ln_6Cg - delta.ln_mag))
