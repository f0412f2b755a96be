"""Scalar substrate: log-domain reals, precision policy, special functions
and adaptive quadrature.

Constants such as ``exp(2 * n * gamma_n)`` overflow binary64 for every
``n >= 2`` (``gamma_3 = 78`` already gives ``exp(468)`` and ``gamma_4``
gives ``exp(5056)``), so every constant and bound in the package is carried
as a :class:`LogScalar` and only converted to a float at the very end, by a
saturating conversion.
"""

from __future__ import annotations

import math
import os
import sys
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Tuple, Union

import numpy as np
from mpmath.ctx_mp import MPContext
from scipy import integrate, special

from .exceptions import DomainError, QuadratureError

__all__ = [
    "LogScalar",
    "PrecisionPolicy",
    "log_combine",
    "gamma_fn",
    "bessel_k0",
    "integrate_adaptive",
    "DEFAULT_EXTENDED_BITS",
]

# Largest ln|x| that still converts to a finite binary64.
_LN_FLOAT_MAX = math.log(sys.float_info.max)

DEFAULT_EXTENDED_BITS = 256

Real = Union[float, int]


@dataclass(frozen=True)
class LogScalar:
    """A real number stored as ``sign * exp(ln_mag)``.

    ``sign`` is one of -1, 0, +1; ``ln_mag`` is ignored when ``sign == 0``.
    Products, quotients and real powers never leave the log domain. Sums are
    supported through a log-sum-exp with sign tracking.
    """

    sign: int
    ln_mag: float = 0.0

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign!r}")
        if self.sign == 0 and self.ln_mag != 0.0:
            object.__setattr__(self, "ln_mag", 0.0)
        if math.isnan(self.ln_mag):
            raise ValueError("ln_mag is NaN")

    # construction ---------------------------------------------------------

    @classmethod
    def from_value(cls, value: Real) -> "LogScalar":
        if isinstance(value, LogScalar):
            return value
        if isinstance(value, int) and not isinstance(value, bool):
            # exact for integers beyond the float range (e.g. gamma_n)
            if value == 0:
                return cls(0)
            return cls(1 if value > 0 else -1, _int_log(abs(value)))
        value = float(value)
        if math.isnan(value):
            raise DomainError("cannot represent NaN as LogScalar")
        if value == 0.0:
            return cls(0)
        if math.isinf(value):
            return cls(1 if value > 0 else -1, math.inf)
        return cls(1 if value > 0 else -1, math.log(abs(value)))

    @classmethod
    def from_log(cls, ln_mag: float, sign: int = 1) -> "LogScalar":
        return cls(sign, float(ln_mag))

    @classmethod
    def zero(cls) -> "LogScalar":
        return cls(0)

    @classmethod
    def one(cls) -> "LogScalar":
        return cls(1, 0.0)

    # conversion -----------------------------------------------------------

    @property
    def overflows(self) -> bool:
        """True when :meth:`to_value` saturates to an infinity."""
        return self.sign != 0 and self.ln_mag > _LN_FLOAT_MAX

    def to_value(self) -> float:
        """Saturating conversion to float (signed infinity on overflow)."""
        if self.sign == 0:
            return 0.0
        if self.ln_mag > _LN_FLOAT_MAX:
            return self.sign * math.inf
        return self.sign * math.exp(self.ln_mag)

    def __float__(self) -> float:
        return self.to_value()

    def ln(self) -> float:
        """Natural log of a positive value."""
        if self.sign <= 0:
            raise DomainError("log of a nonpositive LogScalar")
        return self.ln_mag

    # arithmetic -----------------------------------------------------------

    def __mul__(self, other) -> "LogScalar":
        other = _coerce(other)
        if self.sign == 0 or other.sign == 0:
            return LogScalar(0)
        return LogScalar(self.sign * other.sign, self.ln_mag + other.ln_mag)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "LogScalar":
        other = _coerce(other)
        if other.sign == 0:
            raise ZeroDivisionError("LogScalar division by zero")
        if self.sign == 0:
            return LogScalar(0)
        return LogScalar(self.sign * other.sign, self.ln_mag - other.ln_mag)

    def __rtruediv__(self, other) -> "LogScalar":
        return _coerce(other) / self

    def __pow__(self, exponent: Real) -> "LogScalar":
        return log_combine([(self, exponent)])

    def __neg__(self) -> "LogScalar":
        return LogScalar(-self.sign, self.ln_mag)

    def __abs__(self) -> "LogScalar":
        return LogScalar(abs(self.sign), self.ln_mag)

    def __add__(self, other) -> "LogScalar":
        other = _coerce(other)
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        hi, lo = (self, other) if self.ln_mag >= other.ln_mag else (other, self)
        if math.isinf(hi.ln_mag):
            return hi
        d = lo.ln_mag - hi.ln_mag
        if hi.sign == lo.sign:
            return LogScalar(hi.sign, hi.ln_mag + math.log1p(math.exp(d)))
        if d == 0.0:
            return LogScalar(0)
        return LogScalar(hi.sign, hi.ln_mag + math.log1p(-math.exp(d)))

    __radd__ = __add__

    def __sub__(self, other) -> "LogScalar":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "LogScalar":
        return _coerce(other) + (-self)

    # ordering -------------------------------------------------------------

    def _key(self) -> Tuple[int, float]:
        if self.sign == 0:
            return (0, 0.0)
        return (self.sign, self.sign * self.ln_mag)

    def __lt__(self, other) -> bool:
        return self._key() < _coerce(other)._key()

    def __le__(self, other) -> bool:
        return self._key() <= _coerce(other)._key()

    def __gt__(self, other) -> bool:
        return self._key() > _coerce(other)._key()

    def __ge__(self, other) -> bool:
        return self._key() >= _coerce(other)._key()

    def __eq__(self, other) -> bool:
        try:
            return self._key() == _coerce(other)._key()
        except (TypeError, DomainError):
            return NotImplemented

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        if self.sign == 0:
            return "LogScalar(0)"
        return f"LogScalar(sign={self.sign:+d}, ln_mag={self.ln_mag!r})"

    def format(self, digits: int = 17) -> str:
        """Decimal text, or ``inf(ln=...)`` when the value overflows."""
        if self.overflows:
            prefix = "-" if self.sign < 0 else ""
            return f"{prefix}inf(ln={self.ln_mag:.{digits}g})"
        return f"{self.to_value():.{digits}g}"


def _int_log(k: int) -> float:
    if k < 2 ** 1000:
        return math.log(k)
    shift = k.bit_length() - 64
    return math.log(k >> shift) + shift * math.log(2.0)


def _coerce(x) -> LogScalar:
    if isinstance(x, LogScalar):
        return x
    if isinstance(x, (int, float, np.floating, np.integer)):
        return LogScalar.from_value(x.item() if hasattr(x, "item") else x)
    raise TypeError(f"cannot combine LogScalar with {type(x).__name__}")


def log_combine(terms: Iterable[Tuple[Union[LogScalar, Real], Real]]) -> LogScalar:
    """Signed product ``prod(base_i ** exponent_i)`` computed in log domain.

    A zero base with a positive exponent makes the product zero; with a
    negative exponent it is a domain error. Negative bases need integer
    exponents.
    """
    sign = 1
    ln_mag = 0.0
    zero = False
    for base, exponent in terms:
        base = _coerce(base)
        exponent = float(exponent)
        if exponent == 0.0:
            continue
        if base.sign == 0:
            if exponent < 0:
                raise DomainError("zero base with negative exponent")
            zero = True
            continue
        if base.sign < 0:
            if not exponent.is_integer():
                raise DomainError("negative base with non-integer exponent")
            if int(exponent) % 2:
                sign = -sign
        ln_mag += exponent * base.ln_mag
    if zero:
        return LogScalar(0)
    return LogScalar(sign, ln_mag)


@dataclass(frozen=True)
class PrecisionPolicy:
    """Arithmetic used for kernel evaluation, assembly and solves.

    ``mode="machine"`` uses binary64 numpy/LAPACK. ``mode="extended"``
    uses an mpmath context with at least ``bits`` significant bits.
    """

    mode: str = "machine"
    bits: int = 53

    def __post_init__(self):
        if self.mode not in ("machine", "extended"):
            raise ValueError(f"unknown precision mode {self.mode!r}")
        if self.mode == "extended" and self.bits < 128:
            raise ValueError("extended precision needs at least 128 bits")

    @classmethod
    def machine(cls) -> "PrecisionPolicy":
        return cls("machine", 53)

    @classmethod
    def extended(cls, bits: int | None = None) -> "PrecisionPolicy":
        if bits is None:
            bits = int(os.environ.get("MQSHAPE_PRECISION_BITS", DEFAULT_EXTENDED_BITS))
        return cls("extended", bits)

    @property
    def is_extended(self) -> bool:
        return self.mode == "extended"

    def mp_context(self) -> MPContext:
        """A fresh mpmath context at this precision.

        A private context per call keeps concurrent solves from fighting
        over mpmath's global precision.
        """
        ctx = MPContext()
        ctx.prec = self.bits
        return ctx


def gamma_fn(x: Real) -> float:
    """Gamma function for real ``x``; poles raise :class:`DomainError`."""
    x = float(x)
    if x <= 0 and x.is_integer():
        raise DomainError(f"gamma pole at {x:g}")
    try:
        return math.gamma(x)
    except OverflowError:
        raise DomainError(f"gamma overflows at {x:g}") from None


def bessel_k0(x: Real) -> float:
    """Modified Bessel function of the second kind of order zero."""
    x = float(x)
    if not x > 0:
        raise DomainError("bessel_k0 requires x > 0")
    return float(special.k0(x))


# QUADPACK refuses relative tolerances at or below 50 machine epsilons
_MIN_REL_TOL = 50 * sys.float_info.epsilon


def integrate_adaptive(
    f: Callable[[float], float],
    a: float,
    b: float,
    rel_tol: float = 1e-10,
    points: Sequence[float] | None = None,
    max_subdivisions: int = 500,
) -> float:
    """Adaptive Gauss-Kronrod quadrature of ``f`` over ``[a, b]``.

    Raises :class:`QuadratureError` carrying the best estimate when the
    requested relative tolerance is not reached.
    """
    if not a < b:
        raise DomainError("integrate_adaptive requires a < b")
    if not rel_tol > _MIN_REL_TOL:
        raise DomainError(f"rel_tol must exceed {_MIN_REL_TOL:.3g} in double precision")
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, err = integrate.quad(
                f, a, b, epsabs=0.0, epsrel=rel_tol, limit=max_subdivisions,
                points=points,
            )
        except integrate.IntegrationWarning as w:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                value, err = integrate.quad(
                    f, a, b, epsabs=0.0, epsrel=rel_tol,
                    limit=max_subdivisions, points=points,
                )
            raise QuadratureError(str(w).splitlines()[0], value, err) from None
    if not math.isfinite(value):
        raise QuadratureError("non-finite integral", value, err)
    if err > max(rel_tol * abs(value), 1e-300):
        raise QuadratureError("tolerance not reached", value, err)
    return value
