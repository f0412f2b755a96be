"""The generalized multiquadric kernel

    h(x) = Gamma(-beta/2) * (c**2 + |x|**2) ** (beta/2),

with ``beta`` real but not a nonnegative even integer and ``c > 0``. It is a
multiquadric for ``beta > 0`` and an inverse multiquadric for ``beta < 0``.
The Gamma prefactor fixes the sign so that ``h`` is conditionally positive
definite of order ``m = max(0, ceil(beta/2))`` without extra ``(-1)**k``
factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import cpd_order
from .exceptions import DomainError
from .numerics import PrecisionPolicy, gamma_fn

__all__ = ["KernelSpec", "validate_spec", "kernel_eval"]


@dataclass(frozen=True)
class KernelSpec:
    beta: float
    c: float
    m: int
    gamma_factor: float

    @property
    def increasing(self) -> bool:
        """True when ``h`` grows with ``|x|`` (``Gamma(-beta/2) * beta > 0``)."""
        return self.gamma_factor * self.beta > 0

    def radial(self, r2):
        """Evaluate ``h`` from squared distances (numpy broadcasting).

        Written as ``c**beta * (1 + r2/c**2)**(beta/2)`` through ``log1p``
        so the deviation from the constant ``c**beta`` keeps full relative
        accuracy when ``c`` dominates ``|x|``.
        """
        r2 = np.asarray(r2, dtype=float)
        c = self.c
        return self.gamma_factor * np.exp(
            self.beta * math.log(c) + 0.5 * self.beta * np.log1p(r2 / (c * c))
        )

    def radial_mp(self, ctx, r2):
        """Same as :meth:`radial` in an mpmath context ``ctx``."""
        c = ctx.mpf(self.c)
        return ctx.gamma(-ctx.mpf(self.beta) / 2) * (c * c + r2) ** (ctx.mpf(self.beta) / 2)


def validate_spec(beta: float, c: float) -> KernelSpec:
    """Build a :class:`KernelSpec`, rejecting excluded exponents and ``c <= 0``."""
    beta = float(beta)
    c = float(c)
    if beta >= 0 and beta.is_integer() and int(beta) % 2 == 0:
        raise DomainError("excluded exponent")
    if not c > 0 or not math.isfinite(c):
        raise DomainError("invalid shape parameter")
    return KernelSpec(beta=beta, c=c, m=cpd_order(beta), gamma_factor=gamma_fn(-beta / 2))


def kernel_eval(spec: KernelSpec, x, policy: PrecisionPolicy | None = None):
    """``h(x)`` at a point (or array of points, last axis = coordinates).

    In extended mode a single point is evaluated in an mpmath context and
    an ``mpf`` is returned.
    """
    policy = policy or PrecisionPolicy.machine()
    if policy.is_extended:
        ctx = policy.mp_context()
        pts = np.atleast_1d(np.asarray(x, dtype=object))
        r2 = sum((ctx.mpf(v) ** 2 for v in pts.ravel()), ctx.mpf(0))
        return spec.radial_mp(ctx, r2)
    x = np.asarray(x, dtype=float)
    r2 = np.sum(np.atleast_1d(x) ** 2, axis=-1)
    out = spec.radial(r2)
    return float(out) if np.ndim(out) == 0 else out
