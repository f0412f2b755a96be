"""Band-limited test functions with closed-form spectra and L2 norms.

Fourier convention (shared with :mod:`mqshape.bounds`)::

    fhat(xi) = integral f(x) exp(-i <x, xi>) dx,
    ||f||_2^2 = (2 pi)^(-n) integral |fhat(xi)|^2 dxi.

Under this convention ``sin(sigma x) / (pi x)`` has ``fhat = 1`` on
``[-sigma, sigma]`` and 0 outside.

The tensor sinc has box-shaped support ``[-sigma, sigma]^n``, whose corners
sit at radius ``sigma * sqrt(n)``. Its Euclidean band limit, the quantity
the bounds need, is therefore :attr:`BandLimitedFn.band_limit`, which
equals ``sigma`` only in one dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from .exceptions import DomainError

__all__ = [
    "BandLimitedFn",
    "SpectralDensity",
    "make_sinc",
    "make_shifted_mixture",
    "random_mixture",
    "l2_norm",
    "spectral_density",
]

# below this |u| sin(u)/u switches to its Taylor polynomial
_TAYLOR_SWITCH = 1e-4


def _sinc_unnormalized(u):
    """``sin(u)/u`` with a 3-term Taylor expansion near 0."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < _TAYLOR_SWITCH
    safe = np.where(small, 1.0, u)
    u2 = u * u
    return np.where(small, 1.0 - u2 / 6.0 + u2 * u2 / 120.0, np.sin(safe) / safe)


@dataclass(frozen=True)
class SpectralDensity:
    """``|fhat(xi)|^2`` for a one-dimensional band-limited function."""

    evaluator: Callable[[np.ndarray], np.ndarray]
    support: float
    exact_indicator: bool = False

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        out = np.where(np.abs(xi) <= self.support, self.evaluator(xi), 0.0)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class BandLimitedFn:
    n: int
    sigma: float
    kind: str
    shifts: Tuple[float, ...] = ()
    amplitudes: Tuple[float, ...] = ()

    @property
    def band_limit(self) -> float:
        """Radius of the smallest ball containing the spectral support."""
        return self.sigma * math.sqrt(self.n) if self.kind == "sinc_tensor" else self.sigma

    def __call__(self, x):
        """Evaluate at points of shape ``(k, n)``, a single point, or 1-D abscissae (n = 1)."""
        x = np.asarray(x, dtype=float)
        if self.n == 1:
            flat = x.reshape(-1)
            out = self._eval_1d(flat)
            return float(out[0]) if x.ndim == 0 else out.reshape(x.shape[:-1] if x.ndim > 1 else x.shape)
        pts = np.atleast_2d(x)
        out = np.prod(self.sigma / math.pi * _sinc_unnormalized(self.sigma * pts), axis=-1)
        return float(out[0]) if x.ndim == 1 else out

    def _eval_1d(self, x: np.ndarray) -> np.ndarray:
        s = self.sigma
        if self.kind == "sinc_tensor":
            return s / math.pi * _sinc_unnormalized(s * x)
        out = np.zeros_like(x)
        for t, a in zip(self.shifts, self.amplitudes):
            out += a * s / math.pi * _sinc_unnormalized(s * (x - t))
        return out

    def eval_mp(self, ctx, point):
        """Evaluate at one point in an mpmath context."""
        s = ctx.mpf(self.sigma)
        coords = [ctx.mpf(float(v)) for v in np.atleast_1d(point)]

        def sinc(u):
            return ctx.mpf(1) if u == 0 else ctx.sin(u) / u

        if self.kind == "sinc_tensor":
            acc = ctx.mpf(1)
            for xk in coords:
                acc *= s / ctx.pi * sinc(s * xk)
            return acc
        x = coords[0]
        return sum((ctx.mpf(a) * s / ctx.pi * sinc(s * (x - ctx.mpf(t)))
                    for t, a in zip(self.shifts, self.amplitudes)), ctx.mpf(0))


def make_sinc(n: int, sigma: float) -> BandLimitedFn:
    """``f(x) = prod_j sin(sigma x_j) / (pi x_j)``, spectrum the indicator of the box."""
    if sigma <= 0:
        raise DomainError("band limit sigma must be positive")
    if n < 1:
        raise DomainError("dimension must be >= 1")
    return BandLimitedFn(n, float(sigma), "sinc_tensor")


def make_shifted_mixture(sigma: float, shifts, amplitudes) -> BandLimitedFn:
    """``f(x) = sum_j a_j sin(sigma (x - t_j)) / (pi (x - t_j))`` in one dimension."""
    if sigma <= 0:
        raise DomainError("band limit sigma must be positive")
    shifts = tuple(float(t) for t in shifts)
    amplitudes = tuple(float(a) for a in amplitudes)
    if len(shifts) == 0 or len(shifts) != len(amplitudes):
        raise DomainError("need k >= 1 matching shifts and amplitudes")
    return BandLimitedFn(1, float(sigma), "shifted_sinc_mixture", shifts, amplitudes)


def random_mixture(sigma: float, k: int, seed: int, spread: float = 4.0) -> BandLimitedFn:
    """Seeded mixture: shifts uniform on ``[-spread, spread]``, standard normal amplitudes."""
    rng = np.random.default_rng(seed)
    return make_shifted_mixture(sigma, rng.uniform(-spread, spread, k), rng.standard_normal(k))


def l2_norm(fn: BandLimitedFn) -> float:
    """Closed-form ``||f||_{L2(R^n)}``."""
    s = fn.sigma
    if fn.kind == "sinc_tensor":
        return (s / math.pi) ** (fn.n / 2)
    t = np.asarray(fn.shifts)
    a = np.asarray(fn.amplitudes)
    d = t[:, None] - t[None, :]
    # sin(sigma d)/(pi d) -> sigma/pi on the diagonal
    gram = s / math.pi * _sinc_unnormalized(s * d)
    return math.sqrt(max(float(a @ gram @ a), 0.0))


def spectral_density(fn: BandLimitedFn) -> SpectralDensity:
    """``|fhat(xi)|^2`` of a one-dimensional band-limited function."""
    if fn.n != 1:
        raise DomainError("spectral densities are provided for n = 1 only")
    if fn.kind == "sinc_tensor":
        return SpectralDensity(lambda xi: np.ones_like(np.asarray(xi, dtype=float)),
                               fn.sigma, exact_indicator=True)
    t = np.asarray(fn.shifts)
    a = np.asarray(fn.amplitudes)

    def dens(xi):
        xi = np.asarray(xi, dtype=float)
        phase = np.multiply.outer(xi, t)
        re = np.cos(phase) @ a
        im = np.sin(phase) @ a
        return re * re + im * im

    return SpectralDensity(dens, fn.sigma)
