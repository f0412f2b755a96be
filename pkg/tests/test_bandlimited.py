import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mqshape.bandlimited import (
    l2_norm,
    make_shifted_mixture,
    make_sinc,
    random_mixture,
    spectral_density,
)
from mqshape.exceptions import DomainError
from mqshape.numerics import PrecisionPolicy, integrate_adaptive


def test_sinc_values():
    f = make_sinc(1, math.pi)
    assert f(0.0) == pytest.approx(1.0)
    assert f(1.0) == pytest.approx(0.0, abs=1e-16)
    g = make_sinc(1, 2.0)
    assert g(math.pi / 2) == pytest.approx(0.0, abs=1e-16)
    assert make_sinc(2, 1.0)([0.0, 0.0]) == pytest.approx(1 / math.pi ** 2)
    with pytest.raises(DomainError):
        make_sinc(1, 0.0)


def test_sinc_norms():
    assert l2_norm(make_sinc(1, 1.0)) == pytest.approx(0.5641895835477563, rel=1e-15)
    assert l2_norm(make_sinc(2, 1.0)) == pytest.approx(1 / math.pi)
    assert make_sinc(3, 2.0).band_limit == pytest.approx(2 * math.sqrt(3))


def test_mixture_matches_sinc():
    a = make_shifted_mixture(1.3, [0.0], [1.0])
    b = make_sinc(1, 1.3)
    x = np.linspace(-5, 5, 41)
    np.testing.assert_allclose(a(x), b(x), rtol=1e-15)
    assert l2_norm(a) == pytest.approx(l2_norm(b))


def test_mixture_at_shift():
    s, t, amp = 1.7, [0.4, -1.1, 2.0], [0.5, -1.2, 0.8]
    f = make_shifted_mixture(s, t, amp)
    expect = amp[0] * s / math.pi + sum(
        a * math.sin(s * (t[0] - tj)) / (math.pi * (t[0] - tj)) for tj, a in zip(t[1:], amp[1:]))
    assert f(t[0]) == pytest.approx(expect, rel=1e-14)


def _parseval(fn):
    dens = spectral_density(fn)
    return math.sqrt(integrate_adaptive(dens, -fn.sigma, fn.sigma, rel_tol=1e-12) / (2 * math.pi))


def test_mixture_norm_quadrature():
    f = make_shifted_mixture(1.0, [0.0, math.pi], [1.0, -1.0])
    assert l2_norm(f) == pytest.approx(_parseval(f), rel=1e-8)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 5), st.floats(0.2, 3.0))
def test_parseval_random_mixtures(seed, k, sigma):
    f = random_mixture(sigma, k, seed)
    assert l2_norm(f) == pytest.approx(_parseval(f), rel=1e-8)


def test_parseval_by_sampling():
    # f^2 has band 2 sigma, so h * sum f(kh)^2 is exact for h < pi / sigma;
    # only the truncation tail (~1e-7 here) remains
    f = make_shifted_mixture(1.0, [0.0, 1.5], [1.0, 0.7])
    h, L = 1.0, 2e6
    x = np.arange(-L, L + h, h)
    assert l2_norm(f) == pytest.approx(math.sqrt(h * np.sum(f(x) ** 2)), rel=1e-6)


def test_spectral_density():
    d = spectral_density(make_sinc(1, 1.0))
    assert d(0.5) == 1.0 and d(1.5) == 0.0
    assert d.exact_indicator
    m = spectral_density(random_mixture(1.0, 4, 9))
    xi = np.linspace(-1, 1, 33)
    assert np.all(m(xi) >= 0)
    with pytest.raises(DomainError):
        spectral_density(make_sinc(2, 1.0))


def test_removable_singularity_continuity():
    f = make_shifted_mixture(2.0, [0.3], [1.0])
    centre = f(0.3)
    for eps in (1e-9, 1e-8, 1e-6):
        assert abs(f(0.3 + eps) - centre) < 1e-12
    # across the Taylor switch at |u| = 1e-4
    u = 1e-4 / 2.0
    assert abs(f(0.3 + u * (1 - 1e-9)) - f(0.3 + u * (1 + 1e-9))) < 1e-12


def test_numerical_band_limit():
    # samples on a wide window; window leakage only
    sigma, T, N = 1.0, 2000.0, 2 ** 16
    x = (np.arange(N) - N / 2) * (T / N)
    f = random_mixture(sigma, 3, 4)
    spec = np.abs(np.fft.fft(f(x))) ** 2
    freq = 2 * np.pi * np.fft.fftfreq(N, d=T / N)
    outside = spec[np.abs(freq) > sigma * 1.01].sum()
    assert outside / spec.sum() < 1e-3


def test_eval_mp_matches():
    f = random_mixture(1.2, 3, 2)
    ctx = PrecisionPolicy.extended(128).mp_context()
    for x in (-1.0, 0.0, 0.77):
        assert float(f.eval_mp(ctx, x)) == pytest.approx(f(x), rel=1e-13, abs=1e-16)
    g = make_sinc(2, 0.9)
    assert float(g.eval_mp(ctx, [0.3, -0.4])) == pytest.approx(g([0.3, -0.4]), rel=1e-14)
