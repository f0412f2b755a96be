"""Choosing the shape parameter ``c`` from the band-limited error bound.

Three procedures are provided:

``advise_practical``
    The factor ``lambda^(1/delta)`` is ignored (it is numerically 1 unless
    ``c`` is astronomically large), except for ``n = 1, beta = 1`` where it
    is kept.
``advise_theoretical_fixed``
    ``lambda^(1/delta)`` is kept and the cube side ``b0`` is fixed, so ``C``
    stops depending on ``c`` beyond the crossover ``c0``.
``advise_theoretical_unfixed``
    ``lambda^(1/delta)`` is kept and ``b0`` may grow with ``c``
    (dilation-invariant domains), so ``C`` always depends on ``c``.

In every mode ``c`` is restricted to ``[c_floor, inf)``, with
``c_floor = 12 rho sqrt(n) exp(2 n gamma_n) gamma_n (m + 1) delta`` the
smallest value compatible with ``delta <= delta0``. All shape parameters are
:class:`LogScalar` because ``exp(2 n gamma_n)`` is ``exp(468)`` at ``n = 3``.

Every intermediate quantity and comparison is appended to
``ShapeAdvice.branch_trace``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, List, Optional, Tuple

from .bounds import covered
from .constants import (
    LN_THREE_HALVES,
    cpd_order,
    gamma_seq,
    log_scale_constant,
    rho_delta0,
)
from .exceptions import CoverageError, DomainError, FillDistanceError
from .numerics import LogScalar

__all__ = [
    "AdvisorInputs",
    "ShapeAdvice",
    "advise_practical",
    "advise_theoretical_fixed",
    "advise_theoretical_unfixed",
    "advise",
    "MODES",
]

LN_TWO_THIRDS = -LN_THREE_HALVES
E4 = math.exp(4.0)
MODES = ("practical", "fixed-b0", "unfixed-b0")
_LN_FLOAT_MAX = 709.782712893384

OPTIMAL = "optimal"
SUGGESTED = "suggested"
LARGER_BETTER = "monotone_larger_better"
SMALLER_BETTER = "monotone_smaller_better"


@dataclass(frozen=True)
class AdvisorInputs:
    n: int
    beta: float
    sigma: float
    delta: float
    b0: Optional[float] = None
    # fill distances below this count as "very small" (fixed-b0, n=1, beta=-1)
    delta_very_small: Optional[float] = None
    # concrete c returned for "larger is better" verdicts; default 1e6 * c_floor
    c_cap: Optional[float] = None

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("dimension must be >= 1")
        cpd_order(self.beta)
        if not self.sigma > 0:
            raise DomainError("sigma must be positive")
        if not self.delta > 0:
            raise DomainError("delta must be positive")
        if self.b0 is not None and not self.b0 > 0:
            raise DomainError("b0 must be positive")

    @property
    def is_imq_1d(self) -> bool:
        return self.n == 1 and self.beta == -1.0


@dataclass
class ShapeAdvice:
    c: LogScalar
    case_label: str
    branch_trace: List[Tuple[str, Any, str]]
    admissible_interval: Tuple[LogScalar, Optional[LogScalar]]
    advice_kind: str
    objective_value: Optional[LogScalar] = None
    mode: str = ""

    @property
    def c_value(self) -> float:
        return self.c.to_value()

    @property
    def c_min(self) -> LogScalar:
        return self.admissible_interval[0]

    def to_dict(self) -> dict:
        lo, hi = self.admissible_interval
        return {
            "mode": self.mode,
            "c": _ls_json(self.c),
            "case_label": self.case_label,
            "advice_kind": self.advice_kind,
            "admissible_interval": {"c_min": _ls_json(lo),
                                    "c_max": "inf" if hi is None else _ls_json(hi)},
            "objective_value": None if self.objective_value is None
            else _ls_json(self.objective_value),
            "branch_trace": [
                {"condition": cond, "value": _trace_json(val), "verdict": verdict}
                for cond, val, verdict in self.branch_trace
            ],
        }


def _ls_json(v: LogScalar) -> dict:
    return {"ln": None if v.sign == 0 else v.ln_mag, "value": v.format()}


def _trace_json(v):
    if isinstance(v, LogScalar):
        return _ls_json(v)
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


# --- log-domain helpers --------------------------------------------------------

def _sexp(x: float) -> float:
    """exp without OverflowError."""
    return math.inf if x > _LN_FLOAT_MAX else math.exp(x)


def _times(coef: float, c: LogScalar) -> float:
    """``coef * c`` as a float (may be +-inf)."""
    if coef == 0.0:
        return 0.0
    return math.copysign(_sexp(math.log(abs(coef)) + c.ln_mag), coef)


def _pos(x: float) -> LogScalar:
    return LogScalar.from_log(math.log(x))


@dataclass(frozen=True)
class _Setup:
    """Shared constants for one ``(n, beta, delta)``."""

    n: int
    beta: float
    m: int
    rho: float
    gamma_n: int
    ln_K: float  # ln(12 rho sqrt(n) exp(2 n gamma_n) gamma_n)
    delta: float

    @classmethod
    def build(cls, inp: AdvisorInputs) -> "_Setup":
        rho, _, _ = rho_delta0(inp.n, inp.beta)
        g = gamma_seq(inp.n)
        ln_K = math.log(12) + log_scale_constant(inp.n, rho) + math.log(g)
        return cls(inp.n, inp.beta, cpd_order(inp.beta), rho, g, ln_K, inp.delta)

    @property
    def p(self) -> float:
        """``beta + 1 - n``."""
        return self.beta + 1 - self.n

    @property
    def floor(self) -> LogScalar:
        return LogScalar.from_log(self.ln_K + math.log(self.m + 1) + math.log(self.delta))

    @property
    def eta_delta(self) -> float:
        """``ln(2/3) / (12 rho sqrt(n) exp(2 n gamma_n) gamma_n delta)``."""
        return -_sexp(math.log(LN_THREE_HALVES) - self.ln_K - math.log(self.delta))

    def c0(self, b0: float) -> LogScalar:
        return LogScalar.from_log(math.log(3 * b0) + log_scale_constant(self.n, self.rho))

    def delta_ceiling(self, b0: float) -> float:
        return b0 / (4 * self.gamma_n * (self.m + 1))


def _cap(inp: AdvisorInputs, floor: LogScalar) -> LogScalar:
    if inp.c_cap is not None:
        return LogScalar.from_value(inp.c_cap)
    return floor * 1e6


def _require_b0(inp: AdvisorInputs) -> float:
    if inp.b0 is None:
        raise DomainError("b0 is required in this mode")
    return inp.b0


def _check_delta(delta: float, dmax: float, trace) -> None:
    ok = delta < dmax
    trace.append(("delta < admissible maximum", dmax, "ok" if ok else "violated"))
    if not ok:
        raise FillDistanceError(
            f"fill distance too large for the error-bound constants: need delta < {dmax:.6g}",
            dmax,
        )


def _check_coverage(inp: AdvisorInputs, trace) -> None:
    ok = covered(inp.n, inp.beta)
    trace.append(("n + beta >= 1 or n + beta = -1", inp.n + inp.beta,
                  "covered" if ok else "not covered"))
    if not ok:
        raise CoverageError()


# --- objectives (natural logs) -------------------------------------------------

def _ln_g(p: float, sigma: float, c: LogScalar) -> float:
    """``c^(p/4) exp(c sigma / 2)``."""
    return p / 4 * c.ln_mag + _times(sigma / 2, c)


def _ln_h_fixed(st: _Setup, sigma: float, b0: float, c: LogScalar) -> float:
    """``c^(p/4) exp(c sigma/2) lambda^(1/delta)`` with ``b0`` fixed."""
    c0 = st.c0(b0)
    if c <= c0:
        return st.p / 4 * c.ln_mag + _times(st.eta_delta + sigma / 2, c)
    ln_lam_pow = LN_TWO_THIRDS * b0 / (4 * st.gamma_n * st.delta)
    return st.p / 4 * c.ln_mag + _times(sigma / 2, c) + ln_lam_pow


def _ln_G_unfixed(st: _Setup, sigma: float, c: LogScalar) -> float:
    """``c^(p/4) H(sigma, delta)^c``."""
    ln_H = sigma / 2 + st.eta_delta
    return st.p / 4 * c.ln_mag + _times(ln_H, c)


def _obj(ln_value: float) -> LogScalar:
    return LogScalar.from_log(ln_value)


# --- practical criteria (lambda^(1/delta) ignored) ------------------------------

def advise_practical(inp: AdvisorInputs) -> ShapeAdvice:
    b0 = _require_b0(inp)
    trace: List[Tuple[str, Any, str]] = []
    n, beta, sigma, delta = inp.n, inp.beta, inp.sigma, inp.delta
    st = _Setup.build(inp)

    if inp.is_imq_1d:
        trace.append(("n = 1 and beta = -1", None, "Case3"))
        _check_delta(delta, min(1 / (24 * sigma * E4), b0 / 8), trace)
        floor = st.floor
        c = _pos(1 / sigma)
        trace.append(("c_floor = 24 e^4 delta", floor, "floor"))
        trace.append(("c = 1/sigma", c, "suggested"))
        return ShapeAdvice(c, "S2.Case3", trace, (floor, None), SUGGESTED, None, "practical")

    _check_coverage(inp, trace)
    _check_delta(delta, st.delta_ceiling(b0), trace)
    floor = st.floor
    p = st.p
    trace.append(("c_floor", floor, "computed"))
    trace.append(("beta + 1 - n", p, ">= 0" if p >= 0 else "< 0"))

    if p >= 0 and not (n == 1 and beta == 1.0):
        trace.append(("n != 1 or beta != 1", None, "Case1a"))
        return ShapeAdvice(floor, "S2.Case1a", trace, (floor, None), OPTIMAL,
                           _obj(_ln_g(p, sigma, floor)), "practical")

    if p >= 0:
        return _practical_case1b(inp, st, floor, trace)

    c_stat = _pos((n - beta - 1) / (2 * sigma))
    trace.append(("stationary point (n - beta - 1)/(2 sigma)", c_stat, "computed"))
    if c_stat >= floor:
        c, why = c_stat, "stationary point >= floor"
    else:
        c, why = floor, "floor > stationary point"
    trace.append(("max{stationary, floor}", c, why))
    return ShapeAdvice(c, "S2.Case2", trace, (floor, None), OPTIMAL,
                       _obj(_ln_g(p, sigma, c)), "practical")


def _ln_h_case1b(sigma: float, delta: float, b0: float, c: LogScalar) -> float:
    """``c^(1/4) exp(c sigma/2) lambda^(1/delta)`` for n = 1, beta = 1."""
    c0 = _pos(3 * b0 * E4)
    if c <= c0:
        eta = LN_TWO_THIRDS / (24 * E4 * delta)
        return 0.25 * c.ln_mag + _times(sigma / 2 + eta, c)
    return 0.25 * c.ln_mag + _times(sigma / 2, c) + LN_TWO_THIRDS * b0 / (8 * delta)


def _practical_case1b(inp, st, floor, trace) -> ShapeAdvice:
    sigma, delta, b0 = inp.sigma, inp.delta, inp.b0
    c1 = floor
    c0 = _pos(3 * b0 * E4)
    eta = LN_TWO_THIRDS / (24 * E4 * delta)
    q = sigma / 2 + eta
    trace.append(("eta = ln(2/3)/(24 e^4 delta)", eta, "computed"))
    trace.append(("c1 = c_floor", c1, "computed"))
    trace.append(("c0 = 3 b0 e^4", c0, "computed"))
    trace.append(("sigma/2 + eta", q, ">= 0" if q >= 0 else "< 0"))

    def H(c):
        return _ln_h_case1b(sigma, delta, b0, c)

    def done(c, label):
        return ShapeAdvice(c, label, trace, (floor, None), OPTIMAL, _obj(H(c)), "practical")

    if q >= 0:
        return done(c1, "S2.Case1b.i")
    cstar = _pos(-1 / (4 * q))
    trace.append(("c* = -1/(4(sigma/2 + eta))", cstar, "computed"))
    if c1 < cstar < c0:
        h1, h0 = H(c1), H(c0)
        pick = c1 if h1 <= h0 else c0
        trace.append(("H(c1) <= H(c0)", (h1, h0), "c1" if pick is c1 else "c0"))
        return done(pick, "S2.Case1b.ii")
    if c0 <= cstar:
        trace.append(("c0 <= c*", None, "c1"))
        return done(c1, "S2.Case1b.iii")
    trace.append(("c* <= c1", None, "c0"))
    return done(c0, "S2.Case1b.iv")


# --- theoretical criteria, b0 fixed --------------------------------------------

def advise_theoretical_fixed(inp: AdvisorInputs) -> ShapeAdvice:
    b0 = _require_b0(inp)
    trace: List[Tuple[str, Any, str]] = []
    sigma, delta = inp.sigma, inp.delta
    st = _Setup.build(inp)
    floor = st.floor
    c0 = st.c0(b0)

    if inp.is_imq_1d:
        trace.append(("n = 1 and beta = -1", None, "Case6"))
        _check_delta(delta, min(1 / (24 * sigma * E4), b0 / 8), trace)
        inv_sigma = _pos(1 / sigma)
        trace.append(("c0 = 3 b0 e^4", c0, "computed"))
        if c0 < inv_sigma:
            trace.append(("3 b0 e^4 < 1/sigma", None, "c = 1/sigma"))
            return ShapeAdvice(inv_sigma, "S3.1.Case6a", trace, (floor, None), SUGGESTED,
                               None, "fixed-b0")
        tiny = inp.delta_very_small if inp.delta_very_small is not None else b0 / 800
        very_small = delta < tiny
        trace.append(("delta < delta_very_small", tiny, "very small" if very_small else "not very small"))
        c = c0 if very_small else inv_sigma
        return ShapeAdvice(c, "S3.1.Case6b", trace, (floor, None), SUGGESTED, None, "fixed-b0")

    _check_coverage(inp, trace)
    _check_delta(delta, st.delta_ceiling(b0), trace)
    p = st.p
    eta = st.eta_delta
    q = eta + sigma / 2
    trace.append(("eta(delta)", eta, "computed"))
    trace.append(("c_floor", floor, "computed"))
    trace.append(("c0 = 3 b0 rho sqrt(n) e^(2 n gamma_n)", c0, "computed"))
    trace.append(("1 + beta - n", p, _sign_word(p)))
    trace.append(("eta(delta) + sigma/2", q, _sign_word(q)))

    def H(c):
        return _ln_h_fixed(st, sigma, b0, c)

    def done(c, label):
        return ShapeAdvice(c, label, trace, (floor, None), OPTIMAL, _obj(H(c)), "fixed-b0")

    if p >= 0 and q >= 0:
        if q == 0:
            trace.append(("eta(delta) + sigma/2 = 0", None, "treated as increasing (Case1)"))
        return done(floor, "S3.1.Case1")
    if p > 0:
        cstar = _pos(-p / (4 * q))
        trace.append(("c* = (n - beta - 1)/(4 eta + 2 sigma)", cstar, "computed"))
        if cstar < floor:
            return done(c0, "S3.1.Case2b")
        if cstar > c0:
            return done(floor, "S3.1.Case2c")
        hf, h0 = H(floor), H(c0)
        pick = floor if hf <= h0 else c0
        trace.append(("H1(c_floor) <= H1(c0)", (hf, h0), "c_floor" if pick is floor else "c0"))
        return done(pick, "S3.1.Case2a")
    if p == 0:
        return done(c0, "S3.1.Case3")
    c2 = _pos(-p / (2 * sigma))
    trace.append(("c2 = (n - 1 - beta)/(2 sigma)", c2, "computed"))
    if q > 0:
        c1 = _pos(-p / (4 * q))
        trace.append(("c1 = (n - 1 - beta)/(4(eta + sigma/2))", c1, "computed"))
        if c1 >= c0:
            left, lname = c0, "c0"
        elif c1 >= floor:
            left, lname = c1, "c1"
        else:
            left, lname = floor, "c_floor"
        right, rname = (c0, "c0") if c2 <= c0 else (c2, "c2")
        hl, hr = H(left), H(right)
        pick = left if hl <= hr else right
        trace.append((f"H({lname}) <= H({rname})", (hl, hr),
                      lname if pick is left else rname))
        return done(pick, "S3.1.Case4")
    if q == 0:
        trace.append(("eta(delta) + sigma/2 = 0", None, "H decreasing on (0, c0]; Case5 rule"))
    if c0 <= c2:
        return done(c2, "S3.1.Case5i")
    return done(c0, "S3.1.Case5ii")


def _sign_word(x: float) -> str:
    return "> 0" if x > 0 else ("< 0" if x < 0 else "= 0")


# --- theoretical criteria, b0 unfixed ------------------------------------------

def advise_theoretical_unfixed(inp: AdvisorInputs) -> ShapeAdvice:
    trace: List[Tuple[str, Any, str]] = []
    sigma, delta = inp.sigma, inp.delta
    st = _Setup.build(inp)
    floor = st.floor
    ln_H = sigma / 2 + st.eta_delta
    trace.append(("c_floor", floor, "computed"))
    trace.append(("ln H(sigma, delta)", ln_H, _sign_word(ln_H)))

    def G(c):
        return _ln_G_unfixed(st, sigma, c)

    def done(c, label, kind=OPTIMAL):
        return ShapeAdvice(c, label, trace, (floor, None), kind, _obj(G(c)), "unfixed-b0")

    if inp.is_imq_1d:
        trace.append(("n = 1 and beta = -1", None, "Case6"))
        dmax = _sexp(-st.ln_K) / sigma
        _check_delta(delta, dmax, trace)
        q = st.eta_delta + sigma / 2
        trace.append(("eta + sigma/2", q, _sign_word(q)))
        if q <= 0:
            return done(_cap(inp, floor), "S3.2.Case6a", LARGER_BETTER)
        return _unfixed_case6b(q, sigma, trace, done)

    _check_coverage(inp, trace)
    p = st.p
    trace.append(("beta + 1 - n", p, _sign_word(p)))
    if p > 0 and ln_H >= 0:
        return done(floor, "S3.2.Case1")
    if p < 0 and ln_H > 0:
        cstar = _pos(-p / (4 * ln_H))
        trace.append(("c* = (n - 1 - beta)/(4 eta)", cstar, "computed"))
        c = floor if cstar < floor else cstar
        trace.append(("c* < c_floor", None, "c_floor" if c is floor else "c*"))
        return done(c, "S3.2.Case2")
    if p > 0:
        trace.append(("bound -> 0 as c -> 0+ and as c -> inf", None, "smallest admissible c"))
        return done(floor, "S3.2.Case3", SMALLER_BETTER)
    if ln_H < 0:
        return done(_cap(inp, floor), "S3.2.Case4", LARGER_BETTER)
    if p == 0 and ln_H > 0:
        return done(floor, "S3.2.Case5")
    if p < 0:
        # H(sigma, delta) = 1 with beta + 1 - n < 0: c^(p/4) decreases
        return done(_cap(inp, floor), "S3.2.Case2.H1", LARGER_BETTER)
    raise DomainError("boundary case H(sigma, delta) = 1 excluded")


def _unfixed_case6b(q: float, sigma: float, trace, done) -> ShapeAdvice:
    cs = _pos(1 / (4 * q))
    inv_sigma = _pos(1 / sigma)
    trace.append(("1/(4(eta + sigma/2))", cs, ">= 1/sigma" if cs >= inv_sigma else "< 1/sigma"))
    return done(cs if cs >= inv_sigma else inv_sigma, "S3.2.Case6b", SUGGESTED)


def advise(mode: str, inp: AdvisorInputs) -> ShapeAdvice:
    """Dispatch on ``mode`` in ``("practical", "fixed-b0", "unfixed-b0")``."""
    if mode == "practical":
        return advise_practical(inp)
    if mode == "fixed-b0":
        return advise_theoretical_fixed(inp)
    if mode == "unfixed-b0":
        return advise_theoretical_unfixed(inp)
    raise ValueError(f"unknown mode {mode!r}")
