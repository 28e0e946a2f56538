"""Closed-form probabilistic helpers for binomial degrees and the concentration
intervals checked by the experiments.

Exact binomial sums are taken in log space (``gammaln`` plus ``xlogy``) and
accumulated with ``math.fsum`` so that ``n = 10**4`` does not underflow.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.special import gammaln, xlog1py, xlogy

from .errors import ParameterError

Side = Literal["lower", "upper"]
TheoremId = Literal["exthm-relative", "resconc-i", "resconc-ii", "resconc-iii", "concentration-f"]

RECIPROCAL_C = 10.0


class RegimeWarning(UserWarning):
    """Parameters fall outside the regime a theorem is stated for."""


def _check_np(n: int, p: float) -> None:
    if n < 0 or int(n) != n:
        raise ParameterError("n must be a non-negative integer")
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ParameterError(f"probability {p} outside [0, 1]")


# --- tails -----------------------------------------------------------------


@dataclass(frozen=True)
class TailBound:
    n: int
    p: float
    a: float
    lower_tail: float
    upper_tail: float


def chernoff(n: int, p: float, a: float, side: Side) -> float:
    """Chernoff bound on ``P(X <= np - a)`` (lower) or ``P(X >= np + a)`` (upper)."""
    _check_np(n, p)
    if not a > 0:
        raise ParameterError("deviation a must be positive")
    mu = n * p
    if side == "lower":
        return math.exp(-a * a / (2.0 * mu)) if mu > 0 else 0.0
    if side == "upper":
        return math.exp(-a * a / (2.0 * (mu + a / 3.0)))
    raise ParameterError(f"unknown side {side!r}")


def tail_bound(n: int, p: float, a: float) -> TailBound:
    return TailBound(n, p, a, chernoff(n, p, a, "lower"), chernoff(n, p, a, "upper"))


# --- moments ---------------------------------------------------------------


def stirling_partition(d: int, i: int) -> int:
    """Stirling number of the second kind by the alternating sum."""
    if d < 0 or i < 0:
        raise ParameterError("Stirling numbers need non-negative arguments")
    if i > d:
        return 0
    total = sum((-1) ** t * math.comb(i, t) * (i - t) ** d for t in range(i + 1))
    return total // math.factorial(i)


def stirling_recurrence(d: int, i: int) -> int:
    """``S(d, i) = i S(d-1, i) + S(d-1, i-1)`` evaluated by a table."""
    if d < 0 or i < 0:
        raise ParameterError("Stirling numbers need non-negative arguments")
    row = [1] + [0] * i
    for _ in range(d):
        row = [0] + [k * row[k] + row[k - 1] for k in range(1, i + 1)]
    return row[i]


def falling(n: int, i: int) -> int:
    out = 1
    for t in range(i):
        out *= n - t
    return out


def binomial_moment(n: int, p: float, d: int) -> float:
    """``E[X^d]`` for ``X ~ Bin(n, p)``: ``sum_i S(d,i) p^i n(n-1)...(n-i+1)``."""
    _check_np(n, p)
    if d < 0:
        raise ParameterError("moment order must be non-negative")
    return math.fsum(stirling_partition(d, i) * falling(n, i) * p ** i for i in range(d + 1))


def binomial_log_pmf(n: int, p: float) -> np.ndarray:
    """``log P(X = k)``, ``k = 0..n`` (``-inf`` on impossible outcomes)."""
    _check_np(n, p)
    k = np.arange(n + 1, dtype=float)
    with np.errstate(divide="ignore"):
        lc = gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)
        return lc + xlogy(k, p) + xlog1py(n - k, -p)


def binomial_expectation(n: int, p: float, fn) -> float:
    """``E[fn(X)]`` by exact compensated summation; ``fn`` maps a k-array to values."""
    k = np.arange(n + 1)
    w = np.exp(binomial_log_pmf(n, p))
    vals = np.asarray(fn(k), dtype=float)
    return math.fsum((w * vals).tolist())


def reciprocal_moment_exact(n: int, p: float, a: float, b: int) -> float:
    """``E[1/(a + X)^b]`` for ``X ~ Bin(n, p)`` by enumeration."""
    _check_reciprocal(a, b)
    return binomial_expectation(n, p, lambda k: 1.0 / (a + k) ** b)


def _check_reciprocal(a: float, b: int) -> None:
    if not a > 0:
        raise ParameterError("a must be positive")
    if b < 1 or int(b) != b:
        raise ParameterError("b must be a positive integer")


def reciprocal_moment_bounds(n: int, p: float, a: float, b: int, *,
                             C: float = RECIPROCAL_C) -> tuple[float, float]:
    """``(1/(a+np)^b, 1/(a+np)^b + C/(np)^(b+1))``.

    The lower end is Jensen's inequality; the constant ``C`` in the upper end
    is unstated in the asymptotic lemma and defaults to 10.
    """
    _check_np(n, p)
    _check_reciprocal(a, b)
    mu = n * p
    if mu < 10:
        warnings.warn(f"np={mu:g} below 10; the upper end is asymptotic", RegimeWarning,
                      stacklevel=2)
    lower = 1.0 / (a + mu) ** b
    upper = lower + C / mu ** (b + 1) if mu > 0 else math.inf
    return lower, upper


def indicator_reciprocal_identity(n: int, p: float, alpha: int) -> tuple[float, float, float]:
    """Both sides of ``E[1{X>=1}/X^alpha] = E[np/(Y+1)^(alpha+1)]``.

    ``X ~ Bin(n, p)``, ``Y ~ Bin(n-1, p)``.  Returns ``(lhs, rhs, lhs - rhs)``.
    """
    _check_np(n, p)
    if alpha < 1 or int(alpha) != alpha:
        raise ParameterError("alpha must be a positive integer")
    if n == 0:
        return 0.0, 0.0, 0.0
    lhs = binomial_expectation(
        n, p, lambda k: np.where(k >= 1, 1.0 / np.maximum(k, 1) ** alpha, 0.0))
    rhs = n * p * binomial_expectation(n - 1, p, lambda k: 1.0 / (k + 1.0) ** (alpha + 1))
    return lhs, rhs, lhs - rhs


# --- concentration intervals -----------------------------------------------


@dataclass(frozen=True)
class ConcentrationInterval:
    theorem: str
    center: float
    half_width: float
    params: dict = field(default_factory=dict)

    @property
    def low(self) -> float:
        return self.center - self.half_width

    @property
    def high(self) -> float:
        return self.center + self.half_width

    def contains(self, x: float) -> bool:
        return abs(x - self.center) <= self.half_width


def regime_lower(n: int) -> float:
    """``log n + log log log n`` (``log n`` when the triple log is undefined)."""
    ln = math.log(n)
    if ln > math.e:
        return ln + math.log(math.log(ln))
    return ln


def check_regime(n: int, p: float, *, c: float | None = None) -> list[str]:
    """Warn and return messages when ``np`` is outside the theorems' regime."""
    np_ = n * p
    msgs = []
    lo = c * math.log(n) if c is not None else regime_lower(n)
    if np_ < lo:
        msgs.append(f"np={np_:g} below the regime floor {lo:g}")
    if np_ > n ** 0.1:
        msgs.append(f"np={np_:g} above n^(1/10)={n ** 0.1:g}")
    for msg in msgs:
        warnings.warn(msg, RegimeWarning, stacklevel=3)
    return msgs


def concentration_interval(theorem: TheoremId, *, n: int, p: float, center: float | None = None,
                           f: float | None = None, gamma_i: int | None = None,
                           gamma_j: int | None = None, rel: float = 0.1,
                           form: Literal["displayed", "proof"] = "displayed",
                           warn: bool = False) -> ConcentrationInterval:
    """Interval for one theorem.

    * ``exthm-relative``: ``center * (1 +- rel)``.
    * ``resconc-i``: centred at ``1/g_i + 1/g_j`` with half-width
      ``max(1/g_i^2 + 1/g_j^2, 9(g_i+g_j) log n / (g_i g_j np log np))``.
    * ``resconc-ii``: centred at ``2/np`` with ``c = np / log n``; ``form``
      selects ``10/(c^2 log n log log n)`` (displayed) or
      ``10 log n / ((np)^2 log np)`` (the form the argument produces).
    * ``resconc-iii``: centred at ``2/np`` with half-width ``7 sqrt(log n)/(np)^(3/2)``.
    * ``concentration-f``: ``center * sqrt(f log n / (np log np))`` around ``center``.
    """
    _check_np(n, p)
    if n < 3:
        raise ParameterError("intervals need n >= 3")
    np_ = n * p
    if np_ <= 1:
        raise ParameterError("intervals need np > 1")
    ln = math.log(n)
    params = {"n": n, "p": p}
    if warn:
        check_regime(n, p)
    if theorem == "exthm-relative":
        if center is None:
            raise ParameterError("exthm-relative needs a center")
        return ConcentrationInterval(theorem, center, abs(center) * rel, {**params, "rel": rel})
    if theorem == "resconc-i":
        if not gamma_i or not gamma_j:
            raise ParameterError("resconc-i needs positive degrees gamma_i, gamma_j")
        gi, gj = float(gamma_i), float(gamma_j)
        c0 = 1.0 / gi + 1.0 / gj
        hw = max(1.0 / gi ** 2 + 1.0 / gj ** 2,
                 9.0 * (gi + gj) * ln / (gi * gj * np_ * math.log(np_)))
        return ConcentrationInterval(theorem, c0, hw, {**params, "gamma_i": gamma_i,
                                                       "gamma_j": gamma_j})
    if theorem == "resconc-ii":
        c = np_ / ln
        if form == "displayed":
            if math.log(ln) <= 0:
                raise ParameterError("displayed form needs log log n > 0")
            hw = 10.0 / (c * c * ln * math.log(ln))
        elif form == "proof":
            hw = 10.0 * ln / (np_ * np_ * math.log(np_))
        else:
            raise ParameterError(f"unknown form {form!r}")
        return ConcentrationInterval(theorem, 2.0 / np_, hw, {**params, "c": c, "form": form})
    if theorem == "resconc-iii":
        return ConcentrationInterval(theorem, 2.0 / np_, 7.0 * math.sqrt(ln) / np_ ** 1.5, params)
    if theorem == "concentration-f":
        if center is None or f is None:
            raise ParameterError("concentration-f needs center and f")
        if f <= 0:
            raise ParameterError("f must be positive")
        hw = abs(center) * math.sqrt(f * ln / (np_ * math.log(np_)))
        return ConcentrationInterval(theorem, center, hw, {**params, "f": f})
    raise ParameterError(f"unknown theorem {theorem!r}")


def default_f(n: int, p: float) -> float:
    """``log log (np)``."""
    return math.log(math.log(n * p))
