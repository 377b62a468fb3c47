"""Measurement statistics: repeatability, paired t-test, effect size, linearity.

Standard deviations use the n-1 denominator everywhere. Cohen's d for paired
data is mean(d) / sd(d). Student-t probabilities come from the regularized
incomplete beta function, evaluated by a Lentz continued fraction.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Sequence

from refracto.errors import DomainError, InsufficientSamplesError, UndefinedStatisticError

_CF_TOL = 1e-12
_CF_MAX_ITER = 10_000
_TINY = 1e-300


@dataclass(frozen=True)
class PairedTestResult:
    n: int
    mean_a: float
    mean_b: float
    sd_a: float
    sd_b: float
    mean_diff: float
    sd_diff: float
    t_value: float
    df: int
    p_two_sided: float
    cohens_d: float
    ci_low: float
    ci_high: float
    level: float = 0.95


def _floats(xs) -> list[float]:
    return [float(x) for x in xs]


def mean_sd(xs: Sequence[float]) -> tuple[float, float]:
    xs = _floats(xs)
    n = len(xs)
    if n < 2:
        raise InsufficientSamplesError(f"need at least 2 samples, got {n}")
    m = math.fsum(xs) / n
    var = math.fsum((x - m) ** 2 for x in xs) / (n - 1)
    return m, math.sqrt(var)


def rsd_percent(xs: Sequence[float]) -> float:
    m, sd = mean_sd(xs)
    if m == 0:
        raise UndefinedStatisticError("RSD undefined for zero mean")
    return 100.0 * sd / abs(m)


def _betacf(a: float, b: float, x: float) -> float:
    # modified Lentz evaluation of the incomplete beta continued fraction
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    d = 1.0 / (d if abs(d) > _TINY else _TINY)
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > _TINY else _TINY)
        c = 1.0 + aa / c
        c = c if abs(c) > _TINY else _TINY
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > _TINY else _TINY)
        c = 1.0 + aa / c
        c = c if abs(c) > _TINY else _TINY
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_TOL:
            return h
    raise ArithmeticError(f"incomplete beta did not converge for a={a}, b={b}, x={x}")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and 0 <= x <= 1."""
    if a <= 0 or b <= 0:
        raise DomainError("incomplete beta needs a, b > 0")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x must lie in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_cdf(t: float, df: float) -> float:
    if df < 1:
        raise DomainError(f"degrees of freedom must be >= 1, got {df}")
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    if t == 0:
        return 0.5
    # one-tail mass P(T > |t|) = I_x(df/2, 1/2) / 2 with x = df / (df + t^2)
    x = df / (df + t * t)
    tail = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, x)
    return 1.0 - tail if t > 0 else tail


@functools.lru_cache(maxsize=256)
def student_t_ppf(q: float, df: float) -> float:
    """Inverse of ``student_t_cdf`` by bracketing and bisection. Memoised."""
    if not 0.0 < q < 1.0:
        raise DomainError(f"quantile probability must lie in (0, 1), got {q}")
    if q == 0.5:
        return 0.0
    if q < 0.5:
        return -student_t_ppf(1.0 - q, df)
    lo, hi = 0.0, 1.0
    while student_t_cdf(hi, df) < q:
        lo, hi = hi, hi * 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if student_t_cdf(mid, df) < q:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def confidence_interval(xs: Sequence[float], level: float = 0.95) -> tuple[float, float]:
    m, sd = mean_sd(xs)
    return ci_from_summary(m, sd, len(xs), level)


def ci_from_summary(mean: float, sd: float, n: int, level: float = 0.95) -> tuple[float, float]:
    """Student-t interval from summary statistics alone."""
    if not 0.0 < level < 1.0:
        raise DomainError(f"confidence level must lie in (0, 1), got {level}")
    if n < 2:
        raise InsufficientSamplesError(f"need at least 2 samples, got {n}")
    half = student_t_ppf((1.0 + level) / 2.0, n - 1) * sd / math.sqrt(n)
    return mean - half, mean + half


def paired_t_test(a: Sequence[float], b: Sequence[float], level: float = 0.95) -> PairedTestResult:
    a, b = _floats(a), _floats(b)
    if len(a) != len(b):
        raise InsufficientSamplesError(f"paired samples differ in length ({len(a)} vs {len(b)})")
    n = len(a)
    if n < 2:
        raise InsufficientSamplesError(f"need at least 2 pairs, got {n}")
    mean_a, sd_a = mean_sd(a)
    mean_b, sd_b = mean_sd(b)
    d = [x - y for x, y in zip(a, b)]
    md, sdd = mean_sd(d)
    df = n - 1
    if sdd == 0:
        if md == 0:
            t, p, cohen = 0.0, 1.0, 0.0
        else:
            t = math.copysign(math.inf, md)
            p, cohen = 0.0, t
        lo = hi = md
    else:
        se = sdd / math.sqrt(n)
        t = md / se
        p = min(1.0, 2.0 * student_t_cdf(-abs(t), df))
        cohen = md / sdd
        lo, hi = ci_from_summary(md, sdd, n, level)
    return PairedTestResult(
        n=n, mean_a=mean_a, mean_b=mean_b, sd_a=sd_a, sd_b=sd_b,
        mean_diff=md, sd_diff=sdd, t_value=t, df=df, p_two_sided=p,
        cohens_d=cohen, ci_low=lo, ci_high=hi, level=level,
    )


def pearson_r(a: Sequence[float], b: Sequence[float]) -> float:
    a, b = _floats(a), _floats(b)
    if len(a) != len(b):
        raise InsufficientSamplesError("pearson_r needs equal-length samples")
    if len(a) < 2:
        raise InsufficientSamplesError("pearson_r needs at least 2 pairs")
    ma, mb = math.fsum(a) / len(a), math.fsum(b) / len(b)
    sab = math.fsum((x - ma) * (y - mb) for x, y in zip(a, b))
    saa = math.fsum((x - ma) ** 2 for x in a)
    sbb = math.fsum((y - mb) ** 2 for y in b)
    if saa == 0 or sbb == 0:
        raise UndefinedStatisticError("correlation undefined for zero-variance input")
    return max(-1.0, min(1.0, sab / math.sqrt(saa * sbb)))
