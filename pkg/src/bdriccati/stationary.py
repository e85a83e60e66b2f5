"""Stationary distributions: classical product form and the D-parametric family."""
from __future__ import annotations

import math

import numpy as np

from .distribution import Distribution, NonpositiveDenominator
from .riccati import DParameter, f_products
from .schedules import RateSchedule, ScheduleError, asymmetry_q

__all__ = [
    "classical_stationary",
    "renormalization_factors",
    "renormalization_factor",
    "parametric_stationary",
    "effective_schedule",
    "constant_case_closed_form",
    "asymmetric_closed_form",
]


def _balance_ratios(s: RateSchedule) -> np.ndarray:
    """``b_i / d_{i+1}`` for ``i = 0..N-1``."""
    return s.birth[: s.N] / s.death[1 : s.N + 1]


def _cumprod_from_one(factors) -> np.ndarray:
    w = np.empty(len(factors) + 1)
    w[0] = 1.0
    w[1:] = np.cumprod(factors)
    return w


def classical_stationary(s: RateSchedule) -> Distribution:
    """``P_n = P_0 prod_{j<n} b_j / d_{j+1}``, normalized over ``0..N``."""
    return Distribution.from_weights(_cumprod_from_one(_balance_ratios(s)), "classical")


def renormalization_factors(s: RateSchedule, dp: DParameter) -> np.ndarray:
    """``r_i(D) = 1 + g_i / (|D| + S_i - g_i)`` with ``g_i = f_i b_i / d_{i+1}``, ``i = 0..N-1``.

    Raises
    ------
    NonpositiveDenominator
        At the first index whose denominator is ``<= 0``.
    """
    if dp.is_limit:
        return np.ones(s.N)
    fp = f_products(s)
    g = fp.f * _balance_ratios(s)
    denom = dp.magnitude + fp.S - g
    bad = np.flatnonzero(~(denom > 0))
    if bad.size:
        i = int(bad[0])
        raise NonpositiveDenominator(i, float(denom[i]))
    return 1.0 + g / denom


def renormalization_factor(s: RateSchedule, dp: DParameter, i: int) -> float:
    if not 0 <= i <= s.N - 1:
        raise IndexError(f"i = {i} outside [0, {s.N - 1}]")
    return float(renormalization_factors(s, dp)[i])


def parametric_stationary(s: RateSchedule, dp: DParameter) -> Distribution:
    """One-parameter stationary family; the ``-inf`` sentinel is the classical solution."""
    if dp.is_limit:
        d = classical_stationary(s)
        return Distribution(d.p, d.norm_constant, "parametric(-inf)", d.weights)
    r = renormalization_factors(s, dp)
    w = _cumprod_from_one(_balance_ratios(s) * r)
    return Distribution.from_weights(w, f"parametric({dp})")


def effective_schedule(s: RateSchedule, dp: DParameter) -> RateSchedule:
    """Chain whose detailed-balance stationary law is the parametric solution.

    Birth rates ``b_i``, ``i < N``, are multiplied by ``r_i(D)``; death rates
    are left alone.
    """
    if dp.is_limit:
        return s
    birth = np.array(s.birth)
    birth[: s.N] *= renormalization_factors(s, dp)
    return RateSchedule(
        s.N,
        birth,
        s.death,
        label=f"effective[{s.label}; D={dp}]",
        kind="explicit",
    )


def constant_case_closed_form(b_val: float, N: int, dp: DParameter) -> Distribution:
    """``p_k = (1 + k/|D|) / ((N+1)(1 + N/(2|D|)))``; uniform at the sentinel."""
    if not 0 < b_val < 1:
        raise ScheduleError(f"constant rate must lie in (0, 1), got {b_val}")
    k = np.arange(N + 1, dtype=float)
    if dp.is_limit:
        p = np.full(N + 1, 1.0 / (N + 1))
        return Distribution(p, 1.0 / (N + 1), "closed_form_constant(-inf)", np.ones(N + 1))
    D = dp.magnitude
    norm = 1.0 / ((N + 1) * (1.0 + N / (2.0 * D)))
    w = 1.0 + k / D
    return Distribution(norm * w, norm, f"closed_form_constant({dp})", w)


def asymmetric_closed_form(epsilon: float, N: int, dp: DParameter) -> Distribution:
    """Biased-walk family ``q^{-n} prod_{i<n} ((1-q)(|D|+q^i) + 1 - q^i) / ((1-q)|D| + 1 - q^i)``."""
    if not 0 < epsilon < 1:
        raise ScheduleError(f"epsilon must lie in (0, 1), got {epsilon}")
    q = asymmetry_q(epsilon)
    n = np.arange(N + 1, dtype=float)
    base = np.exp(-n * math.log(q))
    if dp.is_limit:
        return Distribution.from_weights(base, "closed_form_asymmetric(-inf)")
    D = dp.magnitude
    one_minus_q = 2.0 * epsilon / (1.0 + epsilon)
    i = np.arange(N, dtype=float)
    qi = np.exp(i * math.log(q))
    one_minus_qi = -np.expm1(i * math.log(q))
    num = one_minus_q * (D + qi) + one_minus_qi
    den = one_minus_q * D + one_minus_qi
    if np.any(den <= 0):
        k = int(np.flatnonzero(den <= 0)[0])
        raise ZeroDivisionError(f"closed-form denominator vanishes at i = {k}")
    w = base * _cumprod_from_one(num / den)
    return Distribution.from_weights(w, f"closed_form_asymmetric({dp})")
