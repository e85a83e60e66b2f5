"""Discrete Riccati equation attached to the stationary birth-death balance.

With ``r_{n+1} = P_n / P_{n+1}`` the substitution

    y_{n-1} = P_{n-1}/P_n + (1 - sigma_n)/b_{n-1}

turns stationarity of the interior balance equations into the quadratic
recurrence checked by :func:`riccati_residual`.  Detailed balance gives the
particular solution ``y0_n = (1 - b_{n+1})/b_n``; the one-parameter family on
top of it is built from the products ``f_n`` and partial sums ``S_n``.

Two families are exposed:

* :func:`riccati_general` is the exact general solution
  ``y0_n + F_n/(D - T_n)`` with ``F_n = (d_1/b_0) f_{n-1}`` and
  ``T_n = 1 + (d_1/b_0) S_{n-1}``.  It satisfies the recurrence for every
  schedule.
* :func:`riccati_parametric` is ``y0_n + f_n/(D - S_n)``, the sequence that
  generates :func:`bdriccati.stationary.parametric_stationary`.  It solves the
  recurrence only when ``b_{i-1} d_{i+1}/b_i^2`` does not depend on ``i``
  (constant and biased-walk schedules), where both families coincide.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .distribution import Distribution, NonpositivePivot
from .schedules import RateSchedule

__all__ = [
    "DParameter",
    "D_INFINITY",
    "FProducts",
    "RiccatiSequence",
    "f_products",
    "riccati_particular",
    "particular_sequence",
    "riccati_general",
    "riccati_parametric",
    "riccati_residual",
    "max_riccati_residual",
    "distribution_to_riccati",
    "riccati_to_distribution",
]

# f_n is accumulated in log space past this size or for extreme factors.
LOG_SPACE_N = 64
LOG_SPACE_RATIO = (1e-6, 1e6)


@dataclass(frozen=True)
class DParameter:
    """Free constant ``D < 0``; ``D = -inf`` is the exact classical limit."""

    D: float

    def __post_init__(self):
        D = float(self.D)
        if math.isnan(D) or not D < 0:
            raise ValueError(f"D must be negative (or -inf), got {self.D!r}")
        object.__setattr__(self, "D", D)

    @property
    def is_limit(self) -> bool:
        return math.isinf(self.D)

    @property
    def magnitude(self) -> float:
        return -self.D

    @classmethod
    def parse(cls, value) -> "DParameter":
        """Accept a negative number or one of the tokens ``inf``/``-inf``."""
        if isinstance(value, DParameter):
            return value
        if isinstance(value, str):
            token = value.strip().lower()
            if token in ("inf", "-inf", "infinity", "-infinity"):
                return D_INFINITY
            value = float(token)
        return cls(float(value))

    def token(self) -> str:
        return "inf" if self.is_limit else repr(self.D)

    def __str__(self):
        return "-inf" if self.is_limit else f"{self.D:g}"


D_INFINITY = DParameter(-math.inf)


@dataclass(frozen=True, eq=False)
class FProducts:
    """``f_n = prod_{i<=n} b_i d_{i+2} / b_{i+1}^2`` and ``S_n = sum_{k<=n} f_k b_{k+1}/d_{k+2}``.

    Arrays are indexed by ``n = 0..N-1``; ``f_{-1} = 1`` and ``S_{-1} = 0``
    are available through :meth:`shifted`.
    """

    f: np.ndarray
    S: np.ndarray
    log_f: np.ndarray
    log_space: bool

    def shifted(self) -> tuple[np.ndarray, np.ndarray]:
        """``(f_{n-1}, S_{n-1})`` for ``n = 0..N-1``."""
        return np.concatenate(([1.0], self.f[:-1])), np.concatenate(([0.0], self.S[:-1]))


def _neumaier_cumsum(terms) -> np.ndarray:
    out = np.empty(len(terms))
    total = 0.0
    comp = 0.0
    for k, x in enumerate(terms):
        t = total + x
        if abs(total) >= abs(x):
            comp += (total - t) + x
        else:
            comp += (x - t) + total
        total = t
        out[k] = total + comp
    return out


@lru_cache(maxsize=256)
def f_products(s: RateSchedule) -> FProducts:
    N = s.N
    b, d = s.birth, s.death
    factors = b[:N] * d[2 : N + 2] / b[1 : N + 1] ** 2
    lo, hi = LOG_SPACE_RATIO
    log_f = np.cumsum(np.log(factors))
    log_space = N > LOG_SPACE_N or bool(np.any((factors < lo) | (factors > hi)))
    if log_space:
        f = np.exp(log_f)
    else:
        f = np.empty(N)
        acc = 1.0
        for n in range(N):
            acc *= factors[n]
            f[n] = acc
    S = _neumaier_cumsum(f * (b[1 : N + 1] / d[2 : N + 2]))
    if not (np.all(np.isfinite(f)) and np.all(np.isfinite(S))):
        raise OverflowError(f"f-products overflow for schedule {s.label!r} at N = {N}")
    for arr in (f, S, log_f):
        arr.setflags(write=False)
    return FProducts(f, S, log_f, log_space)


@dataclass(frozen=True, eq=False)
class RiccatiSequence:
    """``y_0 .. y_{N-1}`` for a given schedule.

    ``y_lo`` optionally holds the rounding error of ``y`` (so that
    ``y + y_lo`` is exact); :func:`distribution_to_riccati` fills it so the
    inverse transform does not lose the ratio ``P_{n-1}/P_n`` when the offset
    ``(1 - sigma_n)/b_{n-1}`` dominates it.
    """

    y: np.ndarray
    schedule_id: str
    kind: str = "explicit"
    y_lo: np.ndarray | None = None

    def __post_init__(self):
        y = np.array(self.y, dtype=float)
        y.setflags(write=False)
        object.__setattr__(self, "y", y)
        if self.y_lo is not None:
            lo = np.array(self.y_lo, dtype=float)
            if lo.shape != y.shape:
                raise ValueError("y_lo must match y in shape")
            lo.setflags(write=False)
            object.__setattr__(self, "y_lo", lo)

    def __len__(self):
        return len(self.y)


def riccati_particular(s: RateSchedule, n: int) -> float:
    if not 0 <= n <= s.N - 1:
        raise IndexError(f"n = {n} outside [0, {s.N - 1}]")
    return (1.0 - s.b(n + 1)) / s.b(n)


def _y0(s: RateSchedule) -> np.ndarray:
    N = s.N
    return (1.0 - s.birth[1 : N + 1]) / s.birth[:N]


def particular_sequence(s: RateSchedule) -> RiccatiSequence:
    return RiccatiSequence(_y0(s), s.label, "particular")


def _correction(log_num: np.ndarray, denom_mag: np.ndarray) -> np.ndarray:
    # num / (D - T) with D - T = -denom_mag < 0
    if np.any(denom_mag <= 0):
        n = int(np.flatnonzero(denom_mag <= 0)[0])
        raise ZeroDivisionError(f"degenerate Riccati denominator at n = {n}")
    return -np.exp(log_num - np.log(denom_mag))


def riccati_general(s: RateSchedule, dp: DParameter) -> RiccatiSequence:
    """Exact one-parameter solution of the Riccati recurrence."""
    y0 = _y0(s)
    if dp.is_limit:
        return RiccatiSequence(y0, s.label, "general(-inf)")
    fp = f_products(s)
    c = s.d(1) / s.b(0)
    log_F = math.log(c) + np.concatenate(([0.0], fp.log_f[:-1]))
    _, S_prev = fp.shifted()
    T = 1.0 + c * S_prev
    return RiccatiSequence(y0 + _correction(log_F, dp.magnitude + T), s.label, f"general({dp})")


def riccati_parametric(s: RateSchedule, dp: DParameter) -> RiccatiSequence:
    """``y0_n + f_n/(D - S_n)``: the sequence behind the parametric stationary family."""
    y0 = _y0(s)
    if dp.is_limit:
        return RiccatiSequence(y0, s.label, "parametric(-inf)")
    fp = f_products(s)
    return RiccatiSequence(y0 + _correction(fp.log_f, dp.magnitude + fp.S), s.label, f"parametric({dp})")


def riccati_residual(s: RateSchedule, y: RiccatiSequence, n: int) -> float:
    """LHS minus RHS of the Riccati recurrence at ``n`` (``1 <= n <= N-1``)."""
    if not 1 <= n <= s.N - 1:
        raise IndexError(f"residual index n = {n} outside [1, {s.N - 1}]")
    if len(y) != s.N:
        raise ValueError(f"sequence length {len(y)} does not match N = {s.N}")
    yn, ym = float(y.y[n]), float(y.y[n - 1])
    bm, bn = s.b(n - 1), s.b(n)
    one_minus_sigma = 1.0 - s.sigma(n + 1)
    rhs = bm * yn * ym - (bm / bn) * one_minus_sigma * ym + s.d(n + 1) + one_minus_sigma / bn
    return yn - rhs


def max_riccati_residual(s: RateSchedule, y: RiccatiSequence) -> float:
    return max((abs(riccati_residual(s, y, n)) for n in range(1, s.N)), default=0.0)


def _two_sum(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _offsets(s: RateSchedule) -> np.ndarray:
    """``(1 - sigma_{n+1})/b_n`` for ``n = 0..N-1``."""
    n = np.arange(1, s.N + 1)
    return (1.0 - (s.birth[n] + s.death[n])) / s.birth[n - 1]


def distribution_to_riccati(p, s: RateSchedule) -> RiccatiSequence:
    p = np.asarray(p, dtype=float)
    N = s.N
    if len(p) != N + 1:
        raise ValueError(f"distribution has {len(p)} states, schedule has {N + 1}")
    if np.any(p <= 0):
        n = int(np.flatnonzero(p <= 0)[0])
        raise ValueError(f"p_{n} = {p[n]!r}; the substitution needs strictly positive probabilities")
    y, lo = _two_sum(p[:-1] / p[1:], _offsets(s))
    return RiccatiSequence(y, s.label, "from_distribution", lo)


def riccati_to_distribution(y: RiccatiSequence, s: RateSchedule) -> Distribution:
    """Rebuild the distribution via ``P_{n+1} = P_n / (y_n + (sigma_{n+1} - 1)/b_n)``."""
    N = s.N
    if len(y) != N:
        raise ValueError(f"sequence length {len(y)} does not match N = {N}")
    # y - offset is exact when the two nearly cancel (Sterbenz), so adding
    # y_lo afterwards recovers the ratio to one rounding
    pivots = y.y - _offsets(s)
    if y.y_lo is not None:
        pivots = pivots + y.y_lo
    bad = np.flatnonzero(pivots <= 0)
    if bad.size:
        raise NonpositivePivot(int(bad[0]), float(pivots[bad[0]]))
    w = np.empty(N + 1)
    w[0] = 1.0
    for k in range(N):
        w[k + 1] = w[k] / pivots[k]
    return Distribution.from_weights(w, f"riccati({y.kind})")
