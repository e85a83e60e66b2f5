"""Master-equation generator, stationary oracle, currents and time evolution."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .distribution import Distribution
from .schedules import RateSchedule

__all__ = [
    "Generator",
    "ReducibleChainError",
    "build_generator",
    "stationarity_residual",
    "null_space_stationary",
    "probability_current",
    "current_profile",
    "max_stable_step",
    "evolve",
]


PROPAGATOR_MAX_STATES = 1024


class ReducibleChainError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Generator:
    """Tridiagonal rate matrix ``Q`` with ``dp/dt = Q p``.

    ``sub[n-1]`` is the rate of ``n-1 -> n`` (``b_{n-1}``), ``sup[n]`` the
    rate of ``n+1 -> n`` (``d_{n+1}``) and ``diag[n]`` the total outflow of
    state ``n``.  The chain reflects at both ends.
    """

    N: int
    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray

    def apply(self, p: np.ndarray) -> np.ndarray:
        out = -self.diag * p
        out[1:] += self.sub * p[:-1]
        out[:-1] += self.sup * p[1:]
        return out

    def matrix(self) -> np.ndarray:
        return np.diag(-self.diag) + np.diag(self.sub, -1) + np.diag(self.sup, 1)


def build_generator(s: RateSchedule) -> Generator:
    N = s.N
    up = np.array(s.birth[: N + 1])
    up[N] = 0.0  # reflecting upper end
    down = np.array(s.death[: N + 1])
    down[0] = 0.0
    g = Generator(N, up[:N], up + down, down[1:])
    for arr in (g.sub, g.diag, g.sup):
        arr.setflags(write=False)
    return g


def _check_dims(g: Generator, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (g.N + 1,):
        raise ValueError(f"distribution has shape {p.shape}, generator has {g.N + 1} states")
    return p


def stationarity_residual(g: Generator, p) -> float:
    """``max_n |(Q p)_n|``."""
    return float(np.max(np.abs(g.apply(_check_dims(g, p)))))


def null_space_stationary(g: Generator) -> Distribution:
    """Solve ``Q p = 0`` by banded Gaussian elimination.

    The last balance row is redundant (columns sum to zero) and is replaced
    by ``p_N = 1``; the result is then normalized.
    """
    if np.any(g.sub <= 0) or np.any(g.sup <= 0):
        bad = np.flatnonzero((g.sub <= 0) | (g.sup <= 0))
        raise ReducibleChainError(f"zero interior rate on bond ({bad[0]}, {bad[0] + 1})")
    n = g.N + 1
    ab = np.zeros((3, n))
    ab[0, 1:] = g.sup
    ab[1, :] = -g.diag
    ab[2, :-1] = g.sub
    ab[1, -1] = 1.0
    ab[2, -2] = 0.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    x = solve_banded((1, 1), ab, rhs)
    return Distribution.from_weights(x, "oracle")


def probability_current(s: RateSchedule, p, n: int) -> float:
    """Net flow ``b_{n-1} p_{n-1} - d_n p_n`` across the bond ``(n-1, n)``."""
    if not 1 <= n <= s.N:
        raise IndexError(f"bond index n = {n} outside [1, {s.N}]")
    p = np.asarray(p, dtype=float)
    return s.b(n - 1) * float(p[n - 1]) - s.d(n) * float(p[n])


def current_profile(s: RateSchedule, p) -> np.ndarray:
    """Bond currents ``J_1 .. J_N``."""
    p = np.asarray(p, dtype=float)
    if len(p) != s.N + 1:
        raise ValueError(f"distribution has {len(p)} states, schedule has {s.N + 1}")
    return s.birth[: s.N] * p[:-1] - s.death[1 : s.N + 1] * p[1:]


def max_stable_step(g: Generator) -> float:
    return 0.1 / float(np.max(g.diag))


def rk4_propagator(g: Generator, h: float) -> np.ndarray:
    """One classical RK4 step for the linear system, as a matrix."""
    A = h * g.matrix()
    M = np.eye(g.N + 1)
    term = np.eye(g.N + 1)
    for k in range(1, 5):
        term = term @ A / k
        M = M + term
    return M


def evolve(g: Generator, p0, t_final: float, dt: float, return_path: bool = False):
    """Integrate ``dp/dt = Q p`` with fixed-step classical RK4.

    The step actually taken is ``t_final / ceil(t_final / dt)``.  With
    ``return_path`` the state after every step is returned as well; otherwise
    the steps are applied as a power of the one-step propagator, which is the
    same scheme evaluated by repeated squaring.
    """
    p = _check_dims(g, p0).copy()
    bound = max_stable_step(g)
    if not 0 < dt <= bound:
        raise ValueError(f"dt = {dt} exceeds the stability bound 0.1/max(sigma) = {bound}")
    if t_final < 0:
        raise ValueError("t_final must be >= 0")
    steps = math.ceil(t_final / dt) if t_final > 0 else 0
    h = t_final / steps if steps else 0.0
    if not return_path and g.N + 1 <= PROPAGATOR_MAX_STATES and steps > 4 * (g.N + 1):
        p = np.linalg.matrix_power(rk4_propagator(g, h), steps) @ p
        return Distribution(p, 1.0, "evolved")
    path = [p.copy()] if return_path else None
    for _ in range(steps):
        k1 = g.apply(p)
        k2 = g.apply(p + 0.5 * h * k1)
        k3 = g.apply(p + 0.5 * h * k2)
        k4 = g.apply(p + h * k3)
        p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if return_path:
            path.append(p.copy())
    result = Distribution(p, 1.0, "evolved")
    if return_path:
        return result, np.linspace(0.0, t_final, steps + 1), np.array(path)
    return result
